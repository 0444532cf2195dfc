#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace tsocb {

/// Values range over the naturals; 0 is the initial value of everything.
using Value = std::uint64_t;

using ThreadId = std::uint32_t;
using StateId = std::uint32_t;
/// Registers are numbered globally across all threads.
using RegId = std::uint32_t;
using VarId = std::uint32_t;

enum class RelKind : std::uint8_t { Eq, Neq, Lt, Le };

/// A relation of the theory: =, !=, and the gap relations a+n<b / a+n<=b.
/// Plain < and <= are Lt/Le with n = 0.
struct Relation {
  RelKind kind = RelKind::Eq;
  std::uint32_t n = 0;

  static constexpr Relation eq() { return {RelKind::Eq, 0}; }
  static constexpr Relation neq() { return {RelKind::Neq, 0}; }
  static constexpr Relation lt(std::uint32_t n = 0) { return {RelKind::Lt, n}; }
  static constexpr Relation le(std::uint32_t n = 0) { return {RelKind::Le, n}; }

  bool isOrder() const { return kind == RelKind::Lt || kind == RelKind::Le; }

  friend bool operator==(const Relation &, const Relation &) = default;
};

bool evalRel(Relation rel, Value lhs, Value rhs);
std::string toString(Relation rel);

enum class OpKind : std::uint8_t { Assign, NewValue, Guard, Read, Write, Arw };

/// One of the six thread operations. Which fields are meaningful depends on
/// `kind`:
///   Assign   r1 := r2
///   NewValue r1 := *
///   Guard    assume r1 REL r2
///   Read     read x r1
///   Write    write x r1
///   Arw      arw x r1 r2  (if mem[x] == r1 then mem[x] := r2, atomically)
struct Op {
  OpKind kind = OpKind::Assign;
  RegId r1 = 0;
  RegId r2 = 0;
  VarId var = 0;
  Relation rel{};

  static Op assign(RegId dst, RegId src) { return {OpKind::Assign, dst, src, 0, {}}; }
  static Op newValue(RegId dst) { return {OpKind::NewValue, dst, 0, 0, {}}; }
  static Op guard(Relation rel, RegId a, RegId b) { return {OpKind::Guard, a, b, 0, rel}; }
  static Op read(VarId x, RegId dst) { return {OpKind::Read, dst, 0, x, {}}; }
  static Op write(VarId x, RegId src) { return {OpKind::Write, src, 0, x, {}}; }
  static Op arw(VarId x, RegId expected, RegId desired) {
    return {OpKind::Arw, expected, desired, x, {}};
  }

  bool usesSecondReg() const {
    return kind == OpKind::Assign || kind == OpKind::Guard || kind == OpKind::Arw;
  }
  bool usesVar() const {
    return kind == OpKind::Read || kind == OpKind::Write || kind == OpKind::Arw;
  }

  friend bool operator==(const Op &a, const Op &b);
};

struct Transition {
  StateId from = 0;
  Op op;
  StateId to = 0;

  friend bool operator==(const Transition &, const Transition &) = default;
};

struct Thread {
  std::string name;
  std::vector<std::string> states;
  std::vector<RegId> regs;
  StateId init = 0;
  std::vector<Transition> transitions;

  friend bool operator==(const Thread &, const Thread &) = default;
};

struct Target {
  ThreadId thread = 0;
  StateId state = 0;

  friend bool operator==(const Target &, const Target &) = default;
};

struct Program {
  std::vector<std::string> vars;
  std::vector<std::string> regNames;
  std::vector<Thread> threads;
  std::optional<Target> target;

  std::size_t numRegs() const { return regNames.size(); }
  std::size_t numVars() const { return vars.size(); }
  std::size_t numThreads() const { return threads.size(); }

  /// Largest gap constant appearing in any guard.
  std::uint32_t nMax() const;
  /// True if some guard uses <, <=, <N or <=N.
  bool usesOrder() const;

  std::optional<ThreadId> findThread(std::string_view name) const;
  std::optional<StateId> findState(ThreadId t, std::string_view name) const;
  std::optional<VarId> findVar(std::string_view name) const;

  /// Owning thread of each register; only meaningful for a valid program.
  std::vector<ThreadId> regOwners() const;

  std::string describe(ThreadId t, const Op &op) const;

  friend bool operator==(const Program &, const Program &) = default;
};

struct Diagnostic {
  std::string code;
  std::string message;

  friend bool operator==(const Diagnostic &, const Diagnostic &) = default;
  friend auto operator<=>(const Diagnostic &, const Diagnostic &) = default;
};

/// Checks every structural invariant; the result is sorted and empty iff the
/// program is well formed.
std::vector<Diagnostic> validate(const Program &p);

/// Builds programs with states interned in first-use order (init first, then
/// transition endpoints), which is also the order the DSL parser produces.
class ProgramBuilder {
public:
  VarId var(const std::string &name);
  ThreadId thread(const std::string &name, const std::string &initState);
  RegId reg(ThreadId t, const std::string &name);
  StateId state(ThreadId t, const std::string &name);
  void add(ThreadId t, const std::string &from, Op op, const std::string &to);
  void setTarget(ThreadId t, const std::string &state);

  /// Register id by name, without declaring it.
  std::optional<RegId> findReg(const std::string &name) const;

  const Program &peek() const { return prog_; }
  Program build() const { return prog_; }

private:
  Program prog_;
  std::unordered_map<std::string, VarId> varIds_;
  std::unordered_map<std::string, RegId> regIds_;
  std::vector<std::unordered_map<std::string, StateId>> stateIds_;
};

} // namespace tsocb
