#pragma once

#include "tsocb/program.hpp"
#include "tsocb/tso.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace tsocb {

/// Index of a variable of the buffer-abstract machine.
using AbVar = std::uint32_t;

enum class AbVarKind : std::uint8_t { Shared, Reg, PerContext, PerThread, Sentinel };

/// Numbering of the abstract variable set:
///   Shared(x)        shared memory value of x
///   Reg(r)           register r
///   PerContext(x,j)  last write on x leaving a buffer in context j
///   PerThread(x,t)   newest write of t on x still in t's buffer
///   Sentinel         never written, pinned to 0
/// Contexts are numbered 1..k.
class AbLayout {
public:
  AbLayout(const Program &p, std::size_t k);

  std::size_t size() const { return sentinel_ + 1; }
  std::size_t contexts() const { return k_; }

  AbVar shared(VarId x) const { return x; }
  AbVar reg(RegId r) const { return static_cast<AbVar>(vars_ + r); }
  AbVar perContext(VarId x, std::uint32_t j) const {
    return static_cast<AbVar>(vars_ + regs_ + x * k_ + (j - 1));
  }
  AbVar perThread(VarId x, ThreadId t) const {
    return static_cast<AbVar>(vars_ + regs_ + vars_ * k_ + x * threads_ + t);
  }
  AbVar sentinel() const { return sentinel_; }

  AbVarKind kind(AbVar v) const;
  std::string name(AbVar v) const;

private:
  const Program *prog_;
  std::size_t k_, vars_, regs_, threads_;
  AbVar sentinel_;
};

/// Control state of the abstract machine.
///   c[x*|T|+t]      context in which the newest write of t on x flushes,
///                   0 when t has no pending write on x
///   u[(j-1)*|X|+x]  1 iff x is flushed at the end of context j
struct AbState {
  std::vector<StateId> st;
  std::vector<ThreadId> act;
  std::uint32_t j = 1;
  std::vector<std::uint8_t> c;
  std::vector<std::uint8_t> u;

  friend bool operator==(const AbState &, const AbState &) = default;
};

struct CopyVar {
  AbVar dst, src;
  friend bool operator==(const CopyVar &, const CopyVar &) = default;
};
struct FreshVar {
  AbVar dst;
  friend bool operator==(const FreshVar &, const FreshVar &) = default;
};
struct GuardRel {
  Relation rel;
  AbVar a, b;
  friend bool operator==(const GuardRel &, const GuardRel &) = default;
};
/// Simultaneous assignment of all pairs.
struct MultiCopy {
  std::vector<CopyVar> copies;
  friend bool operator==(const MultiCopy &, const MultiCopy &) = default;
};
using AbEffect = std::variant<CopyVar, FreshVar, GuardRel, MultiCopy>;

std::string describe(const AbLayout &layout, const AbEffect &e);

enum class AbRule : std::uint8_t {
  Local,
  BufferRead,
  MemoryRead,
  Write,
  ContextSwitch,
  BufferArw,
  MemoryArw,
};

std::string toString(AbRule r);

struct AbLabel {
  AbRule rule = AbRule::Local;
  ThreadId thread = 0;
  /// Index into the thread's transitions; unused for ContextSwitch.
  std::size_t transition = 0;
  /// Flush context chosen by a write, 0 otherwise.
  std::uint32_t writeContext = 0;

  friend bool operator==(const AbLabel &, const AbLabel &) = default;
  friend auto operator<=>(const AbLabel &, const AbLabel &) = default;
};

struct AbTransition {
  AbLabel label;
  std::vector<AbEffect> effects;
  AbState next;
};

/// A configuration of the induced LTS over the naturals.
struct AbConfig {
  AbState state;
  std::vector<Value> mem;
  friend bool operator==(const AbConfig &, const AbConfig &) = default;
};

struct ConcreteStep {
  AbLabel label;
  /// Value drawn by a FreshVar effect, if the step has one.
  std::optional<Value> fresh;
  AbConfig config;
};

struct ConcreteRun {
  AbConfig initial;
  std::vector<ConcreteStep> steps;

  const AbConfig &last() const { return steps.empty() ? initial : steps.back().config; }
};

class GuardFailed : public ModelError {
public:
  using ModelError::ModelError;
};

/// The buffer-abstract machine for a program and context bound k.
class AbMachine {
public:
  AbMachine(const Program &p, std::size_t k);

  const Program &program() const { return *prog_; }
  const AbLayout &layout() const { return layout_; }
  std::size_t k() const { return k_; }

  /// Initial control state for a given assignment of threads to contexts.
  AbState initial(const std::vector<ThreadId> &act) const;
  /// Every act function {1..k} -> T, lexicographically ordered.
  std::vector<std::vector<ThreadId>> allActs() const;

  /// Outgoing abstract transitions, in label order.
  std::vector<AbTransition> transitions(const AbState &s) const;

  /// Applies `label` over naturals. `fresh` supplies the value of a FreshVar.
  /// Throws GuardFailed when a guard does not hold and ModelError when the
  /// label is not enabled in the control state.
  AbConfig concreteStep(const AbConfig &from, const AbLabel &label,
                        std::optional<Value> fresh = std::nullopt) const;

  AbConfig initialConfig(const std::vector<ThreadId> &act) const;

  std::string describe(const AbLabel &l) const;

  /// Index of the newest pending flush context of thread t (0 if none).
  std::uint32_t maxPending(const AbState &s, ThreadId t) const;
  std::uint8_t pending(const AbState &s, VarId x, ThreadId t) const {
    return s.c[x * prog_->numThreads() + t];
  }
  bool flushes(const AbState &s, std::uint32_t ctx, VarId x) const {
    return s.u[(ctx - 1) * prog_->numVars() + x] != 0;
  }

private:
  const Program *prog_;
  std::size_t k_;
  AbLayout layout_;
};

/// Applies effects over naturals, in order. Throws GuardFailed.
void applyEffects(std::vector<Value> &mem, const std::vector<AbEffect> &effects,
                  std::optional<Value> fresh);

struct AbSearchResult {
  Outcome outcome = Outcome::NotReachable;
  std::optional<ConcreteRun> witness;
  std::size_t statesExplored = 0;
};

/// Bounded breadth-first search of the concrete AB LTS with FreshVar values
/// drawn from {0..domainBound}.
AbSearchResult abConcreteReach(const AbMachine &m, const Target &target, Value domainBound,
                               std::size_t depth, std::size_t maxStates);

/// Turns a concrete AB run into a TSO run: writes flush in the context they
/// were scheduled for, right before the switch (or before an arw that needs
/// the buffer drained). Throws ModelError if the TSO replay gets stuck.
Run abRunToTso(const AbMachine &m, const ConcreteRun &run);

} // namespace tsocb
