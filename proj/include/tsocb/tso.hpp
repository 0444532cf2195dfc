#pragma once

#include "tsocb/program.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace tsocb {

/// Raised when an operation's precondition is violated (a label that is not
/// enabled, a malformed run handed to a transform, ...).
class ModelError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct BufferEntry {
  VarId var = 0;
  Value value = 0;
  friend bool operator==(const BufferEntry &, const BufferEntry &) = default;
};

/// Concrete TSO configuration: control states, register values, one FIFO
/// store buffer per thread (front = oldest), and shared memory.
struct TsoConfig {
  std::vector<StateId> st;
  std::vector<Value> rval;
  std::vector<std::vector<BufferEntry>> buf;
  std::vector<Value> mem;

  static TsoConfig initial(const Program &p);

  friend bool operator==(const TsoConfig &, const TsoConfig &) = default;
};

struct TsoConfigHash {
  std::size_t operator()(const TsoConfig &c) const;
};

/// A step of thread `thread`: either a program transition (index into the
/// thread's transition list; `value` is the drawn value for NewValue) or an
/// update flushing the oldest buffer entry when `transition` is empty.
struct Label {
  ThreadId thread = 0;
  std::optional<std::size_t> transition;
  Value value = 0;

  bool isUpdate() const { return !transition.has_value(); }
  static Label update(ThreadId t) { return {t, std::nullopt, 0}; }
  static Label op(ThreadId t, std::size_t idx, Value v = 0) { return {t, idx, v}; }

  friend bool operator==(const Label &, const Label &) = default;
  friend auto operator<=>(const Label &, const Label &) = default;
};

std::string describe(const Program &p, const Label &l);

/// Finitization used by the explicit-state oracles. The real data domain is
/// infinite, so a verdict produced under these bounds is an
/// under-approximation.
struct Bounds {
  std::size_t bufferBound = 2;
  Value domainBound = 3;
  std::size_t depth = 300;
  std::size_t maxStates = 2'000'000;
};

struct RunStep {
  Label label;
  TsoConfig config;
};

struct Run {
  TsoConfig initial;
  std::vector<RunStep> steps;

  const TsoConfig &last() const { return steps.empty() ? initial : steps.back().config; }
};

enum class Outcome : std::uint8_t { Reachable, NotReachable, BoundExhausted };

std::string toString(Outcome o);

struct SearchStats {
  std::size_t statesExplored = 0;
  std::size_t peakFrontier = 0;
  std::int64_t wallMs = 0;
};

/// Result of a bounded concrete search. NotReachable only means "not within
/// the given bounds".
struct TsoVerdict {
  Outcome outcome = Outcome::NotReachable;
  std::optional<Run> witness;
  SearchStats stats;

  bool reachable() const { return outcome == Outcome::Reachable; }
};

/// Labels enabled in `c`, sorted.
std::vector<Label> tsoEnabled(const Program &p, const TsoConfig &c, const Bounds &b);

/// Successor of `c` under `l`. Throws ModelError if `l` is not enabled; the
/// buffer bound is not consulted here.
TsoConfig tsoStep(const Program &p, const TsoConfig &c, const Label &l);

TsoVerdict tsoReachBounded(const Program &p, const Target &target, const Bounds &b);

/// Like tsoReachBounded but restricted to runs with at most k contexts, where
/// a context is a maximal block of steps (operations and updates) of one
/// thread.
TsoVerdict cbReachBounded(const Program &p, const Target &target, std::size_t k, const Bounds &b);

/// True iff the labels of `run` split into at most k single-thread blocks.
bool cbPartitionCheck(const Run &run, std::size_t k);

/// Replays `labels` from the initial configuration; throws ModelError on the
/// first label that is not enabled.
Run replay(const Program &p, const std::vector<Label> &labels);

/// Moves every update to the end of its context, keeping the order of
/// everything else. The run must be a CB(k) run without arw operations.
Run normalizeUpdates(const Program &p, const Run &run, std::size_t k);

} // namespace tsocb
