#pragma once

#include "tsocb/ab_machine.hpp"
#include "tsocb/rel.hpp"
#include "tsocb/tso.hpp"

#include <cstddef>
#include <optional>
#include <vector>

namespace tsocb {

struct ReachOptions {
  std::size_t maxStates = 20'000'000;
  /// Approximate memory ceiling for the visited set; 0 disables the check.
  std::size_t maxMemoryMb = 0;
  /// Worker threads used to expand each BFS level. Results do not depend on it.
  unsigned threads = 1;
  /// Quotient the search by dead variables (and by class order when the
  /// program has no order guards). Verdicts are identical either way.
  bool reduce = true;
};

/// Canonicalization applied to every abstract state the engine stores.
///
/// A variable is dead when every continuation overwrites it before reading
/// it: registers by per-thread liveness or because their thread has no
/// context left, PerContext(x,j) once context j has passed or when x is not
/// flushed in j, PerThread(x,t) when t has no pending write on x in the
/// current or a later context. Dead variables are merged into the sentinel
/// class. When no guard of the program is an order relation, classes are
/// additionally sorted by their smallest member, since only equalities can
/// be observed.
///
/// The control part forgets bookkeeping about finished contexts: act and u
/// entries before the current context, and flush contexts c(x,t) that lie
/// in the past. No transition consults them. The control state of a thread
/// without contexts left is forgotten too, unless it is `observed` (the
/// target's thread).
class StateReducer {
public:
  StateReducer(const AbMachine &m, bool enabled, std::optional<ThreadId> observed = std::nullopt);

  bool enabled() const { return enabled_; }
  bool orderFree() const { return orderFree_; }
  bool live(const AbState &s, AbVar v) const;
  RelState canonical(const AbState &s, RelState rel) const;
  AbState control(AbState s) const;

private:
  const AbMachine *m_;
  bool enabled_;
  bool orderFree_;
  std::optional<ThreadId> observed_;
  std::vector<ThreadId> regOwner_;
  /// liveIn_[t][q] holds one flag per register of the program.
  std::vector<std::vector<std::vector<std::uint8_t>>> liveIn_;
};

struct WitnessStep {
  AbLabel label;
  /// State reached by the step.
  SearchState state;
};

struct Witness {
  SearchState initial;
  std::vector<WitnessStep> steps;
  /// Whether the states are StateReducer-canonical.
  bool reduced = true;
  Target target;
};

struct Verdict {
  Outcome outcome = Outcome::NotReachable;
  std::optional<Witness> witness;
  SearchStats stats;
  /// Largest canonical key encountered, in bytes.
  std::size_t maxKeyBytes = 0;

  bool reachable() const { return outcome == Outcome::Reachable; }
};

/// Decides whether `target` is reachable under TSO by a run with at most k
/// contexts, by breadth-first search over the finite order abstraction.
Verdict checkReach(const Program &p, std::size_t k, const Target &target,
                   const ReachOptions &opts = {});

/// Replays a witness over the naturals, choosing fresh values that realize
/// the recorded order and stretching gaps retroactively when a guard or a
/// fresh value needs more room. Throws ModelError("witness invalid") if the
/// witness cannot be realized.
ConcreteRun concretizeWitness(const Program &p, std::size_t k, const Witness &w);

/// Adds c to every value >= d in every configuration and every drawn fresh
/// value of the run.
ConcreteRun inflate(const ConcreteRun &run, Value d, Value c);

/// True iff `run` starts in an initial configuration and every step replays
/// under the concrete AB semantics to the recorded configuration.
bool validateWitness(const Program &p, std::size_t k, const ConcreteRun &run);

} // namespace tsocb
