#pragma once

#include "tsocb/ab_machine.hpp"
#include "tsocb/dsl.hpp"
#include "tsocb/program.hpp"
#include "tsocb/tso.hpp"

#include <cstddef>
#include <random>
#include <vector>

namespace tsocb {

using Rng = std::mt19937_64;

struct RandomProgramShape {
  std::size_t threads = 2;
  std::size_t maxStates = 4;
  std::size_t maxVars = 2;
  std::size_t maxRegs = 2;
  std::size_t maxTransitions = 6;
  bool allowArw = true;
  /// Drawn uniformly for every guard.
  std::vector<Relation> relations{Relation::eq(), Relation::neq(), Relation::lt(0),
                                  Relation::lt(1)};
};

/// A valid program with a target on a random non-initial state (or the
/// initial state when a thread has a single state).
Program randomProgram(Rng &rng, const RandomProgramShape &shape = {});

Dfa randomDfa(Rng &rng, std::size_t maxStates, const std::vector<std::string> &alphabet);

/// Random walk of the concrete AB LTS; FreshVar draws come from
/// {0..domain}. Steps whose guard fails are skipped, so the run may be
/// shorter than `steps`.
ConcreteRun randomAbRun(const AbMachine &m, Rng &rng, std::size_t steps, Value domain);

/// Random CB(k) TSO run under `b`'s buffer and domain bounds.
Run randomCbRun(const Program &p, std::size_t k, Rng &rng, std::size_t steps, const Bounds &b);

} // namespace tsocb
