#pragma once

#include "tsocb/dsl.hpp"
#include "tsocb/program.hpp"
#include "tsocb/tso.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace tsocb {

struct GenResult {
  Program program;
  Target target;
  /// Smallest context bound the construction needs; 0 when it depends on
  /// the run (DLCS reduction).
  std::size_t kHint = 0;
};

/// Lamport's bakery for n threads p1..pn plus a monitor thread that reaches
/// `monitor:violation` when two threads have announced themselves critical
/// through the in_crit_i flags at the same time.
GenResult genBakery(std::size_t n);

/// Single-thread program that reaches `t:accept` iff the languages of all
/// automata intersect. Every automaton state gets its own register holding a
/// distinct fresh value, and one register per automaton tracks the current
/// state. Throws ModelError("alphabet mismatch").
GenResult genIntersection(const std::vector<Dfa> &dfas);

/// Emptiness check on the product automaton.
bool dfaIntersectionOracle(const std::vector<Dfa> &dfas);

/// Two-thread program simulating the DLCS: `t` runs the model, `t_ch` copies
/// x_a to y_a through its store buffer. Target is the model's target in `t`.
GenResult genDlcsReduction(const DlcsModel &m);

struct DlcsConfig {
  std::uint32_t state = 0;
  std::vector<Value> vals;
  /// Front is the oldest message, the next to be received.
  std::vector<std::pair<std::uint32_t, Value>> channel;

  friend bool operator==(const DlcsConfig &, const DlcsConfig &) = default;
};

struct DlcsBounds {
  std::size_t channelLen = 3;
  /// Fresh values come from {0..freshValues-1}, minus current values.
  Value freshValues = 4;
  std::size_t depth = 200;
  std::size_t maxStates = 1'000'000;
};

struct DlcsStep {
  /// Index into the model's transitions; empty for a loss step.
  std::optional<std::size_t> edge;
  DlcsConfig config;
};

struct DlcsVerdict {
  Outcome outcome = Outcome::NotReachable;
  DlcsConfig initial;
  std::optional<std::vector<DlcsStep>> witness;
  SearchStats stats;

  bool reachable() const { return outcome == Outcome::Reachable; }
};

DlcsVerdict dlcsReachBounded(const DlcsModel &m, std::uint32_t target, const DlcsBounds &b);

} // namespace tsocb
