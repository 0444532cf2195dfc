#pragma once

#include "tsocb/ab_machine.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace tsocb {

/// Order abstraction of a valuation: a dense rank per abstract variable.
/// Equal rank means equal value, smaller rank means smaller value, and the
/// image of `rank` is always {0..m}. Equality is therefore an equivalence,
/// disequality its complement, and < a total order on classes, without any
/// side checks.
struct RelState {
  std::vector<std::uint16_t> rank;

  std::uint16_t maxRank() const;
  std::size_t numClasses() const { return rank.empty() ? 0 : maxRank() + 1u; }

  friend bool operator==(const RelState &, const RelState &) = default;
  friend auto operator<=>(const RelState &, const RelState &) = default;
};

/// Everything starts at 0, so all variables share one class.
RelState relInitial(const AbLayout &layout);

/// Dense ranking of the values.
RelState abstractOf(const std::vector<Value> &mem);

/// Abstract truth of a guard. Gap relations are softened to strict order,
/// except that plain <= (n = 0) stays non-strict.
bool relCheck(const RelState &s, Relation rel, AbVar a, AbVar b);

/// All abstract successors of `s` under one effect. `sentinel` is the class
/// floor: fresh values are never placed strictly below its class.
std::vector<RelState> relApply(const RelState &s, const AbEffect &e, AbVar sentinel);

/// Successors under a whole effect list, in deterministic order.
std::vector<RelState> relApplyAll(const RelState &s, const std::vector<AbEffect> &effects,
                                  AbVar sentinel);

/// Renumbers ranks so that their image is contiguous again.
void densify(std::vector<std::uint16_t> &rank);

struct SearchState {
  AbState ab;
  RelState rel;

  friend bool operator==(const SearchState &, const SearchState &) = default;
};

/// Fixed-width little-endian encoding of a search state; injective over
/// well-formed states of one program and bound. `narrow` stores thread,
/// state and rank numbers in one byte instead of two, which is only valid
/// when all of them are below 256.
std::string canonicalKey(const SearchState &s, bool narrow = false);

/// Length in bytes of every canonical key for the given dimensions.
std::size_t canonicalKeyLength(std::size_t threads, std::size_t vars, std::size_t regs,
                               std::size_t k, bool narrow = false);

} // namespace tsocb
