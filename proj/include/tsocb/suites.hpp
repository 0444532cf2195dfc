#pragma once

#include "tsocb/program.hpp"

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace tsocb {

/// Outcome of one randomized or corpus-driven property suite.
struct SuiteResult {
  std::string name;
  std::size_t cases = 0;
  std::size_t failures = 0;
  /// Description of the first failing case, empty if none.
  std::string firstFailure;
  /// Free-form counters, e.g. how many cases were reachable.
  std::string detail;
  std::int64_t wallMs = 0;

  bool passed() const { return cases > 0 && failures == 0; }
};

/// Random programs, k in {1,2,3}: the bounded CB oracle finding the target
/// must imply the engine finds it, and every engine witness must concretize,
/// validate and map back to a CB(k) TSO run that reaches the target.
SuiteResult oracleEquivalenceSuite(std::uint64_t seed, std::size_t programs);

/// Every concrete AB step is matched by an abstract successor, both on
/// plain rank states and on reduced ones.
SuiteResult stepSoundnessSuite(std::uint64_t seed, std::size_t steps);

/// inflate keeps random AB runs valid and their abstraction pointwise equal.
SuiteResult inflationSuite(std::uint64_t seed, std::size_t runs);

/// Engine on the intersection program vs the product-automaton oracle.
/// A case also fails when it takes longer than `maxMsPerInstance`.
SuiteResult intersectionSuite(std::uint64_t seed, std::size_t instances,
                              std::int64_t maxMsPerInstance = 5000);

/// Hand-built lossy channel systems: bounded DLCS search vs bounded TSO
/// search on the reduction.
SuiteResult dlcsReductionSuite();

struct CorpusEntry {
  std::string name;
  Program program;
  /// Largest k the monotonicity check goes up to.
  std::size_t maxK = 3;
};

/// Built-in example programs: litmus tests, bakery, intersection and DLCS
/// instances.
std::vector<CorpusEntry> builtinCorpus();

/// reachable at k implies reachable at k+1, for k < maxK.
SuiteResult monotonicitySuite(const std::vector<CorpusEntry> &corpus);

/// Moving updates to the end of each context leaves the final configuration
/// of random arw-free CB runs unchanged.
SuiteResult normalizationSuite(std::uint64_t seed, std::size_t runs);

/// The engine gives the same verdict with and without state reduction.
SuiteResult reductionAgreementSuite(std::uint64_t seed, std::size_t programs);

/// The message-passing litmus test.
Program messagePassingLitmus();

} // namespace tsocb
