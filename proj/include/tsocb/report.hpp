#pragma once

#include "tsocb/ab_machine.hpp"
#include "tsocb/reach.hpp"
#include "tsocb/suites.hpp"
#include "tsocb/tso.hpp"

#include <optional>
#include <string>

namespace tsocb {

/// JSON report of an engine verdict. When `concrete` is given, every witness
/// step lists the natural value of each abstract variable after the step.
std::string verdictReport(const Program &p, std::size_t k, const Target &target, const Verdict &v,
                          const std::optional<ConcreteRun> &concrete);

/// Same schema for a bounded concrete search; `k` is omitted (null) for the
/// plain TSO oracle. Values are registers and shared memory after each step.
std::string tsoVerdictReport(const Program &p, std::optional<std::size_t> k,
                             const Target &target, const TsoVerdict &v);

std::string suiteReport(const std::vector<SuiteResult> &suites);

} // namespace tsocb
