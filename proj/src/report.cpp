#include "tsocb/report.hpp"

#include <json.hpp>

namespace tsocb {

namespace {

using nlohmann::json;

json targetJson(const Program &p, const Target &t) {
  return {{"thread", p.threads.at(t.thread).name},
          {"state", p.threads.at(t.thread).states.at(t.state)}};
}

json statsJson(const SearchStats &s) {
  return {{"states_explored", s.statesExplored},
          {"peak_frontier", s.peakFrontier},
          {"wall_ms", s.wallMs}};
}

} // namespace

std::string verdictReport(const Program &p, std::size_t k, const Target &target, const Verdict &v,
                          const std::optional<ConcreteRun> &concrete) {
  json out;
  out["reachable"] = v.reachable();
  out["outcome"] = toString(v.outcome);
  out["k"] = k;
  out["target"] = targetJson(p, target);
  json steps = json::array();
  if (v.witness) {
    const AbMachine m(p, k);
    AbState at = v.witness->initial.ab;
    for (std::size_t i = 0; i < v.witness->steps.size(); ++i) {
      const auto &step = v.witness->steps[i];
      json e;
      e["thread"] = p.threads.at(step.label.thread).name;
      e["label"] = m.describe(step.label);
      json effects = json::array();
      for (const auto &tr : m.transitions(at))
        if (tr.label == step.label)
          for (const auto &eff : tr.effects)
            effects.push_back(describe(m.layout(), eff));
      e["effects"] = std::move(effects);
      json values = json::object();
      if (concrete && i < concrete->steps.size()) {
        const auto &mem = concrete->steps[i].config.mem;
        for (AbVar x = 0; x < mem.size(); ++x)
          values[m.layout().name(x)] = mem[x];
        if (concrete->steps[i].fresh)
          e["fresh"] = *concrete->steps[i].fresh;
      }
      e["values"] = std::move(values);
      steps.push_back(std::move(e));
      at = step.state.ab;
    }
    json act = json::array();
    for (ThreadId t : v.witness->initial.ab.act)
      act.push_back(p.threads.at(t).name);
    out["act"] = std::move(act);
  }
  out["witness"] = std::move(steps);
  out["stats"] = statsJson(v.stats);
  out["stats"]["max_key_bytes"] = v.maxKeyBytes;
  return out.dump(2);
}

std::string tsoVerdictReport(const Program &p, std::optional<std::size_t> k,
                             const Target &target, const TsoVerdict &v) {
  json out;
  out["reachable"] = v.reachable();
  out["outcome"] = toString(v.outcome);
  out["k"] = k ? json(*k) : json(nullptr);
  out["target"] = targetJson(p, target);
  json steps = json::array();
  if (v.witness) {
    for (const auto &step : v.witness->steps) {
      json e;
      e["thread"] = p.threads.at(step.label.thread).name;
      e["label"] = describe(p, step.label);
      e["effects"] = json::array();
      json values = json::object();
      for (RegId r = 0; r < p.numRegs(); ++r)
        values[p.regNames[r]] = step.config.rval[r];
      for (VarId x = 0; x < p.numVars(); ++x)
        values[p.vars[x]] = step.config.mem[x];
      e["values"] = std::move(values);
      steps.push_back(std::move(e));
    }
  }
  out["witness"] = std::move(steps);
  out["stats"] = statsJson(v.stats);
  return out.dump(2);
}

std::string suiteReport(const std::vector<SuiteResult> &suites) {
  json out = json::array();
  for (const auto &s : suites)
    out.push_back({{"name", s.name},
                   {"passed", s.passed()},
                   {"cases", s.cases},
                   {"failures", s.failures},
                   {"first_failure", s.firstFailure},
                   {"detail", s.detail},
                   {"wall_ms", s.wallMs}});
  return out.dump(2);
}

} // namespace tsocb
