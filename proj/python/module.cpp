// Python bindings: programs are passed around as opaque objects, verdicts
// come back as the same JSON reports the CLI writes.

#include "tsocb/dsl.hpp"
#include "tsocb/generators.hpp"
#include "tsocb/reach.hpp"
#include "tsocb/report.hpp"
#include "tsocb/suites.hpp"
#include "tsocb/tso.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace tsocb;

namespace {

Target resolve(const Program &p, const std::optional<std::pair<std::string, std::string>> &t) {
  if (!t) {
    if (!p.target)
      throw py::value_error("program declares no target; pass target=(thread, state)");
    return *p.target;
  }
  const auto th = p.findThread(t->first);
  if (!th)
    throw py::value_error("unknown thread '" + t->first + "'");
  const auto st = p.findState(*th, t->second);
  if (!st)
    throw py::value_error("unknown state '" + t->second + "'");
  return {*th, *st};
}

py::object targetOf(const Program &p) {
  if (!p.target)
    return py::none();
  const auto &th = p.threads[p.target->thread];
  return py::make_tuple(th.name, th.states[p.target->state]);
}

std::string check(const Program &p, std::size_t k,
                  const std::optional<std::pair<std::string, std::string>> &target, bool witness,
                  std::size_t maxStates, unsigned threads, bool reduce) {
  if (k < 1)
    throw py::value_error("k must be at least 1");
  const Target t = resolve(p, target);
  ReachOptions o;
  o.maxStates = maxStates;
  o.threads = threads;
  o.reduce = reduce;
  py::gil_scoped_release nogil;
  const Verdict v = checkReach(p, k, t, o);
  std::optional<ConcreteRun> run;
  if (witness && v.reachable())
    run = concretizeWitness(p, k, *v.witness);
  return verdictReport(p, k, t, v, run);
}

std::string simulate(const Program &p, std::optional<std::size_t> k,
                     const std::optional<std::pair<std::string, std::string>> &target,
                     std::size_t bufferBound, Value domainBound, std::size_t depth,
                     std::size_t maxStates) {
  const Target t = resolve(p, target);
  Bounds b{bufferBound, domainBound, depth, maxStates};
  py::gil_scoped_release nogil;
  const TsoVerdict v = k ? cbReachBounded(p, t, *k, b) : tsoReachBounded(p, t, b);
  return tsoVerdictReport(p, k, t, v);
}

std::string selftest(std::uint64_t seed, bool full) {
  py::gil_scoped_release nogil;
  std::vector<SuiteResult> rs;
  rs.push_back(oracleEquivalenceSuite(seed, full ? 200 : 20));
  rs.push_back(stepSoundnessSuite(seed, full ? 1000 : 200));
  rs.push_back(inflationSuite(seed, full ? 100 : 20));
  rs.push_back(normalizationSuite(seed, full ? 100 : 20));
  rs.push_back(reductionAgreementSuite(seed, full ? 100 : 20));
  rs.push_back(intersectionSuite(seed, full ? 20 : 5));
  rs.push_back(dlcsReductionSuite());
  return suiteReport(rs);
}

py::tuple generated(const GenResult &g) { return py::make_tuple(g.program, g.kHint); }

} // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Context-bounded reachability for TSO programs";

  PYBIND11_CONSTINIT static py::gil_safe_call_once_and_store<py::object> parseError;
  parseError.call_once_and_store_result([&]() {
    return py::object(py::exception<ParseError>(m, "ParseError", PyExc_ValueError));
  });
  py::register_exception_translator([](std::exception_ptr e) {
    try {
      if (e)
        std::rethrow_exception(e);
    } catch (const ParseError &err) {
      const py::object &type = parseError.get_stored();
      py::object exc = type(err.what());
      exc.attr("line") = err.span().line;
      exc.attr("column") = err.span().column;
      PyErr_SetObject(type.ptr(), exc.ptr());
    }
  });
  py::register_exception<ModelError>(m, "ModelError", PyExc_ValueError);

  py::class_<Program>(m, "Program")
      .def_static("parse", [](const std::string &text) { return parseProgram(text); }, py::arg("text"))
      .def("render", &renderProgram)
      .def_property_readonly("vars", [](const Program &p) { return p.vars; })
      .def_property_readonly("threads",
                             [](const Program &p) {
                               std::vector<std::string> out;
                               for (const auto &t : p.threads)
                                 out.push_back(t.name);
                               return out;
                             })
      .def_property_readonly("num_regs", &Program::numRegs)
      .def_property_readonly("target", &targetOf)
      .def("states", [](const Program &p, const std::string &thread) {
        const auto t = p.findThread(thread);
        if (!t)
          throw py::value_error("unknown thread '" + thread + "'");
        return p.threads[*t].states;
      })
      .def("validate",
           [](const Program &p) {
             std::vector<std::pair<std::string, std::string>> out;
             for (const auto &d : validate(p))
               out.emplace_back(d.code, d.message);
             return out;
           })
      .def("__eq__", [](const Program &a, const Program &b) { return a == b; })
      .def("__repr__", [](const Program &p) {
        return "<Program " + std::to_string(p.numThreads()) + " threads, " +
               std::to_string(p.numVars()) + " vars>";
      });

  m.def("parse_program", [](const std::string &text) { return parseProgram(text); }, py::arg("text"));
  m.def("canonical_dfa", [](const std::string &text) { return renderDfa(parseDfa(text)); },
        py::arg("text"));
  m.def("canonical_dlcs", [](const std::string &text) { return renderDlcs(parseDlcs(text)); },
        py::arg("text"));

  m.def("_check_reach", &check, py::arg("program"), py::arg("k"), py::arg("target") = py::none(),
        py::arg("witness") = true, py::arg("max_states") = 20'000'000, py::arg("threads") = 1,
        py::arg("reduce") = true);
  m.def("_simulate", &simulate, py::arg("program"), py::arg("k") = py::none(),
        py::arg("target") = py::none(), py::arg("buffer_bound") = 2, py::arg("domain_bound") = 3,
        py::arg("depth") = 300, py::arg("max_states") = 2'000'000);
  m.def("_selftest", &selftest, py::arg("seed") = 1, py::arg("full") = false);

  m.def("gen_bakery", [](std::size_t n) { return generated(genBakery(n)); }, py::arg("n"));
  m.def(
      "gen_intersection",
      [](const std::vector<std::string> &dfas) {
        std::vector<Dfa> ds;
        for (const auto &t : dfas)
          ds.push_back(parseDfa(t));
        return generated(genIntersection(ds));
      },
      py::arg("dfas"));
  m.def(
      "dfa_intersection_nonempty",
      [](const std::vector<std::string> &dfas) {
        std::vector<Dfa> ds;
        for (const auto &t : dfas)
          ds.push_back(parseDfa(t));
        return dfaIntersectionOracle(ds);
      },
      py::arg("dfas"));
  m.def("gen_dlcs", [](const std::string &text) { return generated(genDlcsReduction(parseDlcs(text))); },
        py::arg("text"));
  m.def(
      "dlcs_reach",
      [](const std::string &text, std::size_t channelLen, Value freshValues, std::size_t depth) {
        const DlcsModel model = parseDlcs(text);
        if (!model.target)
          throw py::value_error("model declares no target");
        return toString(dlcsReachBounded(model, *model.target, {channelLen, freshValues, depth, 1'000'000})
                            .outcome);
      },
      py::arg("text"), py::arg("channel_len") = 3, py::arg("fresh_values") = 4, py::arg("depth") = 200);
  m.def("message_passing_litmus", &messagePassingLitmus);
}
