// tsocbmc: context-bounded reachability for TSO programs over the naturals.

#include "tsocb/dsl.hpp"
#include "tsocb/generators.hpp"
#include "tsocb/reach.hpp"
#include "tsocb/report.hpp"
#include "tsocb/suites.hpp"
#include "tsocb/tso.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace tsocb;

namespace {

enum Exit : int { kUnreachable = 0, kReachable = 1, kUsage = 2, kExhausted = 3 };

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string slurp(const std::string &path) {
  std::ifstream in(path);
  if (!in)
    throw UsageError("cannot read " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void emit(const std::string &text, const std::string &out) {
  if (out.empty()) {
    std::cout << text;
    if (!text.empty() && text.back() != '\n')
      std::cout << '\n';
    return;
  }
  std::ofstream f(out);
  if (!f)
    throw UsageError("cannot write " + out);
  f << text;
  if (!text.empty() && text.back() != '\n')
    f << '\n';
}

/// First word that is not inside a comment.
std::string firstWord(const std::string &text) {
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    line = line.substr(0, line.find('#'));
    std::istringstream words(line);
    std::string w;
    if (words >> w)
      return w;
  }
  return {};
}

Target resolveTarget(const Program &p, const std::string &text) {
  if (text.empty()) {
    if (!p.target)
      throw UsageError("program declares no target; pass --target THREAD:STATE");
    return *p.target;
  }
  const auto colon = text.find(':');
  if (colon == std::string::npos)
    throw UsageError("--target expects THREAD:STATE");
  const auto t = p.findThread(text.substr(0, colon));
  if (!t)
    throw UsageError("unknown thread in --target: " + text.substr(0, colon));
  const auto s = p.findState(*t, text.substr(colon + 1));
  if (!s)
    throw UsageError("unknown state in --target: " + text.substr(colon + 1));
  return {*t, *s};
}

std::size_t memoryCapMb() {
  const char *env = std::getenv("TSOCBMC_MAX_MB");
  if (!env || !*env)
    return 0;
  char *end = nullptr;
  const unsigned long long mb = std::strtoull(env, &end, 10);
  if (*end != '\0')
    throw UsageError("TSOCBMC_MAX_MB must be a whole number of megabytes");
  return static_cast<std::size_t>(mb);
}

int exitFor(Outcome o) {
  switch (o) {
  case Outcome::Reachable:
    return kReachable;
  case Outcome::NotReachable:
    return kUnreachable;
  case Outcome::BoundExhausted:
    return kExhausted;
  }
  return kUsage;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Context-bounded TSO reachability checker"};
  app.require_subcommand(1);

  std::string input, out, target;
  auto *parse = app.add_subcommand("parse", "Parse a .tso, .dfa or .dlcs file and print it back");
  parse->add_option("file", input, "Input file")->required();
  parse->add_option("--out", out, "Write the canonical text here");

  std::size_t k = 0, maxStates = 20'000'000;
  unsigned threads = 1;
  bool witness = false, noReduce = false;
  auto *check = app.add_subcommand("check", "Decide CB(k) reachability of the target");
  check->add_option("file", input, "Program file")->required();
  check->add_option("--k", k, "Context bound")->required()->check(CLI::Range(1, 255));
  check->add_option("--target", target, "THREAD:STATE, overrides the file's target");
  check->add_flag("--witness", witness, "Concretize the witness and print it");
  check->add_option("--max-states", maxStates, "Abstract state budget");
  check->add_option("--out", out, "Write the JSON report here");
  check->add_option("--threads", threads, "Worker threads for frontier expansion")
      ->check(CLI::Range(1, 256));
  check->add_flag("--no-reduce", noReduce, "Disable dead-variable and order quotienting");

  bool tso = false;
  std::size_t cb = 0;
  Bounds bounds;
  auto *sim = app.add_subcommand("simulate", "Bounded concrete search (oracle)");
  sim->add_option("file", input, "Program file")->required();
  auto *tsoFlag = sim->add_flag("--tso", tso, "Unrestricted TSO runs");
  auto *cbOpt = sim->add_option("--cb", cb, "Runs with at most K contexts")->check(CLI::Range(1, 255));
  tsoFlag->excludes(cbOpt);
  sim->add_option("--buffer-bound", bounds.bufferBound, "Store buffer capacity");
  sim->add_option("--domain-bound", bounds.domainBound, "Largest value drawn by :=*");
  sim->add_option("--depth", bounds.depth, "Maximal run length");
  sim->add_option("--max-states", bounds.maxStates, "Configuration budget");
  sim->add_option("--target", target, "THREAD:STATE, overrides the file's target");
  sim->add_option("--out", out, "Write the JSON report here");

  auto *gen = app.add_subcommand("gen", "Generate a program");
  gen->require_subcommand(1);
  std::size_t n = 2;
  std::vector<std::string> dfaFiles;
  std::string dlcsFile;
  auto *bakery = gen->add_subcommand("bakery", "Lamport's bakery with a mutual exclusion monitor");
  bakery->add_option("--n", n, "Number of threads")->check(CLI::Range(1, 16));
  bakery->add_option("--out", out, "Output file");
  auto *inter = gen->add_subcommand("intersection", "DFA intersection program");
  inter->add_option("files", dfaFiles, "DFA files")->required();
  inter->add_option("--out", out, "Output file");
  auto *dlcs = gen->add_subcommand("dlcs", "Program simulating a lossy channel system");
  dlcs->add_option("file", dlcsFile, "DLCS file")->required();
  dlcs->add_option("--out", out, "Output file");

  std::uint64_t seed = 1;
  bool full = false;
  auto *self = app.add_subcommand("selftest", "Run the randomized property suites");
  self->add_option("--seed", seed, "Random seed");
  self->add_flag("--full", full, "Use the full case counts instead of a quick pass");
  self->add_option("--out", out, "Write the JSON summary here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsage;
  }

  try {
    if (*parse) {
      const std::string text = slurp(input);
      const std::string kind = firstWord(text);
      if (kind == "dfa")
        emit(renderDfa(parseDfa(text)), out);
      else if (kind == "dlcs")
        emit(renderDlcs(parseDlcs(text)), out);
      else
        emit(renderProgram(parseProgram(text)), out);
      return 0;
    }

    if (*check) {
      const Program p = parseProgram(slurp(input));
      const Target t = resolveTarget(p, target);
      ReachOptions opts;
      opts.maxStates = maxStates;
      opts.maxMemoryMb = memoryCapMb();
      opts.threads = threads;
      opts.reduce = !noReduce;
      const Verdict v = checkReach(p, k, t, opts);
      std::optional<ConcreteRun> run;
      if (v.reachable() && (witness || !out.empty()))
        run = concretizeWitness(p, k, *v.witness);
      const std::string report = verdictReport(p, k, t, v, run);
      if (!out.empty())
        emit(report, out);
      if (witness)
        std::cout << report << '\n';
      else
        std::cout << toString(v.outcome) << " (k=" << k << ", " << v.stats.statesExplored
                  << " states, " << v.stats.wallMs << " ms)\n";
      return exitFor(v.outcome);
    }

    if (*sim) {
      if (!tso && cb == 0)
        throw UsageError("simulate needs --tso or --cb K");
      const Program p = parseProgram(slurp(input));
      const Target t = resolveTarget(p, target);
      if (const std::size_t mb = memoryCapMb())
        // a stored configuration costs a few hundred bytes
        bounds.maxStates = std::min(bounds.maxStates, mb * 1024 * 1024 / 256);
      const TsoVerdict v = tso ? tsoReachBounded(p, t, bounds) : cbReachBounded(p, t, cb, bounds);
      const std::optional<std::size_t> kk = tso ? std::nullopt : std::optional<std::size_t>(cb);
      const std::string report = tsoVerdictReport(p, kk, t, v);
      if (!out.empty())
        emit(report, out);
      std::cout << toString(v.outcome) << " (" << v.stats.statesExplored << " configurations, "
                << v.stats.wallMs << " ms)\n";
      return exitFor(v.outcome);
    }

    if (*gen) {
      GenResult g;
      if (*bakery) {
        g = genBakery(n);
      } else if (*inter) {
        std::vector<Dfa> dfas;
        for (const auto &f : dfaFiles)
          dfas.push_back(parseDfa(slurp(f)));
        g = genIntersection(dfas);
      } else {
        g = genDlcsReduction(parseDlcs(slurp(dlcsFile)));
      }
      std::string text = renderProgram(g.program);
      if (g.kHint > 0)
        text = "# k_hint " + std::to_string(g.kHint) + "\n" + text;
      emit(text, out);
      return 0;
    }

    if (*self) {
      const std::size_t scale = full ? 1 : 0;
      std::vector<SuiteResult> rs;
      rs.push_back(oracleEquivalenceSuite(seed, scale ? 200 : 20));
      rs.push_back(stepSoundnessSuite(seed, scale ? 1000 : 200));
      rs.push_back(inflationSuite(seed, scale ? 100 : 20));
      rs.push_back(normalizationSuite(seed, scale ? 100 : 20));
      rs.push_back(reductionAgreementSuite(seed, scale ? 100 : 20));
      rs.push_back(intersectionSuite(seed, scale ? 20 : 5));
      rs.push_back(dlcsReductionSuite());
      bool ok = true;
      for (const auto &r : rs) {
        ok = ok && r.passed();
        std::cout << (r.passed() ? "PASS " : "FAIL ") << r.name << ": " << r.cases << " cases, "
                  << r.failures << " failures, " << r.wallMs << " ms";
        if (!r.detail.empty())
          std::cout << " (" << r.detail << ")";
        std::cout << '\n';
        if (!r.firstFailure.empty())
          std::cout << "  first failure: " << r.firstFailure << '\n';
      }
      if (!out.empty())
        emit(suiteReport(rs), out);
      return ok ? 0 : 1;
    }
  } catch (const ParseError &e) {
    std::cerr << input << ":" << e.what() << '\n';
    return kUsage;
  } catch (const UsageError &e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const ModelError &e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}
