// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include "tsocb/dsl.hpp"
#include "tsocb/generators.hpp"
#include "tsocb/reach.hpp"
#include "tsocb/suites.hpp"
#include "tsocb/tso.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>

#ifndef TSOCB_CORPUS_DIR
#define TSOCB_CORPUS_DIR "corpus"
#endif

using namespace tsocb;
namespace fs = std::filesystem;

namespace {

// Oracle answer for bakery(2) at k=4, buffer 2, values 0..4, depth 300.
// Computed by cbReachBounded before the engine existed.
constexpr Outcome kBakery2K4 = Outcome::Reachable;

struct Line {
  bool ok = false;
  std::string text;
};

Line fromSuite(const SuiteResult &r, std::size_t minCases) {
  std::ostringstream os;
  os << r.name << ": " << r.cases << " cases, " << r.failures << " failures, " << r.wallMs << " ms";
  if (!r.detail.empty())
    os << " (" << r.detail << ")";
  if (r.cases < minCases)
    os << ", needs at least " << minCases << " cases";
  if (!r.firstFailure.empty())
    os << "\n    first failure: " << r.firstFailure;
  return {r.passed() && r.cases >= minCases, os.str()};
}

std::string slurp(const fs::path &p) {
  std::ifstream in(p);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::size_t kHintOf(const std::string &text, std::size_t fallback) {
  const std::string tag = "# k_hint ";
  if (text.rfind(tag, 0) != 0)
    return fallback;
  const std::size_t k = std::strtoul(text.c_str() + tag.size(), nullptr, 10);
  return k == 0 ? fallback : k;
}

/// Built-in entries plus the files under corpus/, without duplicates.
std::vector<CorpusEntry> fullCorpus(const fs::path &dir) {
  std::vector<CorpusEntry> out = builtinCorpus();
  std::vector<fs::path> files;
  if (fs::is_directory(dir))
    for (const auto &e : fs::directory_iterator(dir))
      files.push_back(e.path());
  std::sort(files.begin(), files.end());
  auto add = [&](const std::string &name, Program p, std::size_t maxK) {
    for (const auto &e : out)
      if (e.program == p)
        return;
    out.push_back({name, std::move(p), maxK});
  };
  for (const auto &f : files) {
    const std::string text = slurp(f);
    const std::string name = "corpus/" + f.filename().string();
    if (f.extension() == ".tso")
      add(name, parseProgram(text), kHintOf(text, 3));
    else if (f.extension() == ".dfa") {
      const GenResult g = genIntersection({parseDfa(text)});
      add(name, g.program, g.kHint + 1);
    } else if (f.extension() == ".dlcs")
      add(name, genDlcsReduction(parseDlcs(text)).program, 3);
  }
  return out;
}

Line litmus() {
  std::ostringstream os;
  bool ok = true;
  const Program mp = messagePassingLitmus();
  const Bounds b;
  for (std::size_t k : {1u, 2u}) {
    const Outcome want = k == 1 ? Outcome::NotReachable : Outcome::Reachable;
    const Outcome engine = checkReach(mp, k, *mp.target).outcome;
    const Outcome oracle = cbReachBounded(mp, *mp.target, k, b).outcome;
    ok = ok && engine == want && oracle == want;
    os << "message-passing k=" << k << " engine " << toString(engine) << ", oracle "
       << toString(oracle) << "; ";
  }

  const GenResult bak = genBakery(2);
  Bounds ob;
  ob.bufferBound = 2;
  ob.domainBound = 4;
  ob.depth = 300;
  ob.maxStates = 30'000'000;
  const TsoVerdict oracle = cbReachBounded(bak.program, bak.target, 4, ob);
  const Verdict engine = checkReach(bak.program, 4, bak.target);
  ok = ok && oracle.outcome == kBakery2K4 && engine.outcome == kBakery2K4;
  os << "bakery(2) k=4 expected " << toString(kBakery2K4) << ", oracle " << toString(oracle.outcome)
     << " (" << oracle.stats.statesExplored << " configurations), engine "
     << toString(engine.outcome) << " (" << engine.stats.statesExplored << " states)";
  if (engine.reachable()) {
    const ConcreteRun run = concretizeWitness(bak.program, 4, *engine.witness);
    const bool valid = validateWitness(bak.program, 4, run);
    ok = ok && valid;
    if (!valid)
      os << ", witness does not validate";
  }
  return {ok, os.str()};
}

/// Upper bound on the bytes needed per stored state, written independently
/// of the encoder: at most two bytes per control entry, rank and context
/// slot, plus a few bytes of framing.
std::size_t keyBound(std::size_t T, std::size_t X, std::size_t R, std::size_t k) {
  const std::size_t abVars = X + R + X * k + X * T + 1;
  const std::size_t control = T + k + 1 + X * T + X * k;
  return 2 * (abVars + control) + 8;
}

Line keySize(const std::vector<CorpusEntry> &corpus) {
  std::ostringstream os;
  bool ok = true;
  std::size_t runs = 0, tightest = 0;
  std::string worst;
  for (const auto &e : corpus)
    for (std::size_t k = 1; k <= e.maxK; ++k) {
      const Program &p = e.program;
      Verdict v;
      try {
        v = checkReach(p, k, *p.target);
      } catch (const std::logic_error &err) {
        ok = false;
        os << e.name << " k=" << k << ": " << err.what() << "; ";
        continue;
      }
      ++runs;
      const std::size_t bound = keyBound(p.numThreads(), p.numVars(), p.numRegs(), k);
      if (v.maxKeyBytes == 0 || v.maxKeyBytes > bound) {
        ok = false;
        os << e.name << " k=" << k << ": " << v.maxKeyBytes << " > " << bound << "; ";
      }
      if (v.maxKeyBytes > tightest) {
        tightest = v.maxKeyBytes;
        worst = e.name + " k=" + std::to_string(k) + " " + std::to_string(v.maxKeyBytes) + "/" +
                std::to_string(bound) + " bytes";
      }
    }
  os << runs << " runs within 2(|X_AB| + |T| + k + 1 + |X||T| + |X|k) + 8 bytes, largest " << worst;
  return {ok && runs > 0, os.str()};
}

} // namespace

int main(int argc, char **argv) {
  const std::uint64_t seed = argc > 1 ? std::strtoull(argv[1], nullptr, 10) : 1;
  const fs::path corpusDir = argc > 2 ? fs::path(argv[2]) : fs::path(TSOCB_CORPUS_DIR);

  std::vector<std::pair<std::string, std::function<Line()>>> criteria{
      {"oracle equivalence", [&] { return fromSuite(oracleEquivalenceSuite(seed, 200), 200); }},
      {"abstract step soundness", [&] { return fromSuite(stepSoundnessSuite(seed, 1000), 1000); }},
      {"gap inflation", [&] { return fromSuite(inflationSuite(seed, 100), 100); }},
      {"DFA intersection", [&] { return fromSuite(intersectionSuite(seed, 20, 5000), 20); }},
      {"lossy channel reduction", [&] { return fromSuite(dlcsReductionSuite(), 5); }},
      {"context bound monotonicity",
       [&] { return fromSuite(monotonicitySuite(fullCorpus(corpusDir)), 1); }},
      {"litmus and bakery regression", litmus},
      {"state size bound", [&] { return keySize(fullCorpus(corpusDir)); }},
      {"update normalization", [&] { return fromSuite(normalizationSuite(seed, 100), 100); }},
  };

  bool all = true;
  int n = 0;
  for (const auto &[name, run] : criteria) {
    ++n;
    const auto started = std::chrono::steady_clock::now();
    Line l;
    try {
      l = run();
    } catch (const std::exception &e) {
      l = {false, std::string("exception: ") + e.what()};
    }
    const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                        std::chrono::steady_clock::now() - started)
                        .count();
    all = all && l.ok;
    std::cout << (l.ok ? "PASS" : "FAIL") << " [" << n << "] " << name << " (" << ms << " ms): " << l.text
              << std::endl;
  }
  return all ? 0 : 1;
}
