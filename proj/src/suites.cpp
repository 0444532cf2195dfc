#include "tsocb/suites.hpp"

#include "tsocb/ab_machine.hpp"
#include "tsocb/dsl.hpp"
#include "tsocb/generators.hpp"
#include "tsocb/random.hpp"
#include "tsocb/reach.hpp"
#include "tsocb/rel.hpp"
#include "tsocb/tso.hpp"

#include <algorithm>
#include <chrono>
#include <sstream>

namespace tsocb {

namespace {

using Clock = std::chrono::steady_clock;

class Recorder {
public:
  explicit Recorder(std::string name) : started_(Clock::now()) { r_.name = std::move(name); }

  void pass() { ++r_.cases; }
  void fail(const std::string &why) {
    ++r_.cases;
    if (r_.failures++ == 0)
      r_.firstFailure = why;
  }
  void check(bool ok, const std::string &why) { ok ? pass() : fail(why); }
  SuiteResult done(std::string detail = {}) {
    r_.detail = std::move(detail);
    r_.wallMs =
        std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - started_).count();
    return r_;
  }

private:
  SuiteResult r_;
  Clock::time_point started_;
};

std::string caseName(std::uint64_t seed, std::size_t i, std::size_t k) {
  return "seed " + std::to_string(seed) + " case " + std::to_string(i) + " k=" + std::to_string(k);
}

Bounds oracleBounds() {
  Bounds b;
  b.bufferBound = 2;
  b.domainBound = 3;
  b.depth = 300;
  b.maxStates = 2'000'000;
  return b;
}

/// Full soundness chain for one engine witness. Empty string on success.
std::string checkWitness(const Program &p, std::size_t k, const Target &target, const Witness &w) {
  ConcreteRun run;
  try {
    run = concretizeWitness(p, k, w);
  } catch (const ModelError &e) {
    return std::string("concretization failed: ") + e.what();
  }
  if (!validateWitness(p, k, run))
    return "concretized run does not validate";
  if (run.last().state.st[target.thread] != target.state)
    return "concretized run misses the target";
  try {
    const AbMachine m(p, k);
    const Run tso = abRunToTso(m, run);
    if (!cbPartitionCheck(tso, k))
      return "TSO image needs more than k contexts";
    if (tso.last().st[target.thread] != target.state)
      return "TSO image misses the target";
  } catch (const ModelError &e) {
    return std::string("TSO image does not replay: ") + e.what();
  }
  return {};
}

} // namespace

SuiteResult oracleEquivalenceSuite(std::uint64_t seed, std::size_t programs) {
  Recorder rec("oracle-equivalence");
  Rng rng(seed);
  std::size_t both = 0, engineOnly = 0, neither = 0, exhausted = 0;
  for (std::size_t i = 0; i < programs; ++i) {
    const Program p = randomProgram(rng);
    const Target target = *p.target;
    for (std::size_t k = 1; k <= 3; ++k) {
      const std::string name = caseName(seed, i, k);
      const TsoVerdict oracle = cbReachBounded(p, target, k, oracleBounds());
      const Verdict v = checkReach(p, k, target);
      if (oracle.outcome == Outcome::BoundExhausted)
        ++exhausted;
      if (v.outcome == Outcome::BoundExhausted) {
        rec.fail(name + ": engine budget exhausted");
        continue;
      }
      if (oracle.reachable() && !v.reachable()) {
        rec.fail(name + ": oracle reaches the target, engine does not\n" + renderProgram(p));
        continue;
      }
      if (v.reachable()) {
        const std::string why = checkWitness(p, k, target, *v.witness);
        if (!why.empty()) {
          rec.fail(name + ": " + why + "\n" + renderProgram(p));
          continue;
        }
      }
      (oracle.reachable() ? both : v.reachable() ? engineOnly : neither)++;
      rec.pass();
    }
  }
  std::ostringstream os;
  os << "reachable by both " << both << ", engine only " << engineOnly << ", neither " << neither
     << ", oracle exhausted " << exhausted;
  return rec.done(os.str());
}

SuiteResult stepSoundnessSuite(std::uint64_t seed, std::size_t steps) {
  Recorder rec("step-soundness");
  Rng rng(seed);
  std::size_t runs = 0, checked = 0;
  while (checked < steps) {
    const Program p = randomProgram(rng);
    const std::size_t k = 1 + rng() % 3;
    const AbMachine m(p, k);
    const StateReducer red(m, true);
    const AbVar sentinel = m.layout().sentinel();
    const ConcreteRun run = randomAbRun(m, rng, 25, 4);
    ++runs;
    const AbConfig *prev = &run.initial;
    for (const auto &step : run.steps) {
      const auto trs = m.transitions(prev->state);
      const auto it = std::find_if(trs.begin(), trs.end(),
                                   [&](const AbTransition &t) { return t.label == step.label; });
      const std::string where = "seed " + std::to_string(seed) + " run " + std::to_string(runs) +
                                " step " + m.describe(step.label);
      if (it == trs.end()) {
        rec.fail(where + ": label vanished");
        break;
      }
      const RelState before = abstractOf(prev->mem);
      const RelState after = abstractOf(step.config.mem);
      const auto succ = relApplyAll(before, it->effects, sentinel);
      const bool plain = std::find(succ.begin(), succ.end(), after) != succ.end();

      const RelState rBefore = red.canonical(prev->state, before);
      const RelState rAfter = red.canonical(step.config.state, after);
      bool reduced = false;
      for (auto &s : relApplyAll(rBefore, it->effects, sentinel))
        reduced = reduced || red.canonical(step.config.state, std::move(s)) == rAfter;

      rec.check(plain && reduced,
                where + (plain ? ": no reduced successor matches" : ": no successor matches"));
      ++checked;
      prev = &step.config;
    }
  }
  return rec.done(std::to_string(runs) + " random runs");
}

SuiteResult inflationSuite(std::uint64_t seed, std::size_t runs) {
  Recorder rec("inflation");
  Rng rng(seed);
  for (std::size_t i = 0; i < runs; ++i) {
    const Program p = randomProgram(rng);
    const std::size_t k = 1 + rng() % 3;
    const AbMachine m(p, k);
    const ConcreteRun run = randomAbRun(m, rng, 20, 5);
    Value top = 0;
    for (Value v : run.last().mem)
      top = std::max(top, v);
    for (const auto &s : run.steps)
      for (Value v : s.config.mem)
        top = std::max(top, v);
    const Value d = 1 + rng() % (top + 1);
    const Value c = 1 + rng() % 5;
    const ConcreteRun big = inflate(run, d, c);
    bool same = abstractOf(big.initial.mem) == abstractOf(run.initial.mem);
    for (std::size_t s = 0; s < run.steps.size(); ++s)
      same = same && abstractOf(big.steps[s].config.mem) == abstractOf(run.steps[s].config.mem);
    const std::string where = caseName(seed, i, k) + " d=" + std::to_string(d) +
                              " c=" + std::to_string(c);
    if (!validateWitness(p, k, run))
      rec.fail(where + ": random run itself is invalid");
    else
      rec.check(same && validateWitness(p, k, big),
                where + (same ? ": inflated run invalid" : ": abstraction changed"));
  }
  return rec.done();
}

SuiteResult intersectionSuite(std::uint64_t seed, std::size_t instances,
                              std::int64_t maxMsPerInstance) {
  Recorder rec("dfa-intersection");
  Rng rng(seed);
  const std::vector<std::string> letters{"a", "b", "c"};
  std::size_t nonEmpty = 0;
  std::int64_t slowest = 0;
  for (std::size_t i = 0; i < instances; ++i) {
    const std::size_t sigma = 1 + rng() % 3;
    const std::vector<std::string> alphabet(letters.begin(), letters.begin() + sigma);
    const std::size_t count = 2 + rng() % 2;
    std::vector<Dfa> dfas;
    for (std::size_t j = 0; j < count; ++j)
      dfas.push_back(randomDfa(rng, 4, alphabet));
    const bool expected = dfaIntersectionOracle(dfas);
    nonEmpty += expected;
    const auto started = Clock::now();
    const GenResult g = genIntersection(dfas);
    const Verdict v = checkReach(g.program, g.kHint, g.target);
    const auto ms =
        std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - started).count();
    slowest = std::max<std::int64_t>(slowest, ms);
    std::string where = "seed " + std::to_string(seed) + " instance " + std::to_string(i);
    for (const auto &d : dfas)
      where += "\n" + renderDfa(d);
    if (v.reachable() != expected) {
      rec.fail(where + ": engine says " + toString(v.outcome));
    } else if (ms > maxMsPerInstance) {
      rec.fail(where + ": took " + std::to_string(ms) + " ms");
    } else if (v.reachable()) {
      const std::string why = checkWitness(g.program, g.kHint, g.target, *v.witness);
      rec.check(why.empty(), where + ": " + why);
    } else {
      rec.pass();
    }
  }
  return rec.done(std::to_string(nonEmpty) + " non-empty intersections, slowest " +
                  std::to_string(slowest) + " ms");
}

namespace {

struct DlcsCase {
  const char *name;
  const char *text;
};

// Small systems with one or two letters and at most four states.
const DlcsCase kDlcsCases[] = {
    {"send-recv-eq", R"(dlcs
states q0 q1 q2 q3
vars x y
alphabet a
init q0
q0 -> q1 : send a x
q1 -> q2 : recv a y
q2 -> q3 : assume x = y
target q3
)"},
    {"recv-never-sent", R"(dlcs
states q0 q1
vars x
alphabet a
init q0
q0 -> q1 : recv a x
target q1
)"},
    {"wrong-letter", R"(dlcs
states q0 q1 q2
vars x
alphabet a b
init q0
q0 -> q1 : send a x
q1 -> q2 : recv b x
target q2
)"},
    {"fresh-is-new", R"(dlcs
states q0 q1 q2
vars x y
alphabet a
init q0
q0 -> q1 : x := *
q1 -> q2 : assume x = y
target q2
)"},
    {"fresh-through-channel", R"(dlcs
states q0 q1 q2 q3
vars x y
alphabet a
init q0
q0 -> q1 : x := *
q1 -> q1 : send a x
q1 -> q2 : recv a y
q2 -> q3 : assume x = y
target q3
)"},
    {"loss-skips-head", R"(dlcs
states q0 q1 q2 q3
vars x y
alphabet a b
init q0
q0 -> q1 : send a x
q1 -> q2 : send b x
q2 -> q3 : recv b y
target q3
)"},
    {"value-preserved", R"(dlcs
states q0 q1 q2 q3
vars x y
alphabet a
init q0
q0 -> q0 : x := *
q0 -> q1 : send a x
q1 -> q2 : recv a y
q2 -> q3 : assume x != y
target q3
)"},
};

} // namespace

SuiteResult dlcsReductionSuite() {
  Recorder rec("dlcs-reduction");
  std::size_t reachable = 0;
  for (const auto &c : kDlcsCases) {
    const DlcsModel m = parseDlcs(c.text);
    DlcsBounds db;
    db.channelLen = 3;
    db.freshValues = 3;
    db.depth = 60;
    const DlcsVerdict dv = dlcsReachBounded(m, *m.target, db);
    const GenResult g = genDlcsReduction(m);
    Bounds tb;
    tb.bufferBound = 4;
    tb.domainBound = 2;
    tb.depth = 200;
    tb.maxStates = 3'000'000;
    const TsoVerdict tv = tsoReachBounded(g.program, g.target, tb);
    reachable += dv.reachable();
    if (dv.outcome == Outcome::BoundExhausted || tv.outcome == Outcome::BoundExhausted)
      rec.fail(std::string(c.name) + ": a bounded search ran out of budget");
    else
      rec.check(dv.reachable() == tv.reachable(),
                std::string(c.name) + ": DLCS " + toString(dv.outcome) + ", TSO " +
                    toString(tv.outcome));
  }
  return rec.done(std::to_string(reachable) + " reachable instances");
}

Program messagePassingLitmus() {
  return parseProgram(R"(domain nat
vars x y f

# t1 announces itself on f, then stores x and loads y
thread t1 {
  regs one1 ry z1
  init s0
  s0 -> s1 : one1 := *
  s1 -> s2 : assume one1 != z1
  s2 -> s3 : write f one1
  s3 -> s4 : write x one1
  s4 -> s5 : read y ry
  s5 -> done : assume ry = z1
}

# t2 stores y, sees t1's flag, and still loads the old x
thread t2 {
  regs one2 rf rx z2
  init s0
  s0 -> s1 : one2 := *
  s1 -> s2 : assume one2 != z2
  s2 -> s3 : write y one2
  s3 -> s4 : read f rf
  s4 -> s5 : assume rf != z2
  s5 -> s6 : read x rx
  s6 -> done : assume rx = z2
}

target t2 : done
)");
}

std::vector<CorpusEntry> builtinCorpus() {
  std::vector<CorpusEntry> out;
  out.push_back({"message-passing", messagePassingLitmus(), 3});
  out.push_back({"bakery-1", genBakery(1).program, 3});
  out.push_back({"bakery-2", genBakery(2).program, 4});
  {
    const Dfa endsInA = parseDfa(R"(dfa
alphabet a b
states p q
init p
final q
p -> q : a
p -> p : b
q -> q : a
q -> p : b
)");
    const Dfa even = parseDfa(R"(dfa
alphabet a b
states e o
init e
final e
e -> o : a
e -> o : b
o -> e : a
o -> e : b
)");
    out.push_back({"intersection-ends-in-a-even", genIntersection({endsInA, even}).program, 2});
  }
  for (const auto &c : kDlcsCases)
    out.push_back({std::string("dlcs-") + c.name, genDlcsReduction(parseDlcs(c.text)).program, 3});
  return out;
}

SuiteResult monotonicitySuite(const std::vector<CorpusEntry> &corpus) {
  Recorder rec("monotonicity");
  std::size_t pairs = 0;
  for (const auto &e : corpus) {
    if (!e.program.target) {
      rec.fail(e.name + ": no target");
      continue;
    }
    bool prev = false;
    bool ok = true;
    for (std::size_t k = 1; k <= e.maxK; ++k) {
      const Verdict v = checkReach(e.program, k, *e.program.target);
      if (v.outcome == Outcome::BoundExhausted) {
        ok = false;
        rec.fail(e.name + ": budget exhausted at k=" + std::to_string(k));
        break;
      }
      if (prev && !v.reachable()) {
        ok = false;
        rec.fail(e.name + ": reachable at k=" + std::to_string(k - 1) + " but not at k=" +
                 std::to_string(k));
        break;
      }
      prev = v.reachable();
      if (k > 1)
        ++pairs;
    }
    if (ok)
      rec.pass();
  }
  return rec.done(std::to_string(pairs) + " (k, k+1) pairs");
}

SuiteResult normalizationSuite(std::uint64_t seed, std::size_t runs) {
  Recorder rec("normalization");
  Rng rng(seed);
  RandomProgramShape shape;
  shape.allowArw = false;
  Bounds b = oracleBounds();
  for (std::size_t i = 0; i < runs; ++i) {
    const Program p = randomProgram(rng, shape);
    const std::size_t k = 1 + rng() % 3;
    const Run run = randomCbRun(p, k, rng, 30, b);
    const std::string where = caseName(seed, i, k);
    try {
      const Run norm = normalizeUpdates(p, run, k);
      rec.check(norm.last() == run.last() && cbPartitionCheck(norm, k) &&
                    norm.steps.size() == run.steps.size(),
                where + ": final configuration changed");
    } catch (const ModelError &e) {
      rec.fail(where + ": " + e.what());
    }
  }
  return rec.done();
}

SuiteResult reductionAgreementSuite(std::uint64_t seed, std::size_t programs) {
  Recorder rec("reduction-agreement");
  Rng rng(seed);
  ReachOptions plain;
  plain.reduce = false;
  for (std::size_t i = 0; i < programs; ++i) {
    const Program p = randomProgram(rng);
    const std::size_t k = 1 + rng() % 3;
    const Verdict a = checkReach(p, k, *p.target);
    const Verdict b = checkReach(p, k, *p.target, plain);
    std::string why;
    if (a.outcome != b.outcome)
      why = "reduced " + toString(a.outcome) + ", plain " + toString(b.outcome);
    else if (b.reachable())
      why = checkWitness(p, k, *p.target, *b.witness);
    rec.check(why.empty(), caseName(seed, i, k) + ": " + why);
  }
  return rec.done();
}

} // namespace tsocb
