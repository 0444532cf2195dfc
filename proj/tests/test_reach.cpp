#include "tsocb/dsl.hpp"
#include "tsocb/random.hpp"
#include "tsocb/reach.hpp"
#include "tsocb/suites.hpp"

#include <doctest.h>

using namespace tsocb;

namespace {

ConcreteRun drawOne(const Program &p, Value v) {
  const AbMachine m(p, 1);
  ConcreteRun run;
  run.initial = m.initialConfig({0});
  run.steps.push_back({{AbRule::Local, 0, 0, 0}, v, m.concreteStep(run.initial, {AbRule::Local, 0, 0, 0}, v)});
  return run;
}

std::vector<Value> allValues(const ConcreteRun &run) {
  std::vector<Value> out = run.initial.mem;
  for (const auto &s : run.steps) {
    out.insert(out.end(), s.config.mem.begin(), s.config.mem.end());
    if (s.fresh)
      out.push_back(*s.fresh);
  }
  return out;
}

} // namespace

TEST_CASE("check_reach: initial target") {
  const Program p = messagePassingLitmus();
  const Verdict v = checkReach(p, 1, {0, 0});
  REQUIRE(v.reachable());
  CHECK(v.witness->steps.empty());
}

TEST_CASE("check_reach: message passing") {
  const Program p = messagePassingLitmus();
  CHECK(checkReach(p, 1, *p.target).outcome == Outcome::NotReachable);
  const Verdict v = checkReach(p, 2, *p.target);
  REQUIRE(v.reachable());
  const ConcreteRun run = concretizeWitness(p, 2, *v.witness);
  CHECK(validateWitness(p, 2, run));
  CHECK(run.last().state.st[p.target->thread] == p.target->state);
  const Run tso = abRunToTso(AbMachine(p, 2), run);
  CHECK(cbPartitionCheck(tso, 2));
  CHECK(tso.last().st[p.target->thread] == p.target->state);
}

TEST_CASE("check_reach: same verdict for any worker count and without reduction") {
  Rng rng(23);
  for (int i = 0; i < 40; ++i) {
    const Program p = randomProgram(rng, {});
    for (std::size_t k = 1; k <= 3; ++k) {
      const Verdict base = checkReach(p, k, *p.target);
      ReachOptions par;
      par.threads = 4;
      const Verdict v4 = checkReach(p, k, *p.target, par);
      CHECK(v4.outcome == base.outcome);
      CHECK(v4.stats.statesExplored == base.stats.statesExplored);
      ReachOptions plain;
      plain.reduce = false;
      CHECK(checkReach(p, k, *p.target, plain).outcome == base.outcome);
    }
  }
}

TEST_CASE("check_reach: state budget") {
  const Program p = messagePassingLitmus();
  ReachOptions o;
  o.maxStates = 3;
  CHECK(checkReach(p, 3, *p.target, o).outcome == Outcome::BoundExhausted);
}

TEST_CASE("concretize_witness") {
  SUBCASE("equalities only, no inflation") {
    const Program p = parseProgram("domain nat\nthread t { regs a b c init q0\n"
                                   "q0 -> q1 : a := *\nq1 -> q2 : assume a != c\n"
                                   "q2 -> q3 : b := *\nq3 -> q4 : assume b != a\nq4 -> q5 : assume b != c }\n"
                                   "target t : q5\n");
    const Verdict v = checkReach(p, 1, *p.target);
    REQUIRE(v.reachable());
    const ConcreteRun run = concretizeWitness(p, 1, *v.witness);
    CHECK(validateWitness(p, 1, run));
    for (Value x : allValues(run))
      CHECK(x <= 2);
  }
  SUBCASE("gap guard over adjacent ranks") {
    const Program p = parseProgram("domain nat\nthread t { regs a b init q0\n"
                                   "q0 -> q1 : a := *\nq1 -> q2 : b := *\nq2 -> q3 : assume a <2 b }\n"
                                   "target t : q3\n");
    const Verdict v = checkReach(p, 1, *p.target);
    REQUIRE(v.reachable());
    const ConcreteRun run = concretizeWitness(p, 1, *v.witness);
    CHECK(validateWitness(p, 1, run));
    const AbLayout lay(p, 1);
    const auto &mem = run.last().mem;
    CHECK(mem[lay.reg(1)] >= mem[lay.reg(0)] + 3);
  }
  SUBCASE("every configuration abstracts to the witness state") {
    Rng rng(41);
    ReachOptions plain;
    plain.reduce = false;
    int checked = 0;
    for (int i = 0; i < 60; ++i) {
      const Program p = randomProgram(rng, {});
      const Verdict v = checkReach(p, 2, *p.target, plain);
      if (!v.reachable())
        continue;
      const ConcreteRun run = concretizeWitness(p, 2, *v.witness);
      REQUIRE(run.steps.size() == v.witness->steps.size());
      CHECK(abstractOf(run.initial.mem) == v.witness->initial.rel);
      for (std::size_t s = 0; s < run.steps.size(); ++s) {
        CHECK(abstractOf(run.steps[s].config.mem) == v.witness->steps[s].state.rel);
        CHECK(run.steps[s].config.state == v.witness->steps[s].state.ab);
      }
      ++checked;
    }
    CHECK(checked > 10);
  }
}

TEST_CASE("inflate") {
  const Program p = parseProgram("domain nat\nthread t { regs a init q0\n q0 -> q1 : a := * }");
  const ConcreteRun run = drawOne(p, 1);
  REQUIRE(validateWitness(p, 1, run));

  SUBCASE("shifts values at or above d") {
    const ConcreteRun big = inflate(run, 1, 5);
    CHECK(validateWitness(p, 1, big));
    CHECK(*big.steps[0].fresh == 6);
    for (Value v : allValues(big))
      CHECK((v == 0 || v == 6));
    CHECK(abstractOf(big.last().mem) == abstractOf(run.last().mem));
  }
  SUBCASE("d above every value") {
    const ConcreteRun same = inflate(run, 2, 5);
    CHECK(allValues(same) == allValues(run));
  }
  SUBCASE("two inflations add up") {
    CHECK(allValues(inflate(inflate(run, 1, 2), 1, 3)) == allValues(inflate(run, 1, 5)));
  }
}

TEST_CASE("validate_witness") {
  const Program p = parseProgram("domain nat\nthread t { regs a z init q0\n"
                                 "q0 -> q1 : a := *\nq1 -> q2 : assume a != z }\ntarget t : q2\n");
  const Verdict v = checkReach(p, 1, *p.target);
  REQUIRE(v.reachable());
  const ConcreteRun run = concretizeWitness(p, 1, *v.witness);
  CHECK(validateWitness(p, 1, run));

  ConcreteRun empty;
  empty.initial = run.initial;
  CHECK(validateWitness(p, 1, empty));

  ConcreteRun bad = run;
  const AbLayout lay(p, 1);
  bad.steps[0].fresh = 0;
  bad.steps[0].config.mem[lay.reg(0)] = 0;
  bad.steps[1].config.mem[lay.reg(0)] = 0;
  CHECK_FALSE(validateWitness(p, 1, bad));
}
