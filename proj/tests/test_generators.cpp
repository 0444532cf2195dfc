#include "tsocb/dsl.hpp"
#include "tsocb/generators.hpp"
#include "tsocb/reach.hpp"

#include <doctest.h>

#include <algorithm>

using namespace tsocb;

namespace {

const char *kEndsInA = "dfa alphabet a b states q0 q1 init q0 final q1\n"
                       "q0 -> q1 : a\nq0 -> q0 : b\nq1 -> q1 : a\nq1 -> q0 : b\n";
const char *kEven = "dfa alphabet a b states e o init e final e\n"
                    "e -> o : a\ne -> o : b\no -> e : a\no -> e : b\n";
const char *kEmpty = "dfa alphabet a b states q init q\nq -> q : a\nq -> q : b\n";
const char *kEpsilon = "dfa alphabet a b states q init q final q\n";

Outcome engine(const std::vector<Dfa> &dfas) {
  const GenResult g = genIntersection(dfas);
  return checkReach(g.program, g.kHint, g.target).outcome;
}

} // namespace

TEST_CASE("gen_bakery") {
  const GenResult g = genBakery(2);
  for (const char *x : {"ticket_1", "ticket_2", "chosen_1", "chosen_2"})
    CHECK(g.program.findVar(x).has_value());
  CHECK(g.program.numThreads() == 3);
  CHECK(g.kHint == 4);
  CHECK(validate(g.program).empty());
  CHECK(parseProgram(renderProgram(g.program)) == g.program);

  SUBCASE("one thread cannot violate mutual exclusion") {
    const GenResult one = genBakery(1);
    for (std::size_t k = 1; k <= 3; ++k)
      CHECK(checkReach(one.program, k, one.target).outcome == Outcome::NotReachable);
    const auto p1 = *one.program.findThread("p1");
    const auto crit = one.program.findState(p1, "crit");
    REQUIRE(crit.has_value());
    CHECK(checkReach(one.program, 1, {p1, *crit}).reachable());
  }
}

TEST_CASE("gen_intersection") {
  const Dfa endsA = parseDfa(kEndsInA), even = parseDfa(kEven);
  const Dfa empty = parseDfa(kEmpty), eps = parseDfa(kEpsilon);

  CHECK(genIntersection({endsA}).kHint == 1);
  CHECK(dfaIntersectionOracle({endsA, even}));
  CHECK(engine({endsA, even}) == Outcome::Reachable);
  CHECK_FALSE(dfaIntersectionOracle({endsA, empty}));
  CHECK(engine({endsA, empty}) == Outcome::NotReachable);
  CHECK(dfaIntersectionOracle({eps}));

  const GenResult g = genIntersection({eps});
  const Verdict v = checkReach(g.program, 1, g.target);
  REQUIRE(v.reachable());
  // no letter gadget: only the init sequence and the final check
  for (const auto &s : v.witness->steps)
    CHECK(g.program.threads[0].transitions[s.label.transition].op.kind != OpKind::Read);

  Dfa other = endsA;
  other.alphabet = {"a", "c"};
  CHECK_THROWS_AS(genIntersection({endsA, other}), ModelError);
}

TEST_CASE("gen_dlcs_reduction") {
  const DlcsModel sendRecv = parseDlcs("dlcs states q0 q1 q2 vars x y alphabet a init q0\n"
                                       "q0 -> q0 : x := *\nq0 -> q1 : send a x\n"
                                       "q1 -> q2 : recv a y\ntarget q2\n");
  const GenResult g = genDlcsReduction(sendRecv);
  CHECK(g.program.numVars() == 2 * sendRecv.alphabet.size());
  CHECK(g.program.numThreads() == 2);
  CHECK(validate(g.program).empty());
  CHECK(parseProgram(renderProgram(g.program)) == g.program);

  DlcsBounds db;
  CHECK(dlcsReachBounded(sendRecv, *sendRecv.target, db).reachable());
  Bounds tb;
  tb.bufferBound = 4;
  tb.domainBound = 2;
  CHECK(tsoReachBounded(g.program, g.target, tb).reachable());

  const DlcsModel never = parseDlcs("dlcs states q0 q1 vars x alphabet a b init q0\n"
                                    "q0 -> q0 : send a x\nq0 -> q1 : recv b x\ntarget q1\n");
  CHECK(dlcsReachBounded(never, *never.target, db).outcome == Outcome::NotReachable);
  const GenResult gn = genDlcsReduction(never);
  CHECK(gn.program.numVars() == 4);
  CHECK(tsoReachBounded(gn.program, gn.target, tb).outcome == Outcome::NotReachable);
}

TEST_CASE("dlcs_reach_bounded") {
  const DlcsModel m = parseDlcs("dlcs states q0 q1 q2 q3 vars x y alphabet a init q0\n"
                                "q0 -> q0 : x := *\nq0 -> q1 : send a x\n"
                                "q1 -> q2 : recv a y\nq2 -> q3 : assume x = y\ntarget q3\n");
  DlcsBounds b;
  const DlcsVerdict init = dlcsReachBounded(m, m.init, b);
  REQUIRE(init.reachable());
  CHECK(init.witness->empty());
  const DlcsVerdict v = dlcsReachBounded(m, *m.target, b);
  REQUIRE(v.reachable());
  CHECK(v.stats.statesExplored <= 20);
}
