#include "tsocb/ab_machine.hpp"
#include "tsocb/dsl.hpp"
#include "tsocb/random.hpp"
#include "tsocb/rel.hpp"

#include <doctest.h>

#include <algorithm>
#include <set>

using namespace tsocb;

namespace {

const char *kWriter = R"(domain nat
vars x
thread t {
  regs r s
  init q0
  q0 -> q1 : write x r
  q1 -> q2 : read x s
}
thread u {
  regs v
  init p0
}
)";

std::vector<AbTransition> byRule(const std::vector<AbTransition> &ts, AbRule rule) {
  std::vector<AbTransition> out;
  for (const auto &t : ts)
    if (t.label.rule == rule)
      out.push_back(t);
  return out;
}

} // namespace

TEST_CASE("ab_initial") {
  const Program p = parseProgram(kWriter);
  SUBCASE("one context, one act") {
    const Program single = parseProgram("domain nat\nthread t { regs r init q0 }");
    const AbMachine m(single, 1);
    CHECK(m.allActs() == std::vector<std::vector<ThreadId>>{{0}});
    CHECK(m.initial({0}).j == 1);
  }
  SUBCASE("stored act") {
    const AbMachine m(p, 3);
    const AbState s = m.initial({0, 1, 0});
    CHECK(s.act == std::vector<ThreadId>{0, 1, 0});
    CHECK(std::all_of(s.c.begin(), s.c.end(), [](auto v) { return v == 0; }));
    CHECK(std::all_of(s.u.begin(), s.u.end(), [](auto v) { return v == 0; }));
  }
  SUBCASE("|T|^k initial states") {
    for (std::size_t k = 1; k <= 4; ++k) {
      const AbMachine m(p, k);
      std::set<std::vector<ThreadId>> acts;
      for (const auto &a : m.allActs())
        acts.insert(m.initial(a).act);
      std::size_t expect = 1;
      for (std::size_t i = 0; i < k; ++i)
        expect *= 2;
      CHECK(acts.size() == expect);
    }
  }
}

TEST_CASE("ab_transitions") {
  const Program p = parseProgram(kWriter);
  const AbMachine m(p, 2);
  AbState s = m.initial({0, 0});

  SUBCASE("write picks a current or future context of the thread") {
    const auto writes = byRule(m.transitions(s), AbRule::Write);
    REQUIRE(writes.size() == 2);
    CHECK(writes[0].label.writeContext == 1);
    CHECK(writes[1].label.writeContext == 2);
  }
  SUBCASE("no pending write: memory read only") {
    s.st[0] = 1;
    const auto ts = m.transitions(s);
    CHECK(byRule(ts, AbRule::MemoryRead).size() == 1);
    CHECK(byRule(ts, AbRule::BufferRead).empty());
  }
  SUBCASE("pending write: buffer read only") {
    s.st[0] = 1;
    s.c[0] = 2;
    const auto ts = m.transitions(s);
    CHECK(byRule(ts, AbRule::BufferRead).size() == 1);
    CHECK(byRule(ts, AbRule::MemoryRead).empty());
  }
  SUBCASE("no switch out of the last context") {
    CHECK(byRule(m.transitions(s), AbRule::ContextSwitch).size() == 1);
    s.j = 2;
    CHECK(byRule(m.transitions(s), AbRule::ContextSwitch).empty());
  }
}

TEST_CASE("ab_concrete_step") {
  const Program p = parseProgram(kWriter);
  const AbMachine m(p, 2);
  const AbLayout &lay = m.layout();

  SUBCASE("context switch publishes the flushed write") {
    AbConfig c = m.initialConfig({0, 1});
    c.state.u[0] = 1;
    c.mem[lay.perContext(0, 1)] = 7;
    const AbConfig n = m.concreteStep(c, {AbRule::ContextSwitch, 0, 0, 0});
    CHECK(n.mem[lay.shared(0)] == 7);
    CHECK(n.state.j == 2);
  }
  SUBCASE("gap guard") {
    std::vector<Value> mem{3, 4, 0};
    CHECK_THROWS_AS(applyEffects(mem, {GuardRel{Relation::lt(1), 0, 1}}, std::nullopt), GuardFailed);
    mem[1] = 5;
    CHECK_NOTHROW(applyEffects(mem, {GuardRel{Relation::lt(1), 0, 1}}, std::nullopt));
  }
  SUBCASE("buffer arw compares against the pending write") {
    const Program q = parseProgram("domain nat\nvars x\nthread t { regs a b init q0\n"
                                   "q0 -> q1 : write x b\nq1 -> q2 : arw x a b }");
    const AbMachine mq(q, 1);
    AbConfig c = mq.initialConfig({0});
    c.mem[mq.layout().reg(1)] = 2;
    c = mq.concreteStep(c, {AbRule::Write, 0, 0, 1});
    const AbLabel arw{AbRule::BufferArw, 0, 1, 0};
    CHECK_THROWS_AS(mq.concreteStep(c, arw), GuardFailed);
    c.mem[mq.layout().reg(0)] = 2;
    CHECK(mq.concreteStep(c, arw).state.st[0] == 2);
  }
}

TEST_CASE("rel_initial and abstract_of") {
  const Program p = parseProgram(kWriter);
  const AbLayout lay(p, 2);
  const RelState init = relInitial(lay);
  CHECK(init.maxRank() == 0);
  CHECK(abstractOf(std::vector<Value>(lay.size(), 0)) == init);
  CHECK(abstractOf({0, 0}).rank == std::vector<std::uint16_t>{0, 0});
  CHECK(abstractOf({3, 7, 3}).rank == std::vector<std::uint16_t>{0, 1, 0});
  CHECK(abstractOf({1, 2, 5}).rank == std::vector<std::uint16_t>{0, 1, 2});
}

TEST_CASE("rel_check softening") {
  const RelState s{{0, 1}};
  CHECK(relCheck(s, Relation::lt(4), 0, 1));
  CHECK(relCheck(s, Relation::le(), 0, 0));
  const RelState eq{{0, 0}};
  CHECK_FALSE(relCheck(eq, Relation::le(1), 0, 1));
  CHECK(relCheck(eq, Relation::le(), 0, 1));
  CHECK_FALSE(relCheck(eq, Relation::lt(), 0, 1));
}

TEST_CASE("rel_apply") {
  SUBCASE("fresh value placements") {
    // variables: d, a, sentinel
    const RelState s{{0, 1, 0}};
    const auto succ = relApply(s, FreshVar{0}, 2);
    std::set<RelState> distinct(succ.begin(), succ.end());
    CHECK(succ.size() == 4);
    CHECK(distinct.size() == 4);
    for (const auto &n : succ) {
      CHECK(n.rank[2] == 0);
      CHECK(n.rank[1] > n.rank[2]);
    }
  }
  SUBCASE("fresh value never goes below the sentinel") {
    const RelState s{{1, 0, 0}};
    for (const auto &n : relApply(s, FreshVar{0}, 2))
      CHECK(n.rank[0] >= n.rank[2]);
  }
  SUBCASE("copy out of the top class re-densifies") {
    const RelState s{{2, 1, 0}};
    const auto succ = relApply(s, CopyVar{0, 2}, 2);
    REQUIRE(succ.size() == 1);
    CHECK(succ[0].rank == std::vector<std::uint16_t>{0, 1, 0});
  }
  SUBCASE("failing guard") {
    CHECK(relApply(RelState{{0, 1, 0}}, GuardRel{Relation::eq(), 0, 1}, 2).empty());
    CHECK(relApply(RelState{{0, 1, 0}}, GuardRel{Relation::lt(), 0, 1}, 2).size() == 1);
  }
  SUBCASE("simultaneous copy") {
    const RelState s{{0, 1, 0}};
    const auto succ = relApply(s, MultiCopy{{{0, 1}, {1, 0}}}, 2);
    REQUIRE(succ.size() == 1);
    CHECK(succ[0].rank == std::vector<std::uint16_t>{1, 0, 0});
  }
}

TEST_CASE("rank states encode a total preorder") {
  Rng rng(17);
  for (int i = 0; i < 300; ++i) {
    std::vector<Value> mem(6);
    for (auto &v : mem)
      v = std::uniform_int_distribution<Value>(0, 4)(rng);
    mem.back() = 0;
    const RelState s = abstractOf(mem);
    std::set<std::uint16_t> image(s.rank.begin(), s.rank.end());
    CHECK(image.size() == s.numClasses());
    CHECK(*image.rbegin() == s.maxRank());
    for (AbVar a = 0; a < mem.size(); ++a)
      for (AbVar b = 0; b < mem.size(); ++b) {
        CHECK(relCheck(s, Relation::eq(), a, b) != relCheck(s, Relation::neq(), a, b));
        CHECK((relCheck(s, Relation::lt(), a, b) || relCheck(s, Relation::lt(), b, a) ||
               relCheck(s, Relation::eq(), a, b)));
        for (AbVar c = 0; c < mem.size(); ++c)
          if (relCheck(s, Relation::lt(), a, b) && relCheck(s, Relation::lt(), b, c))
            CHECK(relCheck(s, Relation::lt(), a, c));
      }
    for (const auto &n : relApply(s, FreshVar{0}, 5)) {
      std::set<std::uint16_t> img(n.rank.begin(), n.rank.end());
      CHECK(img.size() == n.numClasses());
      CHECK(n.rank[5] == 0);
    }
  }
}

TEST_CASE("canonical_key") {
  const Program p = parseProgram(kWriter);
  const AbMachine m(p, 2);
  const SearchState a{m.initial({0, 1}), relInitial(m.layout())};
  SearchState b = a;
  CHECK(canonicalKey(a) == canonicalKey(b));
  b.rel.rank[0] = 1;
  CHECK(canonicalKey(a) != canonicalKey(b));
  for (bool narrow : {false, true}) {
    const std::size_t len = canonicalKeyLength(p.numThreads(), p.numVars(), p.numRegs(), 2, narrow);
    CHECK(canonicalKey(a, narrow).size() == len);
    CHECK(canonicalKey(b, narrow).size() == len);
  }
}
