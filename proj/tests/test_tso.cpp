#include "tsocb/dsl.hpp"
#include "tsocb/random.hpp"
#include "tsocb/suites.hpp"
#include "tsocb/tso.hpp"

#include <doctest.h>

#include <algorithm>

using namespace tsocb;

namespace {

bool has(const std::vector<Label> &ls, const Label &l) {
  return std::find(ls.begin(), ls.end(), l) != ls.end();
}

} // namespace

TEST_CASE("tso_enabled: reflexive guards from the initial configuration") {
  const Program p = parseProgram("domain nat\nthread t { regs r init q0\n"
                                 "q0 -> q1 : assume r = r\nq0 -> q2 : assume r = r }");
  const auto ls = tsoEnabled(p, TsoConfig::initial(p), {});
  CHECK(ls == std::vector<Label>{Label::op(0, 0), Label::op(0, 1)});
}

TEST_CASE("tso reads and arw against the store buffer") {
  const Program p = parseProgram("domain nat\nvars x\nthread t { regs r s init q0\n"
                                 "q0 -> q1 : read x r\nq0 -> q2 : arw x r s }");
  TsoConfig c = TsoConfig::initial(p);
  c.buf[0] = {{0, 1}};
  c.mem[0] = 9;
  const auto ls = tsoEnabled(p, c, {});
  CHECK(has(ls, Label::op(0, 0)));
  CHECK_FALSE(has(ls, Label::op(0, 1)));
  CHECK(has(ls, Label::update(0)));
  CHECK(tsoStep(p, c, Label::op(0, 0)).rval[0] == 1);
  CHECK_THROWS_AS(tsoStep(p, c, Label::op(0, 1)), ModelError);
}

TEST_CASE("tso_step") {
  const Program p = parseProgram("domain nat\nvars x y\nthread t { regs r s init q0\n"
                                 "q0 -> q1 : write x r\nq0 -> q2 : r := s }");
  SUBCASE("write appends") {
    TsoConfig c = TsoConfig::initial(p);
    c.rval[0] = 5;
    const TsoConfig n = tsoStep(p, c, Label::op(0, 0));
    CHECK(n.buf[0] == std::vector<BufferEntry>{{0, 5}});
    CHECK(n.mem == c.mem);
  }
  SUBCASE("update pops the oldest entry") {
    TsoConfig c = TsoConfig::initial(p);
    c.buf[0] = {{0, 1}, {1, 2}};
    const TsoConfig n = tsoStep(p, c, Label::update(0));
    CHECK(n.mem[0] == 1);
    CHECK(n.mem[1] == 0);
    CHECK(n.buf[0] == std::vector<BufferEntry>{{1, 2}});
  }
  SUBCASE("assign") {
    TsoConfig c = TsoConfig::initial(p);
    c.rval[1] = 4;
    TsoConfig n = tsoStep(p, c, Label::op(0, 1));
    CHECK(n.rval[0] == 4);
    n.rval[0] = c.rval[0];
    n.st = c.st;
    CHECK(n == c);
  }
  SUBCASE("buffer bound disables writes") {
    TsoConfig c = TsoConfig::initial(p);
    c.buf[0] = {{0, 0}, {0, 0}};
    CHECK_FALSE(has(tsoEnabled(p, c, {}), Label::op(0, 0)));
  }
}

TEST_CASE("tso_reach_bounded") {
  const Program mp = messagePassingLitmus();
  SUBCASE("initial state") {
    const auto v = tsoReachBounded(mp, {0, 0}, {});
    CHECK(v.reachable());
    CHECK(v.witness->steps.empty());
  }
  SUBCASE("message passing, buffer 1, domain 1") {
    Bounds b;
    b.bufferBound = 1;
    b.domainBound = 1;
    const auto v = tsoReachBounded(mp, *mp.target, b);
    CHECK(v.reachable());
    CHECK(v.witness->last().st[mp.target->thread] == mp.target->state);
  }
  SUBCASE("state without incoming transitions") {
    const Program p = parseProgram("domain nat\nthread t { regs r init q0\n"
                                   "q0 -> q1 : r := *\nlonely -> q0 : r := * }");
    const auto target = Target{0, *p.findState(0, "lonely")};
    CHECK(tsoReachBounded(p, target, {}).outcome == Outcome::NotReachable);
  }
}

TEST_CASE("cb_reach_bounded") {
  const Program mp = messagePassingLitmus();
  CHECK(cbReachBounded(mp, *mp.target, 1, {}).outcome == Outcome::NotReachable);
  const auto v2 = cbReachBounded(mp, *mp.target, 2, {});
  REQUIRE(v2.reachable());
  CHECK(cbPartitionCheck(*v2.witness, 2));

  SUBCASE("single thread: k=1 agrees with unrestricted TSO") {
    Rng rng(5);
    RandomProgramShape shape;
    shape.threads = 1;
    for (int i = 0; i < 50; ++i) {
      const Program p = randomProgram(rng, shape);
      CHECK(cbReachBounded(p, *p.target, 1, {}).outcome == tsoReachBounded(p, *p.target, {}).outcome);
    }
  }
}

TEST_CASE("cb_partition_check") {
  const Program p = parseProgram("domain nat\nthread t1 { regs a init q0\n q0 -> q0 : a := * }\n"
                                 "thread t2 { regs b init q0\n q0 -> q0 : b := * }");
  CHECK(cbPartitionCheck(replay(p, {}), 1));
  const Run alt = replay(p, {Label::op(0, 0), Label::op(1, 0), Label::op(0, 0)});
  CHECK_FALSE(cbPartitionCheck(alt, 2));
  CHECK(cbPartitionCheck(alt, 3));
  CHECK(cbPartitionCheck(replay(p, {Label::op(0, 0), Label::op(0, 0)}), 1));
}

TEST_CASE("normalize_updates") {
  const Program p = parseProgram("domain nat\nvars x y\nthread t { regs r init q0\n"
                                 "q0 -> q1 : write x r\nq1 -> q2 : read y r }");
  SUBCASE("update moves behind the read") {
    const Run run = replay(p, {Label::op(0, 0), Label::update(0), Label::op(0, 1)});
    const Run n = normalizeUpdates(p, run, 1);
    REQUIRE(n.steps.size() == 3);
    CHECK(n.steps[0].label == Label::op(0, 0));
    CHECK(n.steps[1].label == Label::op(0, 1));
    CHECK(n.steps[2].label == Label::update(0));
    CHECK(n.last() == run.last());
  }
  SUBCASE("already trailing") {
    const Run run = replay(p, {Label::op(0, 0), Label::op(0, 1), Label::update(0)});
    const Run n = normalizeUpdates(p, run, 1);
    REQUIRE(n.steps.size() == run.steps.size());
    for (std::size_t i = 0; i < n.steps.size(); ++i)
      CHECK(n.steps[i].label == run.steps[i].label);
  }
  SUBCASE("precondition") {
    const Run run = replay(p, {Label::op(0, 0), Label::op(0, 1)});
    CHECK_THROWS_AS(normalizeUpdates(p, run, 0), ModelError);
  }
}

TEST_CASE("updates follow the order of writes") {
  Rng rng(3);
  RandomProgramShape shape;
  shape.allowArw = false;
  for (int i = 0; i < 100; ++i) {
    const Program p = randomProgram(rng, shape);
    const Run run = randomCbRun(p, 3, rng, 30, {});
    std::vector<std::vector<BufferEntry>> issued(p.numThreads()), flushed(p.numThreads());
    TsoConfig prev = run.initial;
    for (const auto &s : run.steps) {
      const ThreadId t = s.label.thread;
      if (s.label.isUpdate())
        flushed[t].push_back(prev.buf[t].front());
      else if (p.threads[t].transitions[*s.label.transition].op.kind == OpKind::Write)
        issued[t].push_back(s.config.buf[t].back());
      prev = s.config;
    }
    for (std::size_t t = 0; t < p.numThreads(); ++t) {
      REQUIRE(flushed[t].size() <= issued[t].size());
      CHECK(std::equal(flushed[t].begin(), flushed[t].end(), issued[t].begin()));
    }
  }
}
