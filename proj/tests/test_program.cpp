#include "tsocb/dsl.hpp"
#include "tsocb/program.hpp"

#include <doctest.h>

using namespace tsocb;

namespace {

Program twoThreads() {
  ProgramBuilder b;
  const VarId x = b.var("x");
  const ThreadId t1 = b.thread("t1", "q0");
  const RegId r1 = b.reg(t1, "r1");
  b.add(t1, "q0", Op::write(x, r1), "q1");
  const ThreadId t2 = b.thread("t2", "p0");
  const RegId r2 = b.reg(t2, "r2");
  b.add(t2, "p0", Op::read(x, r2), "p1");
  return b.build();
}

std::vector<std::string> codes(const Program &p) {
  std::vector<std::string> out;
  for (const auto &d : validate(p))
    out.push_back(d.code);
  return out;
}

} // namespace

TEST_CASE("eval_rel") {
  CHECK(evalRel(Relation::lt(2), 1, 4));
  CHECK(evalRel(Relation::eq(), 0, 0));
  CHECK(evalRel(Relation::le(3), 2, 5));
  CHECK_FALSE(evalRel(Relation::lt(3), 2, 5));
  CHECK(evalRel(Relation::neq(), 1, 2));
  CHECK_FALSE(evalRel(Relation::neq(), 2, 2));
}

TEST_CASE("eval_rel: plain order and monotonicity in the gap") {
  for (Value a = 0; a < 8; ++a)
    for (Value b = 0; b < 8; ++b) {
      CHECK(evalRel(Relation::lt(), a, b) == (a < b));
      CHECK(evalRel(Relation::le(), a, b) == (a <= b));
      for (std::uint32_t n = 0; n < 5; ++n)
        for (std::uint32_t m = 0; m <= n; ++m) {
          if (evalRel(Relation::lt(n), a, b))
            CHECK(evalRel(Relation::lt(m), a, b));
          if (evalRel(Relation::le(n), a, b))
            CHECK(evalRel(Relation::le(m), a, b));
        }
    }
}

TEST_CASE("validate") {
  SUBCASE("well formed") { CHECK(validate(twoThreads()).empty()); }

  SUBCASE("shared register") {
    Program p = twoThreads();
    p.threads[1].regs.push_back(p.threads[0].regs[0]);
    CHECK(codes(p) == std::vector<std::string>{"disjoint-registers"});
  }

  SUBCASE("undeclared variable") {
    Program p = twoThreads();
    p.threads[0].transitions[0].op.var = 7;
    CHECK(codes(p) == std::vector<std::string>{"unknown-variable"});
  }

  SUBCASE("order independent") {
    Program p = twoThreads();
    p.threads[0].transitions[0].op.var = 7;
    p.threads[1].regs.push_back(p.threads[0].regs[0]);
    auto d1 = validate(p);
    std::swap(p.threads[0], p.threads[1]);
    CHECK(validate(p) == d1);
  }
}

TEST_CASE("n_max and order detection") {
  const Program p = parseProgram("domain nat\nthread t { regs a b init q0\n"
                                 "q0 -> q1 : assume a <2 b\nq1 -> q2 : assume a <=5 b }\n");
  CHECK(p.nMax() == 5);
  CHECK(p.usesOrder());
  CHECK_FALSE(twoThreads().usesOrder());
}
