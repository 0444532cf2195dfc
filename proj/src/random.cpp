#include "tsocb/random.hpp"

#include "tsocb/dsl.hpp"

#include <algorithm>

namespace tsocb {

namespace {

std::size_t pick(Rng &rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

} // namespace

Program randomProgram(Rng &rng, const RandomProgramShape &shape) {
  ProgramBuilder b;
  const std::size_t nv = pick(rng, 1, std::max<std::size_t>(1, shape.maxVars));
  std::vector<VarId> vars;
  for (std::size_t x = 0; x < nv; ++x)
    vars.push_back(b.var("x" + std::to_string(x)));

  for (std::size_t t = 0; t < shape.threads; ++t) {
    const std::string tn = "t" + std::to_string(t);
    const ThreadId tid = b.thread(tn, "q0");
    std::vector<RegId> regs;
    const std::size_t nr = pick(rng, 1, std::max<std::size_t>(1, shape.maxRegs));
    for (std::size_t r = 0; r < nr; ++r)
      regs.push_back(b.reg(tid, "r" + std::to_string(t) + "_" + std::to_string(r)));
    const std::size_t ns = pick(rng, 1, std::max<std::size_t>(1, shape.maxStates));
    const std::size_t nt = pick(rng, 1, std::max<std::size_t>(1, shape.maxTransitions));
    auto reg = [&]() { return regs[pick(rng, 0, regs.size() - 1)]; };
    auto var = [&]() { return vars[pick(rng, 0, vars.size() - 1)]; };
    for (std::size_t i = 0; i < nt; ++i) {
      const std::string from = "q" + std::to_string(pick(rng, 0, ns - 1));
      const std::string to = "q" + std::to_string(pick(rng, 0, ns - 1));
      Op op;
      switch (pick(rng, 0, shape.allowArw ? 9 : 8)) {
      case 0:
        op = Op::assign(reg(), reg());
        break;
      case 1:
      case 2:
        op = Op::newValue(reg());
        break;
      case 3:
      case 4:
        op = Op::guard(shape.relations[pick(rng, 0, shape.relations.size() - 1)], reg(), reg());
        break;
      case 5:
      case 6:
        op = Op::read(var(), reg());
        break;
      case 7:
      case 8:
        op = Op::write(var(), reg());
        break;
      default: {
        const RegId a = reg();
        op = Op::arw(var(), a, reg());
        break;
      }
      }
      b.add(tid, from, op, to);
    }
  }

  // the DSL round trip drops states that no transition mentions
  Program p = parseProgram(renderProgram(b.build()));
  const auto t = static_cast<ThreadId>(pick(rng, 0, p.numThreads() - 1));
  const auto &th = p.threads[t];
  StateId s = th.init;
  if (th.states.size() > 1)
    while (s == th.init)
      s = static_cast<StateId>(pick(rng, 0, th.states.size() - 1));
  p.target = Target{t, s};
  return p;
}

Dfa randomDfa(Rng &rng, std::size_t maxStates, const std::vector<std::string> &alphabet) {
  Dfa d;
  d.alphabet = alphabet;
  const std::size_t ns = pick(rng, 1, std::max<std::size_t>(1, maxStates));
  for (std::size_t q = 0; q < ns; ++q)
    d.states.push_back("q" + std::to_string(q));
  d.init = 0;
  for (std::uint32_t q = 0; q < ns; ++q) {
    if (pick(rng, 0, 1) == 0)
      d.finals.push_back(q);
    for (std::uint32_t a = 0; a < alphabet.size(); ++a)
      if (pick(rng, 0, 4) != 0)
        d.transitions.push_back({q, a, static_cast<std::uint32_t>(pick(rng, 0, ns - 1))});
  }
  return d;
}

ConcreteRun randomAbRun(const AbMachine &m, Rng &rng, std::size_t steps, Value domain) {
  const auto acts = m.allActs();
  ConcreteRun run;
  run.initial = m.initialConfig(acts[pick(rng, 0, acts.size() - 1)]);
  for (std::size_t i = 0; i < steps; ++i) {
    const AbConfig &cur = run.last();
    auto trs = m.transitions(cur.state);
    std::shuffle(trs.begin(), trs.end(), rng);
    bool moved = false;
    for (const auto &tr : trs) {
      const bool needsValue = std::any_of(tr.effects.begin(), tr.effects.end(), [](const auto &e) {
        return std::holds_alternative<FreshVar>(e);
      });
      std::optional<Value> fresh;
      if (needsValue)
        fresh = static_cast<Value>(pick(rng, 0, domain));
      AbConfig next{tr.next, cur.mem};
      try {
        applyEffects(next.mem, tr.effects, fresh);
      } catch (const GuardFailed &) {
        continue;
      }
      run.steps.push_back({tr.label, fresh, std::move(next)});
      moved = true;
      break;
    }
    if (!moved)
      break;
  }
  return run;
}

Run randomCbRun(const Program &p, std::size_t k, Rng &rng, std::size_t steps, const Bounds &b) {
  Run run;
  run.initial = TsoConfig::initial(p);
  std::size_t contexts = 0;
  std::optional<ThreadId> active;
  for (std::size_t i = 0; i < steps; ++i) {
    auto labels = tsoEnabled(p, run.last(), b);
    std::vector<Label> allowed;
    for (const auto &l : labels)
      if ((active && *active == l.thread) || contexts < k)
        allowed.push_back(l);
    if (allowed.empty())
      break;
    const Label l = allowed[pick(rng, 0, allowed.size() - 1)];
    if (!active || *active != l.thread) {
      ++contexts;
      active = l.thread;
    }
    run.steps.push_back({l, tsoStep(p, run.last(), l)});
  }
  return run;
}

} // namespace tsocb
