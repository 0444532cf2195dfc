#include "tsocb/ab_machine.hpp"

#include <algorithm>
#include <deque>
#include <sstream>
#include <unordered_map>

namespace tsocb {

AbLayout::AbLayout(const Program &p, std::size_t k)
    : prog_(&p), k_(k), vars_(p.numVars()), regs_(p.numRegs()), threads_(p.numThreads()),
      sentinel_(static_cast<AbVar>(vars_ + regs_ + vars_ * k + vars_ * threads_)) {}

AbVarKind AbLayout::kind(AbVar v) const {
  if (v < vars_)
    return AbVarKind::Shared;
  if (v < vars_ + regs_)
    return AbVarKind::Reg;
  if (v < vars_ + regs_ + vars_ * k_)
    return AbVarKind::PerContext;
  if (v < sentinel_)
    return AbVarKind::PerThread;
  return AbVarKind::Sentinel;
}

std::string AbLayout::name(AbVar v) const {
  switch (kind(v)) {
  case AbVarKind::Shared:
    return prog_->vars[v];
  case AbVarKind::Reg:
    return prog_->regNames[v - vars_];
  case AbVarKind::PerContext: {
    const std::size_t off = v - vars_ - regs_;
    return prog_->vars[off / k_] + "@" + std::to_string(off % k_ + 1);
  }
  case AbVarKind::PerThread: {
    const std::size_t off = v - vars_ - regs_ - vars_ * k_;
    return prog_->vars[off / threads_] + "#" + prog_->threads[off % threads_].name;
  }
  case AbVarKind::Sentinel:
    return "x0";
  }
  return "?";
}

std::string describe(const AbLayout &layout, const AbEffect &e) {
  struct Printer {
    const AbLayout &l;
    std::string operator()(const CopyVar &c) const { return l.name(c.dst) + " := " + l.name(c.src); }
    std::string operator()(const FreshVar &f) const { return l.name(f.dst) + " := *"; }
    std::string operator()(const GuardRel &g) const {
      return "assume " + l.name(g.a) + " " + toString(g.rel) + " " + l.name(g.b);
    }
    std::string operator()(const MultiCopy &m) const {
      std::string s = "{";
      for (std::size_t i = 0; i < m.copies.size(); ++i)
        s += (i ? ", " : "") + (*this)(m.copies[i]);
      return s + "}";
    }
  };
  return std::visit(Printer{layout}, e);
}

std::string toString(AbRule r) {
  switch (r) {
  case AbRule::Local:
    return "local";
  case AbRule::BufferRead:
    return "buffer-read";
  case AbRule::MemoryRead:
    return "memory-read";
  case AbRule::Write:
    return "write";
  case AbRule::ContextSwitch:
    return "context-switch";
  case AbRule::BufferArw:
    return "buffer-arw";
  case AbRule::MemoryArw:
    return "memory-arw";
  }
  return "?";
}

AbMachine::AbMachine(const Program &p, std::size_t k) : prog_(&p), k_(k), layout_(p, k) {
  if (k < 1)
    throw ModelError("context bound must be at least 1");
  if (k > 255)
    throw ModelError("context bound too large");
}

AbState AbMachine::initial(const std::vector<ThreadId> &act) const {
  if (act.size() != k_)
    throw ModelError("act must assign a thread to each of the k contexts");
  for (auto t : act)
    if (t >= prog_->numThreads())
      throw ModelError("act names an unknown thread");
  AbState s;
  for (const auto &t : prog_->threads)
    s.st.push_back(t.init);
  s.act = act;
  s.j = 1;
  s.c.assign(prog_->numVars() * prog_->numThreads(), 0);
  s.u.assign(k_ * prog_->numVars(), 0);
  return s;
}

AbConfig AbMachine::initialConfig(const std::vector<ThreadId> &act) const {
  return {initial(act), std::vector<Value>(layout_.size(), 0)};
}

std::vector<std::vector<ThreadId>> AbMachine::allActs() const {
  std::vector<std::vector<ThreadId>> out;
  const auto nt = static_cast<ThreadId>(prog_->numThreads());
  if (nt == 0)
    return out;
  std::vector<ThreadId> act(k_, 0);
  while (true) {
    out.push_back(act);
    std::size_t i = k_;
    while (i > 0 && act[i - 1] + 1 == nt) {
      act[i - 1] = 0;
      --i;
    }
    if (i == 0)
      break;
    ++act[i - 1];
  }
  return out;
}

std::uint32_t AbMachine::maxPending(const AbState &s, ThreadId t) const {
  std::uint32_t m = 0;
  for (VarId x = 0; x < prog_->numVars(); ++x)
    m = std::max<std::uint32_t>(m, pending(s, x, t));
  return m;
}

std::vector<AbTransition> AbMachine::transitions(const AbState &s) const {
  std::vector<AbTransition> out;
  const ThreadId t = s.act[s.j - 1];
  const auto &L = layout_;
  const auto nt = prog_->numThreads();
  const auto &trs = prog_->threads[t].transitions;

  for (std::size_t i = 0; i < trs.size(); ++i) {
    const auto &tr = trs[i];
    if (tr.from != s.st[t])
      continue;
    const Op &op = tr.op;
    AbState next = s;
    next.st[t] = tr.to;
    AbLabel label{AbRule::Local, t, i, 0};
    const std::uint8_t cx = op.usesVar() ? pending(s, op.var, t) : 0;
    const bool inBuffer = cx != 0 && cx >= s.j;

    switch (op.kind) {
    case OpKind::Assign:
      out.push_back({label, {CopyVar{L.reg(op.r1), L.reg(op.r2)}}, std::move(next)});
      break;
    case OpKind::NewValue:
      out.push_back({label, {FreshVar{L.reg(op.r1)}}, std::move(next)});
      break;
    case OpKind::Guard:
      out.push_back({label, {GuardRel{op.rel, L.reg(op.r1), L.reg(op.r2)}}, std::move(next)});
      break;
    case OpKind::Read:
      label.rule = inBuffer ? AbRule::BufferRead : AbRule::MemoryRead;
      out.push_back({label,
                     {CopyVar{L.reg(op.r1), inBuffer ? L.perThread(op.var, t) : L.shared(op.var)}},
                     std::move(next)});
      break;
    case OpKind::Write: {
      const std::uint32_t lo = std::max(s.j, maxPending(s, t));
      for (std::uint32_t jp = lo; jp <= k_; ++jp) {
        if (s.act[jp - 1] != t)
          continue;
        AbState w = next;
        w.c[op.var * nt + t] = static_cast<std::uint8_t>(jp);
        w.u[(jp - 1) * prog_->numVars() + op.var] = 1;
        out.push_back({AbLabel{AbRule::Write, t, i, jp},
                       {CopyVar{L.perThread(op.var, t), L.reg(op.r1)},
                        CopyVar{L.perContext(op.var, jp), L.reg(op.r1)}},
                       std::move(w)});
      }
      break;
    }
    case OpKind::Arw: {
      if (s.j < maxPending(s, t))
        break;
      if (cx == s.j) {
        label.rule = AbRule::BufferArw;
        out.push_back({label,
                       {GuardRel{Relation::eq(), L.reg(op.r1), L.perThread(op.var, t)},
                        CopyVar{L.perThread(op.var, t), L.reg(op.r2)},
                        CopyVar{L.perContext(op.var, s.j), L.reg(op.r2)}},
                       std::move(next)});
      } else {
        label.rule = AbRule::MemoryArw;
        out.push_back({label,
                       {GuardRel{Relation::eq(), L.reg(op.r1), L.shared(op.var)},
                        CopyVar{L.shared(op.var), L.reg(op.r2)}},
                       std::move(next)});
      }
      break;
    }
    }
  }

  if (s.j < k_) {
    MultiCopy flush;
    for (VarId x = 0; x < prog_->numVars(); ++x)
      if (flushes(s, s.j, x))
        flush.copies.push_back({L.shared(x), L.perContext(x, s.j)});
    AbState next = s;
    next.j = s.j + 1;
    out.push_back({AbLabel{AbRule::ContextSwitch, t, 0, 0}, {std::move(flush)}, std::move(next)});
  }

  std::stable_sort(out.begin(), out.end(),
                   [](const AbTransition &a, const AbTransition &b) { return a.label < b.label; });
  return out;
}

std::string AbMachine::describe(const AbLabel &l) const {
  const auto &th = prog_->threads.at(l.thread);
  if (l.rule == AbRule::ContextSwitch)
    return th.name + ": context-switch";
  const auto &tr = th.transitions.at(l.transition);
  std::string s = th.name + ": " + th.states[tr.from] + " -> " + th.states[tr.to] + " : " +
                  prog_->describe(l.thread, tr.op) + " [" + toString(l.rule);
  if (l.rule == AbRule::Write)
    s += " @" + std::to_string(l.writeContext);
  return s + "]";
}

void applyEffects(std::vector<Value> &mem, const std::vector<AbEffect> &effects,
                  std::optional<Value> fresh) {
  for (const auto &e : effects) {
    if (const auto *c = std::get_if<CopyVar>(&e)) {
      mem[c->dst] = mem[c->src];
    } else if (const auto *f = std::get_if<FreshVar>(&e)) {
      if (!fresh)
        throw ModelError("fresh value required");
      mem[f->dst] = *fresh;
    } else if (const auto *g = std::get_if<GuardRel>(&e)) {
      if (!evalRel(g->rel, mem[g->a], mem[g->b]))
        throw GuardFailed("guard failed");
    } else if (const auto *m = std::get_if<MultiCopy>(&e)) {
      std::vector<Value> vals;
      vals.reserve(m->copies.size());
      for (const auto &c : m->copies)
        vals.push_back(mem[c.src]);
      for (std::size_t i = 0; i < vals.size(); ++i)
        mem[m->copies[i].dst] = vals[i];
    }
  }
}

AbConfig AbMachine::concreteStep(const AbConfig &from, const AbLabel &label,
                                 std::optional<Value> fresh) const {
  for (auto &tr : transitions(from.state)) {
    if (tr.label != label)
      continue;
    AbConfig next{std::move(tr.next), from.mem};
    applyEffects(next.mem, tr.effects, fresh);
    return next;
  }
  throw ModelError("label not enabled: " + describe(label));
}

namespace {

inline void hashMix(std::size_t &seed, std::size_t v) {
  seed ^= v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2);
}

struct AbConfigHash {
  std::size_t operator()(const AbConfig &c) const {
    std::size_t h = c.state.j;
    for (auto v : c.state.st)
      hashMix(h, v);
    for (auto v : c.state.act)
      hashMix(h, v);
    for (auto v : c.state.c)
      hashMix(h, v);
    for (auto v : c.state.u)
      hashMix(h, v);
    for (auto v : c.mem)
      hashMix(h, v);
    return h;
  }
};

bool hasFresh(const std::vector<AbEffect> &effects) {
  return std::any_of(effects.begin(), effects.end(),
                     [](const AbEffect &e) { return std::holds_alternative<FreshVar>(e); });
}

} // namespace

AbSearchResult abConcreteReach(const AbMachine &m, const Target &target, Value domainBound,
                               std::size_t depth, std::size_t maxStates) {
  struct Node {
    AbConfig config;
    std::size_t parent;
    AbLabel label;
    std::optional<Value> fresh;
    std::size_t depth;
  };
  AbSearchResult res;
  std::vector<Node> nodes;
  std::unordered_map<AbConfig, std::size_t, AbConfigHash> seen;
  constexpr std::size_t kRoot = static_cast<std::size_t>(-1);

  auto hit = [&](const AbConfig &c) { return c.state.st[target.thread] == target.state; };
  auto witness = [&](std::size_t idx) {
    std::vector<std::size_t> path;
    for (std::size_t i = idx; nodes[i].parent != kRoot; i = nodes[i].parent)
      path.push_back(i);
    std::size_t root = path.empty() ? idx : nodes[path.back()].parent;
    ConcreteRun run;
    run.initial = nodes[root].config;
    for (auto it = path.rbegin(); it != path.rend(); ++it)
      run.steps.push_back({nodes[*it].label, nodes[*it].fresh, nodes[*it].config});
    return run;
  };

  for (const auto &act : m.allActs()) {
    AbConfig init = m.initialConfig(act);
    if (seen.count(init))
      continue;
    seen.emplace(init, nodes.size());
    nodes.push_back({std::move(init), kRoot, AbLabel{}, std::nullopt, 0});
    if (hit(nodes.back().config)) {
      res.outcome = Outcome::Reachable;
      res.witness = witness(nodes.size() - 1);
      res.statesExplored = nodes.size();
      return res;
    }
  }

  for (std::size_t head = 0; head < nodes.size(); ++head) {
    if (nodes[head].depth >= depth)
      continue;
    const AbConfig from = nodes[head].config;
    const std::size_t d = nodes[head].depth + 1;
    for (const auto &tr : m.transitions(from.state)) {
      const bool needsValue = hasFresh(tr.effects);
      const Value hi = needsValue ? domainBound : 0;
      for (Value v = 0; v <= hi; ++v) {
        AbConfig next{tr.next, from.mem};
        const std::optional<Value> fresh = needsValue ? std::optional<Value>(v) : std::nullopt;
        try {
          applyEffects(next.mem, tr.effects, fresh);
        } catch (const GuardFailed &) {
          continue;
        }
        if (seen.count(next))
          continue;
        if (nodes.size() >= maxStates) {
          res.outcome = Outcome::BoundExhausted;
          res.statesExplored = nodes.size();
          return res;
        }
        seen.emplace(next, nodes.size());
        nodes.push_back({std::move(next), head, tr.label, fresh, d});
        if (hit(nodes.back().config)) {
          res.outcome = Outcome::Reachable;
          res.witness = witness(nodes.size() - 1);
          res.statesExplored = nodes.size();
          return res;
        }
      }
    }
  }
  res.outcome = Outcome::NotReachable;
  res.statesExplored = nodes.size();
  return res;
}

Run abRunToTso(const AbMachine &m, const ConcreteRun &run) {
  const Program &p = m.program();
  Run out;
  out.initial = TsoConfig::initial(p);
  // flush context of every entry currently in each TSO buffer
  std::vector<std::deque<std::uint32_t>> tags(p.numThreads());
  const auto &act = run.initial.state.act;
  std::uint32_t j = 1;

  auto push = [&](const Label &l) { out.steps.push_back({l, tsoStep(p, out.last(), l)}); };
  auto flushWhile = [&](ThreadId t, auto pred) {
    while (!tags[t].empty() && pred(tags[t].front())) {
      push(Label::update(t));
      tags[t].pop_front();
    }
  };

  for (const auto &step : run.steps) {
    const AbLabel &l = step.label;
    switch (l.rule) {
    case AbRule::ContextSwitch:
      flushWhile(act[j - 1], [&](std::uint32_t tag) { return tag == j; });
      ++j;
      break;
    case AbRule::Write:
      push(Label::op(l.thread, l.transition));
      tags[l.thread].push_back(l.writeContext);
      break;
    case AbRule::BufferArw:
    case AbRule::MemoryArw:
      flushWhile(l.thread, [](std::uint32_t) { return true; });
      push(Label::op(l.thread, l.transition));
      break;
    default:
      push(Label::op(l.thread, l.transition, step.fresh.value_or(0)));
      break;
    }
  }
  return out;
}

} // namespace tsocb
