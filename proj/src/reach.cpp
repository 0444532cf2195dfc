#include "tsocb/reach.hpp"

#include <algorithm>
#include <chrono>
#include <limits>
#include <stdexcept>
#include <thread>
#include <unordered_map>

namespace tsocb {

StateReducer::StateReducer(const AbMachine &m, bool enabled, std::optional<ThreadId> observed)
    : m_(&m), enabled_(enabled), orderFree_(!m.program().usesOrder()), observed_(observed) {
  const Program &p = m.program();
  regOwner_ = p.regOwners();
  liveIn_.resize(p.numThreads());
  for (ThreadId t = 0; t < p.numThreads(); ++t) {
    const auto &th = p.threads[t];
    auto &live = liveIn_[t];
    live.assign(th.states.size(), std::vector<std::uint8_t>(p.numRegs(), 0));
    bool changed = true;
    while (changed) {
      changed = false;
      for (const auto &tr : th.transitions) {
        std::vector<std::uint8_t> in = live[tr.to];
        const Op &op = tr.op;
        switch (op.kind) {
        case OpKind::Assign:
          in[op.r1] = 0;
          in[op.r2] = 1;
          break;
        case OpKind::NewValue:
        case OpKind::Read:
          in[op.r1] = 0;
          break;
        case OpKind::Guard:
        case OpKind::Arw:
          in[op.r1] = 1;
          in[op.r2] = 1;
          break;
        case OpKind::Write:
          in[op.r1] = 1;
          break;
        }
        auto &cur = live[tr.from];
        for (std::size_t r = 0; r < in.size(); ++r)
          if (in[r] && !cur[r]) {
            cur[r] = 1;
            changed = true;
          }
      }
    }
  }
}

bool StateReducer::live(const AbState &s, AbVar v) const {
  const AbLayout &L = m_->layout();
  const Program &p = m_->program();
  switch (L.kind(v)) {
  case AbVarKind::Shared:
  case AbVarKind::Sentinel:
    return true;
  case AbVarKind::Reg: {
    const RegId r = v - static_cast<AbVar>(p.numVars());
    const ThreadId t = regOwner_[r];
    if (liveIn_[t][s.st[t]][r] == 0)
      return false;
    for (std::size_t j = s.j; j <= m_->k(); ++j)
      if (s.act[j - 1] == t)
        return true;
    return false;
  }
  case AbVarKind::PerContext: {
    const std::size_t off = v - p.numVars() - p.numRegs();
    const auto x = static_cast<VarId>(off / m_->k());
    const auto ctx = static_cast<std::uint32_t>(off % m_->k() + 1);
    return ctx >= s.j && m_->flushes(s, ctx, x);
  }
  case AbVarKind::PerThread: {
    const std::size_t off = v - p.numVars() - p.numRegs() - p.numVars() * m_->k();
    const auto x = static_cast<VarId>(off / p.numThreads());
    const auto t = static_cast<ThreadId>(off % p.numThreads());
    const auto c = m_->pending(s, x, t);
    return c != 0 && c >= s.j;
  }
  }
  return true;
}

RelState StateReducer::canonical(const AbState &s, RelState rel) const {
  if (!enabled_)
    return rel;
  const AbVar sentinel = m_->layout().sentinel();
  const auto floor = rel.rank[sentinel];
  for (AbVar v = 0; v < rel.rank.size(); ++v)
    if (!live(s, v))
      rel.rank[v] = floor;
  densify(rel.rank);
  if (orderFree_) {
    constexpr auto kUnset = std::numeric_limits<std::uint16_t>::max();
    std::vector<std::uint16_t> remap(rel.maxRank() + 1u, kUnset);
    std::uint16_t next = 0;
    remap[rel.rank[sentinel]] = next++;
    for (auto r : rel.rank)
      if (remap[r] == kUnset)
        remap[r] = next++;
    for (auto &r : rel.rank)
      r = remap[r];
  }
  return rel;
}

AbState StateReducer::control(AbState s) const {
  if (!enabled_)
    return s;
  const std::size_t vars = m_->program().numVars();
  for (std::uint32_t j = 1; j < s.j; ++j) {
    s.act[j - 1] = 0;
    std::fill_n(s.u.begin() + (j - 1) * vars, vars, 0);
  }
  for (auto &c : s.c)
    if (c < s.j)
      c = 0;
  for (ThreadId t = 0; t < s.st.size(); ++t) {
    if (observed_ && *observed_ == t)
      continue;
    if (std::find(s.act.begin() + (s.j - 1), s.act.end(), t) == s.act.end())
      s.st[t] = 0;
  }
  return s;
}

namespace {

using Clock = std::chrono::steady_clock;

std::uint32_t getWord(const std::string &k, std::size_t &pos, bool narrow) {
  const auto lo = static_cast<unsigned char>(k[pos]);
  if (narrow) {
    pos += 1;
    return lo;
  }
  const auto hi = static_cast<unsigned char>(k[pos + 1]);
  pos += 2;
  return lo | (hi << 8);
}

SearchState decodeKey(const AbMachine &m, const std::string &key, bool narrow) {
  const Program &p = m.program();
  SearchState s;
  std::size_t pos = 0;
  s.ab.st.resize(p.numThreads());
  for (auto &q : s.ab.st)
    q = getWord(key, pos, narrow);
  s.ab.act.resize(m.k());
  for (auto &t : s.ab.act)
    t = getWord(key, pos, narrow);
  s.ab.j = static_cast<unsigned char>(key[pos++]);
  s.ab.c.resize(p.numVars() * p.numThreads());
  for (auto &c : s.ab.c)
    c = static_cast<std::uint8_t>(key[pos++]);
  s.ab.u.resize(m.k() * p.numVars());
  for (auto &u : s.ab.u)
    u = static_cast<std::uint8_t>(key[pos++]);
  s.rel.rank.resize(m.layout().size());
  for (auto &r : s.rel.rank)
    r = static_cast<std::uint16_t>(getWord(key, pos, narrow));
  return s;
}

struct Successor {
  std::uint32_t parent;
  AbLabel label;
  std::string key;
};

void expand(const AbMachine &m, const StateReducer &red, bool narrow, const SearchState &s,
            std::uint32_t idx, std::vector<Successor> &out) {
  const AbVar sentinel = m.layout().sentinel();
  for (const auto &tr : m.transitions(s.ab)) {
    const AbState control = red.control(tr.next);
    for (auto &rel : relApplyAll(s.rel, tr.effects, sentinel)) {
      SearchState next{control, red.canonical(tr.next, std::move(rel))};
      out.push_back({idx, tr.label, canonicalKey(next, narrow)});
    }
  }
}

bool fitsNarrow(const AbMachine &m) {
  const Program &p = m.program();
  if (p.numThreads() > 0xff || m.layout().size() > 0xff)
    return false;
  return std::all_of(p.threads.begin(), p.threads.end(),
                     [](const Thread &t) { return t.states.size() <= 0xff; });
}

} // namespace

Verdict checkReach(const Program &p, std::size_t k, const Target &target,
                   const ReachOptions &opts) {
  const auto started = Clock::now();
  const AbMachine m(p, k);
  const StateReducer red(m, opts.reduce, target.thread);
  if (p.numThreads() > 0xffff || m.layout().size() > 0xffff)
    throw ModelError("program too large for the state encoding");
  if (target.thread >= p.numThreads() || target.state >= p.threads[target.thread].states.size())
    throw ModelError("target does not name a state of the program");

  Verdict v;
  struct Node {
    std::uint32_t parent;
    AbLabel label;
    const std::string *key;
  };
  constexpr std::uint32_t kRoot = std::numeric_limits<std::uint32_t>::max();
  std::vector<Node> nodes;
  std::unordered_map<std::string, std::uint32_t> seen;
  const bool narrow = fitsNarrow(m);
  const std::size_t keyLen =
      canonicalKeyLength(p.numThreads(), p.numVars(), p.numRegs(), k, narrow);
  // visited-set entry: key bytes plus hash-node and index overhead
  const std::size_t bytesPerState = keyLen + 96;

  auto finish = [&]() -> Verdict {
    v.stats.statesExplored = nodes.size();
    v.stats.wallMs =
        std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - started).count();
    return v;
  };
  auto insert = [&](std::string key, std::uint32_t parent, const AbLabel &label) -> bool {
    if (key.size() != keyLen)
      throw std::logic_error("canonical key has unexpected length");
    v.maxKeyBytes = std::max(v.maxKeyBytes, key.size());
    auto [it, fresh] = seen.try_emplace(std::move(key), static_cast<std::uint32_t>(nodes.size()));
    if (fresh)
      nodes.push_back({parent, label, &it->first});
    return fresh;
  };
  auto isTarget = [&](std::uint32_t idx) {
    const std::string &key = *nodes[idx].key;
    std::size_t pos = (narrow ? 1 : 2) * target.thread;
    return getWord(key, pos, narrow) == target.state;
  };
  auto witness = [&](std::uint32_t idx) {
    std::vector<std::uint32_t> path;
    for (std::uint32_t i = idx; nodes[i].parent != kRoot; i = nodes[i].parent)
      path.push_back(i);
    const std::uint32_t root = path.empty() ? idx : nodes[path.back()].parent;
    Witness w;
    w.reduced = opts.reduce;
    w.target = target;
    w.initial = decodeKey(m, *nodes[root].key, narrow);
    for (auto it = path.rbegin(); it != path.rend(); ++it)
      w.steps.push_back({nodes[*it].label, decodeKey(m, *nodes[*it].key, narrow)});
    return w;
  };
  auto overBudget = [&]() {
    if (nodes.size() >= opts.maxStates)
      return true;
    return opts.maxMemoryMb != 0 && nodes.size() * bytesPerState > opts.maxMemoryMb * 1024 * 1024;
  };

  for (const auto &act : m.allActs()) {
    SearchState s{m.initial(act), relInitial(m.layout())};
    s.rel = red.canonical(s.ab, std::move(s.rel));
    s.ab = red.control(std::move(s.ab));
    if (insert(canonicalKey(s, narrow), kRoot, AbLabel{}) &&
        isTarget(static_cast<std::uint32_t>(nodes.size() - 1))) {
      v.outcome = Outcome::Reachable;
      v.witness = witness(static_cast<std::uint32_t>(nodes.size() - 1));
      return finish();
    }
  }

  const unsigned workers = std::max(1u, opts.threads);
  constexpr std::size_t kChunk = 2048;
  std::size_t levelBegin = 0;
  while (levelBegin < nodes.size()) {
    const std::size_t levelEnd = nodes.size();
    v.stats.peakFrontier = std::max(v.stats.peakFrontier, levelEnd - levelBegin);
    for (std::size_t lo = levelBegin; lo < levelEnd; lo += kChunk * workers) {
      const std::size_t hi = std::min(levelEnd, lo + kChunk * workers);
      std::vector<std::vector<Successor>> parts(workers);
      auto work = [&](unsigned w) {
        const std::size_t per = (hi - lo + workers - 1) / workers;
        const std::size_t a = lo + w * per;
        const std::size_t b = std::min(hi, a + per);
        for (std::size_t i = a; i < b; ++i)
          expand(m, red, narrow, decodeKey(m, *nodes[i].key, narrow),
                 static_cast<std::uint32_t>(i), parts[w]);
      };
      if (workers == 1) {
        work(0);
      } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w)
          pool.emplace_back(work, w);
        for (auto &th : pool)
          th.join();
      }
      for (auto &part : parts) {
        for (auto &s : part) {
          if (!insert(std::move(s.key), s.parent, s.label))
            continue;
          const auto idx = static_cast<std::uint32_t>(nodes.size() - 1);
          if (isTarget(idx)) {
            v.outcome = Outcome::Reachable;
            v.witness = witness(idx);
            return finish();
          }
          if (overBudget()) {
            v.outcome = Outcome::BoundExhausted;
            return finish();
          }
        }
      }
    }
    levelBegin = levelEnd;
  }
  v.outcome = Outcome::NotReachable;
  return finish();
}

ConcreteRun inflate(const ConcreteRun &run, Value d, Value c) {
  ConcreteRun out = run;
  auto bump = [&](Value &x) {
    if (x >= d)
      x += c;
  };
  for (auto &x : out.initial.mem)
    bump(x);
  for (auto &s : out.steps) {
    for (auto &x : s.config.mem)
      bump(x);
    if (s.fresh)
      bump(*s.fresh);
  }
  return out;
}

namespace {

[[noreturn]] void invalid(const std::string &why) { throw ModelError("witness invalid: " + why); }

std::vector<AbVar> classMembers(const RelState &r, std::uint16_t rank) {
  std::vector<AbVar> out;
  for (AbVar v = 0; v < r.rank.size(); ++v)
    if (r.rank[v] == rank)
      out.push_back(v);
  return out;
}

} // namespace

ConcreteRun concretizeWitness(const Program &p, std::size_t k, const Witness &w) {
  const AbMachine m(p, k);
  const StateReducer red(m, w.reduced, w.target.thread);
  const AbVar sentinel = m.layout().sentinel();

  ConcreteRun run;
  run.initial = m.initialConfig(w.initial.ab.act);
  if (red.canonical(run.initial.state, abstractOf(run.initial.mem)) != w.initial.rel)
    invalid("initial order does not match");

  for (const auto &step : w.steps) {
    const AbConfig &cur = run.last();
    const auto trs = m.transitions(cur.state);
    auto it = std::find_if(trs.begin(), trs.end(),
                           [&](const AbTransition &t) { return t.label == step.label; });
    if (it == trs.end())
      invalid("label not enabled: " + m.describe(step.label));
    if (red.control(it->next) != step.state.ab)
      invalid("control state mismatch");
    const RelState &goal = step.state.rel;

    std::optional<Value> fresh;
    for (const auto &e : it->effects) {
      if (const auto *f = std::get_if<FreshVar>(&e)) {
        const AbVar d = f->dst;
        const std::vector<Value> &mem = run.last().mem;
        if (!red.live(it->next, d)) {
          fresh = 0;
          continue;
        }
        const std::uint16_t rd = goal.rank[d];
        std::optional<Value> same;
        for (AbVar v : classMembers(goal, rd))
          if (v != d)
            same = (v == sentinel || !red.live(it->next, v)) ? Value{0} : mem[v];
        if (same) {
          fresh = *same;
          continue;
        }
        if (red.enabled() && red.orderFree()) {
          fresh = *std::max_element(mem.begin(), mem.end()) + 1;
          continue;
        }
        if (rd == 0)
          invalid("fresh value below the sentinel");
        auto valueOf = [&](std::uint16_t rank) -> Value {
          for (AbVar v : classMembers(goal, rank))
            if (v != d)
              return (v == sentinel || !red.live(it->next, v)) ? Value{0} : run.last().mem[v];
          invalid("empty class");
        };
        const Value lo = valueOf(static_cast<std::uint16_t>(rd - 1));
        if (rd < goal.maxRank()) {
          const Value hi = valueOf(static_cast<std::uint16_t>(rd + 1));
          if (lo + 1 >= hi)
            run = inflate(run, hi, lo + 2 - hi);
        }
        fresh = lo + 1;
      } else if (const auto *g = std::get_if<GuardRel>(&e)) {
        const std::vector<Value> &mem = run.last().mem;
        const Value a = mem[g->a], b = mem[g->b];
        if (g->rel.isOrder() && g->rel.n > 0 && a < b && !evalRel(g->rel, a, b)) {
          const Value need = g->rel.kind == RelKind::Lt ? a + g->rel.n + 1 : a + g->rel.n;
          run = inflate(run, b, need - b);
        }
      }
    }

    AbConfig next{it->next, run.last().mem};
    try {
      applyEffects(next.mem, it->effects, fresh);
    } catch (const GuardFailed &) {
      invalid("guard fails concretely at " + m.describe(step.label));
    }
    if (red.canonical(next.state, abstractOf(next.mem)) != goal)
      invalid("order mismatch after " + m.describe(step.label));
    run.steps.push_back({step.label, fresh, std::move(next)});
  }
  return run;
}

bool validateWitness(const Program &p, std::size_t k, const ConcreteRun &run) {
  try {
    const AbMachine m(p, k);
    if (run.initial != m.initialConfig(run.initial.state.act))
      return false;
    const AbConfig *cur = &run.initial;
    for (const auto &s : run.steps) {
      if (s.config != m.concreteStep(*cur, s.label, s.fresh))
        return false;
      cur = &s.config;
    }
    return true;
  } catch (const ModelError &) {
    return false;
  }
}

} // namespace tsocb
