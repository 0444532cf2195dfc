#include "tsocb/generators.hpp"

#include <algorithm>
#include <chrono>
#include <deque>
#include <map>
#include <set>
#include <unordered_map>

namespace tsocb {

namespace {

GenResult finish(const ProgramBuilder &b, std::size_t kHint) {
  // normalize through the DSL so generated and parsed programs coincide
  Program p = parseProgram(renderProgram(b.build()));
  return {p, *p.target, kHint};
}

std::string num(std::size_t i) { return std::to_string(i); }

} // namespace

GenResult genBakery(std::size_t n) {
  if (n < 1)
    throw ModelError("bakery needs at least one thread");
  ProgramBuilder b;
  std::vector<VarId> ticket, chosen, inCrit;
  for (std::size_t i = 1; i <= n; ++i)
    ticket.push_back(b.var("ticket_" + num(i)));
  for (std::size_t i = 1; i <= n; ++i)
    chosen.push_back(b.var("chosen_" + num(i)));
  for (std::size_t i = 1; i <= n; ++i)
    inCrit.push_back(b.var("in_crit_" + num(i)));

  const Relation eq = Relation::eq(), neq = Relation::neq(), lt = Relation::lt(0);
  for (std::size_t i = 1; i <= n; ++i) {
    const ThreadId t = b.thread("p" + num(i), "idle");
    const RegId mine = b.reg(t, "mine" + num(i));
    const RegId tmp = b.reg(t, "tmp" + num(i));
    const RegId yes = b.reg(t, "true" + num(i));
    const RegId no = b.reg(t, "false" + num(i));
    auto c = [&](std::size_t j) { return j > n ? std::string("accepted") : "c" + num(j); };
    auto l2 = [&](std::size_t j) { return j > n ? std::string("enter") : "L2_" + num(j); };

    b.add(t, "idle", Op::newValue(yes), "boot");
    b.add(t, "boot", Op::guard(neq, yes, no), "L1");
    b.add(t, "L1", Op::write(chosen[i - 1], no), "pick");
    b.add(t, "pick", Op::newValue(mine), c(1));
    for (std::size_t j = 1; j <= n; ++j) {
      b.add(t, c(j), Op::read(ticket[j - 1], tmp), "t" + num(j));
      b.add(t, "t" + num(j), Op::guard(lt, mine, tmp), "L1");
      b.add(t, "t" + num(j), Op::guard(lt, tmp, mine), c(j + 1));
      b.add(t, "t" + num(j), Op::guard(eq, tmp, mine), c(j + 1));
    }
    b.add(t, "accepted", Op::write(ticket[i - 1], mine), "announce");
    b.add(t, "announce", Op::write(chosen[i - 1], yes), l2(1));
    for (std::size_t j = 1; j <= n; ++j) {
      const std::string a = "a" + num(j), l3 = "L3_" + num(j), bj = "b" + num(j),
                        e = "e" + num(j);
      b.add(t, l2(j), Op::read(chosen[j - 1], tmp), a);
      b.add(t, a, Op::guard(neq, tmp, yes), l2(j));
      b.add(t, a, Op::guard(eq, tmp, yes), l3);
      b.add(t, l3, Op::read(ticket[j - 1], tmp), bj);
      b.add(t, bj, Op::guard(eq, tmp, no), l2(j + 1));
      b.add(t, bj, Op::guard(neq, tmp, no), e);
      b.add(t, e, Op::guard(lt, tmp, mine), l3);
      b.add(t, e, Op::guard(eq, tmp, mine), l2(j + 1));
      b.add(t, e, Op::guard(lt, mine, tmp), l2(j + 1));
    }
    b.add(t, "enter", Op::write(inCrit[i - 1], yes), "crit");
    b.add(t, "crit", Op::write(inCrit[i - 1], no), "leave");
    b.add(t, "leave", Op::assign(mine, no), "L1");
  }

  const ThreadId mon = b.thread("monitor", "watch");
  const RegId zero = b.reg(mon, "zero");
  const RegId seenA = b.reg(mon, "seen_a");
  const RegId seenB = b.reg(mon, "seen_b");
  if (n == 1)
    b.add(mon, "watch", Op::guard(neq, zero, zero), "violation");
  for (std::size_t i = 1; i <= n; ++i)
    for (std::size_t j = i + 1; j <= n; ++j) {
      const std::string s = "m" + num(i) + "_" + num(j) + "_";
      b.add(mon, "watch", Op::read(inCrit[i - 1], seenA), s + "1");
      b.add(mon, s + "1", Op::guard(neq, seenA, zero), s + "2");
      b.add(mon, s + "2", Op::read(inCrit[j - 1], seenB), s + "3");
      b.add(mon, s + "3", Op::guard(neq, seenB, zero), "violation");
    }
  b.setTarget(mon, "violation");
  return finish(b, n + 2);
}

namespace {

/// letterMap[i][a] = index in dfas[i] of letter a of dfas[0].
std::vector<std::vector<std::uint32_t>> alignAlphabets(const std::vector<Dfa> &dfas) {
  if (dfas.empty())
    throw ModelError("at least one automaton is required");
  for (const auto &d : dfas) {
    const auto errs = validateDfa(d);
    if (!errs.empty())
      throw ModelError(errs.front());
  }
  const auto &base = dfas.front().alphabet;
  const std::set<std::string> baseSet(base.begin(), base.end());
  std::vector<std::vector<std::uint32_t>> out;
  for (const auto &d : dfas) {
    if (std::set<std::string>(d.alphabet.begin(), d.alphabet.end()) != baseSet ||
        d.alphabet.size() != base.size())
      throw ModelError("alphabet mismatch");
    std::vector<std::uint32_t> map;
    for (const auto &a : base)
      map.push_back(static_cast<std::uint32_t>(
          std::find(d.alphabet.begin(), d.alphabet.end(), a) - d.alphabet.begin()));
    out.push_back(std::move(map));
  }
  return out;
}

bool isFinal(const Dfa &d, std::uint32_t q) {
  return std::find(d.finals.begin(), d.finals.end(), q) != d.finals.end();
}

} // namespace

GenResult genIntersection(const std::vector<Dfa> &dfas) {
  const auto letters = alignAlphabets(dfas);
  const std::size_t n = dfas.size();
  ProgramBuilder b;
  const ThreadId t = b.thread("t", "start");
  std::vector<std::vector<RegId>> stateReg(n);
  std::vector<RegId> cur;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t q = 0; q < dfas[i].states.size(); ++q)
      stateReg[i].push_back(b.reg(t, "s" + num(i + 1) + "_" + num(q)));
  for (std::size_t i = 0; i < n; ++i)
    cur.push_back(b.reg(t, "cur" + num(i + 1)));

  // Each state register gets a fresh value that differs from every earlier
  // one. Checking right after each draw keeps the abstract frontier small.
  std::string at = "start";
  std::size_t step = 0;
  auto next = [&]() { return "n" + num(++step); };
  std::vector<RegId> drawn;
  for (std::size_t i = 0; i < n; ++i)
    for (RegId r : stateReg[i]) {
      std::string to = next();
      b.add(t, at, Op::newValue(r), to);
      at = to;
      for (RegId prev : drawn) {
        to = next();
        b.add(t, at, Op::guard(Relation::neq(), r, prev), to);
        at = to;
      }
      drawn.push_back(r);
    }
  for (std::size_t i = 0; i < n; ++i) {
    const std::string to = i + 1 == n ? std::string("hub") : next();
    b.add(t, at, Op::assign(cur[i], stateReg[i][dfas[i].init]), to);
    at = to;
  }

  const auto &alphabet = dfas.front().alphabet;
  for (std::size_t a = 0; a < alphabet.size(); ++a) {
    auto mid = [&](std::size_t i) {
      return i == 0 || i == n ? std::string("hub") : "g" + num(a) + "_" + num(i);
    };
    for (std::size_t i = 0; i < n; ++i) {
      const auto &d = dfas[i];
      for (std::size_t e = 0; e < d.transitions.size(); ++e) {
        const auto &edge = d.transitions[e];
        if (edge.letter != letters[i][a])
          continue;
        const std::string via = "d" + num(a) + "_" + num(i + 1) + "_" + num(e);
        b.add(t, mid(i), Op::guard(Relation::eq(), cur[i], stateReg[i][edge.from]), via);
        b.add(t, via, Op::assign(cur[i], stateReg[i][edge.to]), mid(i + 1));
      }
    }
  }

  for (std::size_t i = 0; i < n; ++i) {
    const std::string from = i == 0 ? std::string("hub") : "f" + num(i);
    const std::string to = i + 1 == n ? std::string("accept") : "f" + num(i + 1);
    for (auto f : dfas[i].finals)
      b.add(t, from, Op::guard(Relation::eq(), cur[i], stateReg[i][f]), to);
  }
  if (std::any_of(dfas.begin(), dfas.end(), [](const Dfa &d) { return d.finals.empty(); }))
    // a guard that never holds keeps 'accept' declared
    b.add(t, "start", Op::guard(Relation::neq(), cur[0], cur[0]), "accept");
  b.setTarget(t, "accept");
  return finish(b, 1);
}

bool dfaIntersectionOracle(const std::vector<Dfa> &dfas) {
  const auto letters = alignAlphabets(dfas);
  const std::size_t n = dfas.size();
  using Tuple = std::vector<std::uint32_t>;
  std::set<Tuple> seen;
  std::deque<Tuple> queue;
  Tuple init;
  for (const auto &d : dfas)
    init.push_back(d.init);
  seen.insert(init);
  queue.push_back(init);
  while (!queue.empty()) {
    Tuple cur = queue.front();
    queue.pop_front();
    bool accepting = true;
    for (std::size_t i = 0; i < n; ++i)
      accepting = accepting && isFinal(dfas[i], cur[i]);
    if (accepting)
      return true;
    for (std::size_t a = 0; a < letters.front().size(); ++a) {
      std::vector<Tuple> succ{Tuple{}};
      for (std::size_t i = 0; i < n; ++i) {
        std::vector<Tuple> grown;
        for (const auto &e : dfas[i].transitions)
          if (e.from == cur[i] && e.letter == letters[i][a])
            for (const auto &partial : succ) {
              Tuple t = partial;
              t.push_back(e.to);
              grown.push_back(std::move(t));
            }
        succ = std::move(grown);
      }
      for (auto &s : succ)
        if (seen.insert(s).second)
          queue.push_back(std::move(s));
    }
  }
  return false;
}

GenResult genDlcsReduction(const DlcsModel &m) {
  const auto errs = validateDlcs(m);
  if (!errs.empty())
    throw ModelError(errs.front());
  if (!m.target)
    throw ModelError("model has no target state");

  // internal state names must not collide with the model's
  std::string prefix = "_s";
  while (std::any_of(m.states.begin(), m.states.end(),
                     [&](const std::string &s) { return s.rfind(prefix, 0) == 0; }))
    prefix = "_" + prefix;
  std::size_t counter = 0;
  auto fresh = [&]() { return prefix + num(counter++); };

  ProgramBuilder b;
  std::vector<VarId> xa, ya;
  for (const auto &a : m.alphabet)
    xa.push_back(b.var("x_" + a));
  for (const auto &a : m.alphabet)
    ya.push_back(b.var("y_" + a));
  std::vector<VarId> all = xa;
  all.insert(all.end(), ya.begin(), ya.end());

  const std::string tInit = fresh();
  const ThreadId t = b.thread("t", tInit);
  const RegId dollar = b.reg(t, "dollar");
  const RegId tmp = b.reg(t, "tmp");
  std::vector<RegId> rx;
  for (const auto &x : m.vars)
    rx.push_back(b.reg(t, "v_" + x));

  const ThreadId ch = b.thread("t_ch", "boot");
  const RegId chDollar = b.reg(ch, "ch_dollar");
  const RegId chTmp = b.reg(ch, "ch_tmp");

  // t_ch draws the separator and stamps it into every variable
  b.add(ch, "boot", Op::newValue(chDollar), "drawn");
  std::string at = "sweep0";
  b.add(ch, "drawn", Op::guard(Relation::neq(), chDollar, chTmp), at);
  for (std::size_t v = 0; v < all.size(); ++v) {
    const std::string to = v + 1 == all.size() ? std::string("q_ch") : "sweep" + num(v + 1);
    b.add(ch, at, Op::arw(all[v], chTmp, chDollar), to);
    at = to;
  }
  for (std::size_t a = 0; a < m.alphabet.size(); ++a) {
    const std::string s = "copy_" + num(a) + "_";
    b.add(ch, "q_ch", Op::read(xa[a], chTmp), s + "1");
    b.add(ch, s + "1", Op::guard(Relation::neq(), chTmp, chDollar), s + "2");
    b.add(ch, s + "2", Op::write(ya[a], chTmp), s + "3");
    b.add(ch, s + "3", Op::read(xa[a], chTmp), s + "4");
    b.add(ch, s + "4", Op::guard(Relation::eq(), chTmp, chDollar), s + "5");
    b.add(ch, s + "5", Op::write(ya[a], chTmp), "q_ch");
  }

  // t waits until every variable carries the separator
  at = tInit;
  for (std::size_t v = 0; v < all.size(); ++v) {
    const std::string mid = fresh();
    const std::string to = v + 1 == all.size() ? m.states[m.init] : fresh();
    b.add(t, at, Op::read(all[v], dollar), mid);
    b.add(t, mid, Op::guard(Relation::neq(), dollar, tmp), to);
    at = to;
  }

  for (const auto &e : m.transitions) {
    const std::string from = m.states[e.from], to = m.states[e.to];
    const DlcsOp &op = e.op;
    switch (op.kind) {
    case DlcsOpKind::Assign:
      b.add(t, from, Op::assign(rx[op.x], rx[op.y]), to);
      break;
    case DlcsOpKind::Eq:
      b.add(t, from, Op::guard(Relation::eq(), rx[op.x], rx[op.y]), to);
      break;
    case DlcsOpKind::Neq:
      b.add(t, from, Op::guard(Relation::neq(), rx[op.x], rx[op.y]), to);
      break;
    case DlcsOpKind::Fresh: {
      std::string cur = fresh();
      b.add(t, from, Op::newValue(tmp), cur);
      std::string nxt = fresh();
      b.add(t, cur, Op::guard(Relation::neq(), tmp, dollar), nxt);
      cur = nxt;
      for (RegId r : rx) {
        nxt = fresh();
        b.add(t, cur, Op::guard(Relation::neq(), tmp, r), nxt);
        cur = nxt;
      }
      b.add(t, cur, Op::assign(rx[op.x], tmp), to);
      break;
    }
    case DlcsOpKind::Send: {
      const std::string mid = fresh();
      b.add(t, from, Op::write(xa[op.letter], rx[op.x]), mid);
      b.add(t, mid, Op::write(xa[op.letter], dollar), to);
      break;
    }
    case DlcsOpKind::Recv: {
      const std::string s1 = fresh(), s2 = fresh(), s3 = fresh();
      b.add(t, from, Op::read(ya[op.letter], rx[op.x]), s1);
      b.add(t, s1, Op::guard(Relation::neq(), rx[op.x], dollar), s2);
      b.add(t, s2, Op::read(ya[op.letter], tmp), s3);
      b.add(t, s3, Op::guard(Relation::eq(), tmp, dollar), to);
      break;
    }
    }
  }
  const std::uint32_t goal = *m.target;
  if (goal != m.init && std::none_of(m.transitions.begin(), m.transitions.end(),
                                     [&](const DlcsModel::Edge &e) {
                                       return e.from == goal || e.to == goal;
                                     }))
    b.add(t, m.states[goal], Op::guard(Relation::neq(), dollar, dollar), m.states[goal]);
  b.setTarget(t, m.states[*m.target]);
  return finish(b, 0);
}

namespace {

struct DlcsConfigHash {
  std::size_t operator()(const DlcsConfig &c) const {
    std::size_t h = c.state;
    auto mix = [&](std::size_t v) { h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2); };
    for (auto v : c.vals)
      mix(v);
    mix(c.channel.size());
    for (const auto &[a, v] : c.channel) {
      mix(a);
      mix(v);
    }
    return h;
  }
};

} // namespace

DlcsVerdict dlcsReachBounded(const DlcsModel &m, std::uint32_t target, const DlcsBounds &bounds) {
  const auto errs = validateDlcs(m);
  if (!errs.empty())
    throw ModelError(errs.front());
  if (target >= m.states.size())
    throw ModelError("target state out of range");
  const auto started = std::chrono::steady_clock::now();

  struct Node {
    DlcsConfig config;
    std::size_t parent;
    std::optional<std::size_t> edge;
    std::size_t depth;
  };
  constexpr std::size_t kRoot = static_cast<std::size_t>(-1);
  DlcsVerdict v;
  v.initial = DlcsConfig{m.init, std::vector<Value>(m.vars.size(), 0), {}};
  std::vector<Node> nodes{{v.initial, kRoot, std::nullopt, 0}};
  std::unordered_map<DlcsConfig, std::size_t, DlcsConfigHash> seen{{v.initial, 0}};

  auto done = [&](Outcome o, std::optional<std::size_t> hit) {
    v.outcome = o;
    if (hit) {
      std::vector<DlcsStep> steps;
      for (std::size_t i = *hit; nodes[i].parent != kRoot; i = nodes[i].parent)
        steps.push_back({nodes[i].edge, nodes[i].config});
      std::reverse(steps.begin(), steps.end());
      v.witness = std::move(steps);
    }
    v.stats.statesExplored = nodes.size();
    v.stats.wallMs = std::chrono::duration_cast<std::chrono::milliseconds>(
                         std::chrono::steady_clock::now() - started)
                         .count();
    return v;
  };
  if (m.init == target)
    return done(Outcome::Reachable, 0);

  for (std::size_t head = 0; head < nodes.size(); ++head) {
    if (nodes[head].depth >= bounds.depth)
      continue;
    const DlcsConfig cur = nodes[head].config;
    std::vector<std::pair<std::optional<std::size_t>, DlcsConfig>> succ;

    for (std::size_t ei = 0; ei < m.transitions.size(); ++ei) {
      const auto &e = m.transitions[ei];
      if (e.from != cur.state)
        continue;
      DlcsConfig n = cur;
      n.state = e.to;
      const DlcsOp &op = e.op;
      switch (op.kind) {
      case DlcsOpKind::Assign:
        n.vals[op.x] = cur.vals[op.y];
        succ.emplace_back(ei, std::move(n));
        break;
      case DlcsOpKind::Eq:
        if (cur.vals[op.x] == cur.vals[op.y])
          succ.emplace_back(ei, std::move(n));
        break;
      case DlcsOpKind::Neq:
        if (cur.vals[op.x] != cur.vals[op.y])
          succ.emplace_back(ei, std::move(n));
        break;
      case DlcsOpKind::Fresh:
        for (Value d = 0; d < bounds.freshValues; ++d) {
          if (std::find(cur.vals.begin(), cur.vals.end(), d) != cur.vals.end())
            continue;
          DlcsConfig f = n;
          f.vals[op.x] = d;
          succ.emplace_back(ei, std::move(f));
        }
        break;
      case DlcsOpKind::Send:
        if (cur.channel.size() < bounds.channelLen) {
          n.channel.emplace_back(op.letter, cur.vals[op.x]);
          succ.emplace_back(ei, std::move(n));
        }
        break;
      case DlcsOpKind::Recv:
        if (!cur.channel.empty() && cur.channel.front().first == op.letter) {
          n.vals[op.x] = cur.channel.front().second;
          n.channel.erase(n.channel.begin());
          succ.emplace_back(ei, std::move(n));
        }
        break;
      }
    }
    // loss: every proper subsequence of the channel
    const std::size_t len = cur.channel.size();
    if (len > 0 && len < 20) {
      for (std::uint32_t mask = 0; mask + 1 < (1u << len); ++mask) {
        DlcsConfig n = cur;
        n.channel.clear();
        for (std::size_t i = 0; i < len; ++i)
          if (mask & (1u << i))
            n.channel.push_back(cur.channel[i]);
        succ.emplace_back(std::nullopt, std::move(n));
      }
    }

    for (auto &[edge, cfg] : succ) {
      if (seen.count(cfg))
        continue;
      if (nodes.size() >= bounds.maxStates)
        return done(Outcome::BoundExhausted, std::nullopt);
      seen.emplace(cfg, nodes.size());
      const bool hit = cfg.state == target;
      nodes.push_back({std::move(cfg), head, edge, nodes[head].depth + 1});
      if (hit)
        return done(Outcome::Reachable, nodes.size() - 1);
    }
  }
  return done(Outcome::NotReachable, std::nullopt);
}

} // namespace tsocb
