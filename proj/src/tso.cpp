#include "tsocb/tso.hpp"

#include <algorithm>
#include <chrono>
#include <unordered_map>

namespace tsocb {

namespace {

inline void hashMix(std::size_t &seed, std::size_t v) {
  seed ^= v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2);
}

} // namespace

TsoConfig TsoConfig::initial(const Program &p) {
  TsoConfig c;
  c.st.reserve(p.numThreads());
  for (const auto &t : p.threads)
    c.st.push_back(t.init);
  c.rval.assign(p.numRegs(), 0);
  c.buf.assign(p.numThreads(), {});
  c.mem.assign(p.numVars(), 0);
  return c;
}

std::size_t TsoConfigHash::operator()(const TsoConfig &c) const {
  std::size_t h = 0;
  for (auto s : c.st)
    hashMix(h, s);
  for (auto v : c.rval)
    hashMix(h, v);
  for (const auto &b : c.buf) {
    hashMix(h, b.size());
    for (const auto &e : b) {
      hashMix(h, e.var);
      hashMix(h, e.value);
    }
  }
  for (auto v : c.mem)
    hashMix(h, v);
  return h;
}

std::string toString(Outcome o) {
  switch (o) {
  case Outcome::Reachable:
    return "reachable";
  case Outcome::NotReachable:
    return "unreachable";
  case Outcome::BoundExhausted:
    return "bound_exhausted";
  }
  return "?";
}

std::string describe(const Program &p, const Label &l) {
  const auto &th = p.threads.at(l.thread);
  if (l.isUpdate())
    return th.name + ": update";
  const auto &tr = th.transitions.at(*l.transition);
  std::string s = th.name + ": " + th.states[tr.from] + " -> " + th.states[tr.to] + " : " +
                  p.describe(l.thread, tr.op);
  if (tr.op.kind == OpKind::NewValue)
    s += " [" + std::to_string(l.value) + "]";
  return s;
}

namespace {

/// Newest buffered value of x in `buf`, if any.
std::optional<Value> bufferedValue(const std::vector<BufferEntry> &buf, VarId x) {
  for (auto it = buf.rbegin(); it != buf.rend(); ++it)
    if (it->var == x)
      return it->value;
  return std::nullopt;
}

bool opEnabled(const TsoConfig &c, ThreadId t, const Op &op) {
  switch (op.kind) {
  case OpKind::Guard:
    return evalRel(op.rel, c.rval[op.r1], c.rval[op.r2]);
  case OpKind::Arw:
    return c.buf[t].empty() && c.mem[op.var] == c.rval[op.r1];
  default:
    return true;
  }
}

} // namespace

std::vector<Label> tsoEnabled(const Program &p, const TsoConfig &c, const Bounds &b) {
  std::vector<Label> out;
  for (ThreadId t = 0; t < p.numThreads(); ++t) {
    if (!c.buf[t].empty())
      out.push_back(Label::update(t));
    const auto &trs = p.threads[t].transitions;
    for (std::size_t i = 0; i < trs.size(); ++i) {
      const auto &tr = trs[i];
      if (tr.from != c.st[t] || !opEnabled(c, t, tr.op))
        continue;
      if (tr.op.kind == OpKind::Write && c.buf[t].size() >= b.bufferBound)
        continue;
      if (tr.op.kind == OpKind::NewValue) {
        for (Value v = 0; v <= b.domainBound; ++v)
          out.push_back(Label::op(t, i, v));
      } else {
        out.push_back(Label::op(t, i));
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

TsoConfig tsoStep(const Program &p, const TsoConfig &c, const Label &l) {
  if (l.thread >= p.numThreads())
    throw ModelError("label not enabled: unknown thread");
  TsoConfig n = c;
  auto &buf = n.buf[l.thread];
  if (l.isUpdate()) {
    if (buf.empty())
      throw ModelError("label not enabled: update on an empty buffer");
    n.mem[buf.front().var] = buf.front().value;
    buf.erase(buf.begin());
    return n;
  }
  const auto &trs = p.threads[l.thread].transitions;
  if (*l.transition >= trs.size())
    throw ModelError("label not enabled: unknown transition");
  const auto &tr = trs[*l.transition];
  if (tr.from != c.st[l.thread] || !opEnabled(c, l.thread, tr.op))
    throw ModelError("label not enabled: " + describe(p, l));
  const Op &op = tr.op;
  switch (op.kind) {
  case OpKind::Assign:
    n.rval[op.r1] = c.rval[op.r2];
    break;
  case OpKind::NewValue:
    n.rval[op.r1] = l.value;
    break;
  case OpKind::Guard:
    break;
  case OpKind::Read:
    n.rval[op.r1] = bufferedValue(buf, op.var).value_or(c.mem[op.var]);
    break;
  case OpKind::Write:
    buf.push_back({op.var, c.rval[op.r1]});
    break;
  case OpKind::Arw:
    n.mem[op.var] = c.rval[op.r2];
    break;
  }
  n.st[l.thread] = tr.to;
  return n;
}

namespace {

/// Search node for the context-bounded search. `contexts` counts the
/// contexts opened so far; `active` is meaningful when contexts > 0.
struct CbNode {
  TsoConfig config;
  std::uint32_t contexts = 0;
  ThreadId active = 0;
  friend bool operator==(const CbNode &, const CbNode &) = default;
};

struct CbNodeHash {
  std::size_t operator()(const CbNode &n) const {
    std::size_t h = TsoConfigHash{}(n.config);
    hashMix(h, n.contexts);
    hashMix(h, n.active);
    return h;
  }
};

/// Breadth-first search over nodes of type Node. `succ(node, emit)` calls
/// emit(label, next) for every successor in deterministic order.
template <typename Node, typename Hash, typename Config, typename Succ>
TsoVerdict bfs(Node init, const Target &target, const Bounds &b, Config config,
               Succ succ) {
  using Clock = std::chrono::steady_clock;
  const auto started = Clock::now();
  TsoVerdict v;
  auto finish = [&]() {
    v.stats.wallMs =
        std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - started).count();
    return v;
  };

  struct Entry {
    Node node;
    std::size_t parent;
    Label label;
    std::size_t depth;
  };
  std::vector<Entry> nodes;
  std::unordered_map<Node, std::size_t, Hash> seen;

  auto hit = [&](const Node &n) { return config(n).st[target.thread] == target.state; };
  auto buildWitness = [&](std::size_t idx) {
    std::vector<std::size_t> path;
    for (std::size_t i = idx; i != 0; i = nodes[i].parent)
      path.push_back(i);
    Run run;
    run.initial = config(nodes[0].node);
    for (auto it = path.rbegin(); it != path.rend(); ++it)
      run.steps.push_back({nodes[*it].label, config(nodes[*it].node)});
    return run;
  };

  nodes.push_back({init, 0, Label{}, 0});
  seen.emplace(init, 0);
  v.stats.statesExplored = 1;
  if (hit(init)) {
    v.outcome = Outcome::Reachable;
    v.witness = buildWitness(0);
    return finish();
  }

  std::size_t head = 0;
  while (head < nodes.size()) {
    v.stats.peakFrontier = std::max(v.stats.peakFrontier, nodes.size() - head);
    const std::size_t cur = head++;
    if (nodes[cur].depth >= b.depth)
      continue;
    const std::size_t depth = nodes[cur].depth + 1;
    bool found = false;
    bool exhausted = false;
    // copy: nodes may reallocate while emitting
    const Node from = nodes[cur].node;
    succ(from, [&](const Label &l, Node next) {
      if (found || exhausted)
        return;
      if (seen.count(next))
        return;
      if (nodes.size() >= b.maxStates) {
        exhausted = true;
        return;
      }
      seen.emplace(next, nodes.size());
      nodes.push_back({std::move(next), cur, l, depth});
      ++v.stats.statesExplored;
      if (hit(nodes.back().node))
        found = true;
    });
    if (found) {
      v.outcome = Outcome::Reachable;
      v.witness = buildWitness(nodes.size() - 1);
      return finish();
    }
    if (exhausted) {
      v.outcome = Outcome::BoundExhausted;
      return finish();
    }
  }
  v.outcome = Outcome::NotReachable;
  return finish();
}

} // namespace

TsoVerdict tsoReachBounded(const Program &p, const Target &target, const Bounds &b) {
  auto config = [](const TsoConfig &c) -> const TsoConfig & { return c; };
  auto succ = [&](const TsoConfig &c, auto &&emit) {
    for (const auto &l : tsoEnabled(p, c, b))
      emit(l, tsoStep(p, c, l));
  };
  return bfs<TsoConfig, TsoConfigHash>(TsoConfig::initial(p), target, b, config, succ);
}

TsoVerdict cbReachBounded(const Program &p, const Target &target, std::size_t k, const Bounds &b) {
  if (k < 1)
    throw ModelError("context bound must be at least 1");
  auto config = [](const CbNode &n) -> const TsoConfig & { return n.config; };
  auto succ = [&](const CbNode &n, auto &&emit) {
    for (const auto &l : tsoEnabled(p, n.config, b)) {
      CbNode next;
      if (n.contexts > 0 && n.active == l.thread) {
        next.contexts = n.contexts;
      } else {
        if (n.contexts >= k)
          continue;
        next.contexts = n.contexts + 1;
      }
      next.active = l.thread;
      next.config = tsoStep(p, n.config, l);
      emit(l, std::move(next));
    }
  };
  return bfs<CbNode, CbNodeHash>(CbNode{TsoConfig::initial(p), 0, 0}, target, b, config, succ);
}

namespace {

std::size_t countBlocks(const std::vector<RunStep> &steps) {
  std::size_t blocks = 0;
  for (std::size_t i = 0; i < steps.size(); ++i)
    if (i == 0 || steps[i].label.thread != steps[i - 1].label.thread)
      ++blocks;
  return blocks;
}

} // namespace

bool cbPartitionCheck(const Run &run, std::size_t k) { return countBlocks(run.steps) <= k; }

Run replay(const Program &p, const std::vector<Label> &labels) {
  Run run;
  run.initial = TsoConfig::initial(p);
  for (const auto &l : labels)
    run.steps.push_back({l, tsoStep(p, run.last(), l)});
  return run;
}

Run normalizeUpdates(const Program &p, const Run &run, std::size_t k) {
  if (!cbPartitionCheck(run, k))
    throw ModelError("run is not partitionable into " + std::to_string(k) + " contexts");
  for (const auto &s : run.steps)
    if (!s.label.isUpdate() &&
        p.threads.at(s.label.thread).transitions.at(*s.label.transition).op.kind == OpKind::Arw)
      throw ModelError("update normalization requires an arw-free run");

  std::vector<Label> labels;
  labels.reserve(run.steps.size());
  std::size_t i = 0;
  while (i < run.steps.size()) {
    std::size_t end = i;
    while (end < run.steps.size() && run.steps[end].label.thread == run.steps[i].label.thread)
      ++end;
    std::vector<Label> updates;
    for (std::size_t j = i; j < end; ++j) {
      if (run.steps[j].label.isUpdate())
        updates.push_back(run.steps[j].label);
      else
        labels.push_back(run.steps[j].label);
    }
    labels.insert(labels.end(), updates.begin(), updates.end());
    i = end;
  }
  return replay(p, labels);
}

} // namespace tsocb
