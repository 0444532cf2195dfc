#include "tsocb/rel.hpp"

#include <algorithm>

namespace tsocb {

std::uint16_t RelState::maxRank() const {
  return rank.empty() ? 0 : *std::max_element(rank.begin(), rank.end());
}

RelState relInitial(const AbLayout &layout) {
  return RelState{std::vector<std::uint16_t>(layout.size(), 0)};
}

RelState abstractOf(const std::vector<Value> &mem) {
  std::vector<Value> sorted(mem);
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  RelState s;
  s.rank.reserve(mem.size());
  for (Value v : mem)
    s.rank.push_back(static_cast<std::uint16_t>(
        std::lower_bound(sorted.begin(), sorted.end(), v) - sorted.begin()));
  return s;
}

bool relCheck(const RelState &s, Relation rel, AbVar a, AbVar b) {
  const auto ra = s.rank[a];
  const auto rb = s.rank[b];
  switch (rel.kind) {
  case RelKind::Eq:
    return ra == rb;
  case RelKind::Neq:
    return ra != rb;
  case RelKind::Lt:
    return ra < rb;
  case RelKind::Le:
    return rel.n == 0 ? ra <= rb : ra < rb;
  }
  return false;
}

void densify(std::vector<std::uint16_t> &rank) {
  if (rank.empty())
    return;
  const std::size_t top = *std::max_element(rank.begin(), rank.end());
  std::vector<std::uint16_t> used(top + 1, 0);
  for (auto r : rank)
    used[r] = 1;
  std::vector<std::uint16_t> remap(top + 1, 0);
  std::uint16_t next = 0;
  for (std::size_t r = 0; r <= top; ++r)
    if (used[r])
      remap[r] = next++;
  for (auto &r : rank)
    r = remap[r];
}

std::vector<RelState> relApply(const RelState &s, const AbEffect &e, AbVar sentinel) {
  if (const auto *c = std::get_if<CopyVar>(&e)) {
    RelState n = s;
    n.rank[c->dst] = s.rank[c->src];
    densify(n.rank);
    return {std::move(n)};
  }
  if (const auto *g = std::get_if<GuardRel>(&e)) {
    if (relCheck(s, g->rel, g->a, g->b))
      return {s};
    return {};
  }
  if (const auto *m = std::get_if<MultiCopy>(&e)) {
    RelState n = s;
    for (const auto &c : m->copies)
      n.rank[c.dst] = s.rank[c.src];
    densify(n.rank);
    return {std::move(n)};
  }

  const AbVar d = std::get<FreshVar>(e).dst;
  // rank the other variables without d
  RelState base = s;
  const std::uint16_t old = base.rank[d];
  bool alone = true;
  for (std::size_t v = 0; v < base.rank.size(); ++v)
    if (v != d && base.rank[v] == old)
      alone = false;
  if (alone)
    for (std::size_t v = 0; v < base.rank.size(); ++v)
      if (v != d && base.rank[v] > old)
        --base.rank[v];
  std::uint16_t top = 0;
  for (std::size_t v = 0; v < base.rank.size(); ++v)
    if (v != d)
      top = std::max(top, base.rank[v]);
  const std::uint16_t floor = base.rank[sentinel];

  std::vector<RelState> out;
  out.reserve(2 * (top + 1));
  for (std::uint16_t i = floor; i <= top; ++i) {
    RelState into = base;
    into.rank[d] = i;
    out.push_back(std::move(into));

    RelState above = base;
    for (std::size_t v = 0; v < above.rank.size(); ++v)
      if (v != d && above.rank[v] > i)
        ++above.rank[v];
    above.rank[d] = static_cast<std::uint16_t>(i + 1);
    out.push_back(std::move(above));
  }
  return out;
}

std::vector<RelState> relApplyAll(const RelState &s, const std::vector<AbEffect> &effects,
                                  AbVar sentinel) {
  std::vector<RelState> cur{s};
  for (const auto &e : effects) {
    std::vector<RelState> next;
    for (const auto &r : cur) {
      auto succ = relApply(r, e, sentinel);
      next.insert(next.end(), std::make_move_iterator(succ.begin()),
                  std::make_move_iterator(succ.end()));
    }
    cur = std::move(next);
    if (cur.empty())
      break;
  }
  return cur;
}

namespace {

void put16(std::string &out, std::uint32_t v) {
  out.push_back(static_cast<char>(v & 0xff));
  out.push_back(static_cast<char>((v >> 8) & 0xff));
}

} // namespace

std::size_t canonicalKeyLength(std::size_t threads, std::size_t vars, std::size_t regs,
                               std::size_t k, bool narrow) {
  const std::size_t w = narrow ? 1 : 2;
  const std::size_t abVars = vars + regs + vars * k + vars * threads + 1;
  return w * threads + w * k + 1 + vars * threads + k * vars + w * abVars;
}

std::string canonicalKey(const SearchState &s, bool narrow) {
  std::string out;
  const std::size_t w = narrow ? 1 : 2;
  out.reserve(w * s.ab.st.size() + w * s.ab.act.size() + 1 + s.ab.c.size() + s.ab.u.size() +
              w * s.rel.rank.size());
  auto put = [&](std::uint32_t v) {
    if (narrow)
      out.push_back(static_cast<char>(v & 0xff));
    else
      put16(out, v);
  };
  for (auto q : s.ab.st)
    put(q);
  for (auto t : s.ab.act)
    put(t);
  out.push_back(static_cast<char>(s.ab.j));
  for (auto c : s.ab.c)
    out.push_back(static_cast<char>(c));
  for (auto u : s.ab.u)
    out.push_back(static_cast<char>(u));
  for (auto r : s.rel.rank)
    put(r);
  return out;
}

} // namespace tsocb
