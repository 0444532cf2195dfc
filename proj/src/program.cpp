#include "tsocb/program.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

namespace tsocb {

bool evalRel(Relation rel, Value lhs, Value rhs) {
  switch (rel.kind) {
  case RelKind::Eq:
    return lhs == rhs;
  case RelKind::Neq:
    return lhs != rhs;
  case RelKind::Lt:
    // lhs + n < rhs, written so it cannot overflow
    return rhs > lhs && rhs - lhs > rel.n;
  case RelKind::Le:
    return rhs >= lhs && rhs - lhs >= rel.n;
  }
  return false;
}

std::string toString(Relation rel) {
  switch (rel.kind) {
  case RelKind::Eq:
    return "=";
  case RelKind::Neq:
    return "!=";
  case RelKind::Lt:
    return rel.n == 0 ? "<" : "<" + std::to_string(rel.n);
  case RelKind::Le:
    return rel.n == 0 ? "<=" : "<=" + std::to_string(rel.n);
  }
  return "?";
}

bool operator==(const Op &a, const Op &b) {
  if (a.kind != b.kind || a.r1 != b.r1)
    return false;
  if (a.usesSecondReg() && a.r2 != b.r2)
    return false;
  if (a.usesVar() && a.var != b.var)
    return false;
  if (a.kind == OpKind::Guard && a.rel != b.rel)
    return false;
  return true;
}

std::uint32_t Program::nMax() const {
  std::uint32_t n = 0;
  for (const auto &t : threads)
    for (const auto &tr : t.transitions)
      if (tr.op.kind == OpKind::Guard)
        n = std::max(n, tr.op.rel.n);
  return n;
}

bool Program::usesOrder() const {
  for (const auto &t : threads)
    for (const auto &tr : t.transitions)
      if (tr.op.kind == OpKind::Guard && tr.op.rel.isOrder())
        return true;
  return false;
}

std::optional<ThreadId> Program::findThread(std::string_view name) const {
  for (ThreadId t = 0; t < threads.size(); ++t)
    if (threads[t].name == name)
      return t;
  return std::nullopt;
}

std::optional<StateId> Program::findState(ThreadId t, std::string_view name) const {
  if (t >= threads.size())
    return std::nullopt;
  const auto &states = threads[t].states;
  for (StateId s = 0; s < states.size(); ++s)
    if (states[s] == name)
      return s;
  return std::nullopt;
}

std::optional<VarId> Program::findVar(std::string_view name) const {
  for (VarId x = 0; x < vars.size(); ++x)
    if (vars[x] == name)
      return x;
  return std::nullopt;
}

std::vector<ThreadId> Program::regOwners() const {
  std::vector<ThreadId> owner(regNames.size(), 0);
  for (ThreadId t = 0; t < threads.size(); ++t)
    for (RegId r : threads[t].regs)
      if (r < owner.size())
        owner[r] = t;
  return owner;
}

std::string Program::describe(ThreadId, const Op &op) const {
  auto reg = [&](RegId r) { return r < regNames.size() ? regNames[r] : "?r" + std::to_string(r); };
  auto var = [&](VarId x) { return x < vars.size() ? vars[x] : "?x" + std::to_string(x); };
  std::ostringstream os;
  switch (op.kind) {
  case OpKind::Assign:
    os << reg(op.r1) << " := " << reg(op.r2);
    break;
  case OpKind::NewValue:
    os << reg(op.r1) << " := *";
    break;
  case OpKind::Guard:
    os << "assume " << reg(op.r1) << ' ' << toString(op.rel) << ' ' << reg(op.r2);
    break;
  case OpKind::Read:
    os << "read " << var(op.var) << ' ' << reg(op.r1);
    break;
  case OpKind::Write:
    os << "write " << var(op.var) << ' ' << reg(op.r1);
    break;
  case OpKind::Arw:
    os << "arw " << var(op.var) << ' ' << reg(op.r1) << ' ' << reg(op.r2);
    break;
  }
  return os.str();
}

std::vector<Diagnostic> validate(const Program &p) {
  std::vector<Diagnostic> out;
  auto report = [&](std::string code, std::string msg) {
    out.push_back({std::move(code), std::move(msg)});
  };

  if (p.threads.empty())
    report("no-threads", "program has no threads");

  std::set<std::string> seenThreads;
  for (const auto &t : p.threads)
    if (!seenThreads.insert(t.name).second)
      report("duplicate-thread", "thread '" + t.name + "' declared twice");

  std::set<std::string> seenVars;
  for (const auto &x : p.vars)
    if (!seenVars.insert(x).second)
      report("duplicate-variable", "variable '" + x + "' declared twice");

  // register -> names of the threads declaring it
  std::map<RegId, std::set<std::string>> declaredBy;
  for (const auto &t : p.threads)
    for (RegId r : t.regs) {
      if (r >= p.regNames.size()) {
        report("unknown-register", "thread '" + t.name + "' declares register #" +
                                       std::to_string(r) + " outside the register table");
        continue;
      }
      declaredBy[r].insert(t.name);
    }
  for (const auto &[r, owners] : declaredBy)
    if (owners.size() > 1) {
      std::string names;
      for (const auto &n : owners)
        names += (names.empty() ? "" : ", ") + n;
      report("disjoint-registers", "register '" + p.regNames[r] + "' is shared by threads " + names);
    }

  for (const auto &t : p.threads) {
    const std::set<RegId> own(t.regs.begin(), t.regs.end());
    if (t.init >= t.states.size())
      report("bad-init", "thread '" + t.name + "' has an initial state outside its state set");
    std::set<std::string> seenStates;
    for (const auto &s : t.states)
      if (!seenStates.insert(s).second)
        report("duplicate-state", "thread '" + t.name + "' declares state '" + s + "' twice");

    for (std::size_t i = 0; i < t.transitions.size(); ++i) {
      const auto &tr = t.transitions[i];
      const std::string where = "thread '" + t.name + "' transition " + std::to_string(i);
      if (tr.from >= t.states.size() || tr.to >= t.states.size())
        report("bad-state", where + " has an endpoint outside the state set");
      auto checkReg = [&](RegId r) {
        if (r >= p.regNames.size())
          report("unknown-register", where + " uses undeclared register #" + std::to_string(r));
        else if (!own.count(r))
          report("foreign-register",
                 where + " uses register '" + p.regNames[r] + "' not owned by the thread");
      };
      checkReg(tr.op.r1);
      if (tr.op.usesSecondReg())
        checkReg(tr.op.r2);
      if (tr.op.usesVar() && tr.op.var >= p.vars.size())
        report("unknown-variable", where + " uses undeclared variable #" + std::to_string(tr.op.var));
      if (tr.op.kind == OpKind::Guard && !tr.op.rel.isOrder() && tr.op.rel.n != 0)
        report("bad-relation", where + " carries a gap constant on = or !=");
    }
  }

  if (p.target) {
    if (p.target->thread >= p.threads.size())
      report("bad-target", "target names a thread outside the program");
    else if (p.target->state >= p.threads[p.target->thread].states.size())
      report("bad-target", "target state does not belong to thread '" +
                               p.threads[p.target->thread].name + "'");
  }

  std::sort(out.begin(), out.end());
  return out;
}

VarId ProgramBuilder::var(const std::string &name) {
  auto [it, fresh] = varIds_.try_emplace(name, static_cast<VarId>(prog_.vars.size()));
  if (fresh)
    prog_.vars.push_back(name);
  return it->second;
}

ThreadId ProgramBuilder::thread(const std::string &name, const std::string &initState) {
  const auto id = static_cast<ThreadId>(prog_.threads.size());
  prog_.threads.push_back(Thread{name, {}, {}, 0, {}});
  stateIds_.emplace_back();
  prog_.threads[id].init = state(id, initState);
  return id;
}

RegId ProgramBuilder::reg(ThreadId t, const std::string &name) {
  auto [it, fresh] = regIds_.try_emplace(name, static_cast<RegId>(prog_.regNames.size()));
  if (fresh)
    prog_.regNames.push_back(name);
  auto &regs = prog_.threads.at(t).regs;
  if (std::find(regs.begin(), regs.end(), it->second) == regs.end())
    regs.push_back(it->second);
  return it->second;
}

std::optional<RegId> ProgramBuilder::findReg(const std::string &name) const {
  auto it = regIds_.find(name);
  if (it == regIds_.end())
    return std::nullopt;
  return it->second;
}

StateId ProgramBuilder::state(ThreadId t, const std::string &name) {
  auto &ids = stateIds_.at(t);
  auto [it, fresh] = ids.try_emplace(name, static_cast<StateId>(prog_.threads[t].states.size()));
  if (fresh)
    prog_.threads[t].states.push_back(name);
  return it->second;
}

void ProgramBuilder::add(ThreadId t, const std::string &from, Op op, const std::string &to) {
  const StateId a = state(t, from);
  const StateId b = state(t, to);
  prog_.threads.at(t).transitions.push_back({a, op, b});
}

void ProgramBuilder::setTarget(ThreadId t, const std::string &s) {
  prog_.target = Target{t, state(t, s)};
}

} // namespace tsocb
