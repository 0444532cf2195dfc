#include "tsocb/dsl.hpp"

#include <cctype>
#include <set>
#include <sstream>
#include <unordered_map>

namespace tsocb {

bool operator==(const DlcsOp &a, const DlcsOp &b) {
  if (a.kind != b.kind || a.x != b.x)
    return false;
  switch (a.kind) {
  case DlcsOpKind::Assign:
  case DlcsOpKind::Eq:
  case DlcsOpKind::Neq:
    return a.y == b.y;
  case DlcsOpKind::Send:
  case DlcsOpKind::Recv:
    return a.letter == b.letter;
  case DlcsOpKind::Fresh:
    return true;
  }
  return false;
}

std::optional<std::uint32_t> DlcsModel::findState(std::string_view name) const {
  for (std::uint32_t i = 0; i < states.size(); ++i)
    if (states[i] == name)
      return i;
  return std::nullopt;
}

namespace {

enum class Tok { Ident, Number, Sym, Rel, End };

struct Token {
  Tok kind = Tok::End;
  std::string text;
  SourceSpan span;
  Relation rel{};
};

const std::set<std::string> kKeywords = {
    "domain", "nat",  "vars",  "thread", "regs",  "init",  "target", "assume", "read",
    "write",  "arw",  "dfa",   "alphabet", "states", "final", "dlcs", "send",   "recv",
};

std::vector<Token> lex(std::string_view src) {
  std::vector<Token> out;
  std::uint32_t line = 1, col = 1;
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k, ++i) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  while (i < src.size()) {
    const char ch = src[i];
    if (ch == '#') {
      while (i < src.size() && src[i] != '\n')
        advance(1);
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(ch))) {
      advance(1);
      continue;
    }
    Token t;
    t.span = {line, col, 0};
    std::size_t len = 0;
    if (std::isalpha(static_cast<unsigned char>(ch)) || ch == '_') {
      while (i + len < src.size() &&
             (std::isalnum(static_cast<unsigned char>(src[i + len])) || src[i + len] == '_'))
        ++len;
      t.kind = Tok::Ident;
    } else if (std::isdigit(static_cast<unsigned char>(ch))) {
      while (i + len < src.size() && std::isdigit(static_cast<unsigned char>(src[i + len])))
        ++len;
      t.kind = Tok::Number;
    } else if (ch == '<') {
      len = 1;
      bool le = false;
      if (i + 1 < src.size() && src[i + 1] == '=') {
        le = true;
        len = 2;
      }
      std::size_t digits = 0;
      while (i + len + digits < src.size() &&
             std::isdigit(static_cast<unsigned char>(src[i + len + digits])))
        ++digits;
      std::uint32_t n = 0;
      if (digits > 0) {
        const std::string num(src.substr(i + len, digits));
        if (digits > 9)
          throw ParseError({line, col, static_cast<std::uint32_t>(len + digits)},
                           "gap constant too large");
        n = static_cast<std::uint32_t>(std::stoul(num));
      }
      len += digits;
      t.kind = Tok::Rel;
      t.rel = le ? Relation::le(n) : Relation::lt(n);
    } else if (src.substr(i, 2) == "->" || src.substr(i, 2) == ":=" || src.substr(i, 2) == "!=") {
      len = 2;
      t.kind = Tok::Sym;
      if (src.substr(i, 2) == "!=") {
        t.kind = Tok::Rel;
        t.rel = Relation::neq();
      }
    } else if (ch == '=') {
      len = 1;
      t.kind = Tok::Rel;
      t.rel = Relation::eq();
    } else if (ch == '{' || ch == '}' || ch == ':' || ch == '*') {
      len = 1;
      t.kind = Tok::Sym;
    } else {
      throw ParseError({line, col, 1}, std::string("unexpected character '") + ch + "'");
    }
    t.text = std::string(src.substr(i, len));
    t.span.length = static_cast<std::uint32_t>(len);
    advance(len);
    out.push_back(std::move(t));
  }
  Token end;
  end.kind = Tok::End;
  end.span = {line, col, 0};
  out.push_back(end);
  return out;
}

class Cursor {
public:
  explicit Cursor(std::string_view src) : toks_(lex(src)) {}

  const Token &peek(std::size_t ahead = 0) const {
    return toks_[std::min(pos_ + ahead, toks_.size() - 1)];
  }
  bool atEnd() const { return peek().kind == Tok::End; }
  bool isKeyword(const char *kw, std::size_t ahead = 0) const {
    return peek(ahead).kind == Tok::Ident && peek(ahead).text == kw;
  }
  bool isSym(const char *s) const { return peek().kind == Tok::Sym && peek().text == s; }
  bool isName() const { return peek().kind == Tok::Ident && !kKeywords.count(peek().text); }

  const Token &next() {
    const Token &t = peek();
    if (pos_ + 1 < toks_.size())
      ++pos_;
    return t;
  }

  [[noreturn]] void fail(const std::string &msg) const { throw ParseError(peek().span, msg); }

  const Token &keyword(const char *kw) {
    if (!isKeyword(kw))
      fail(std::string("expected '") + kw + "', found " + describe(peek()));
    return next();
  }
  const Token &sym(const char *s) {
    if (!isSym(s))
      fail(std::string("expected '") + s + "', found " + describe(peek()));
    return next();
  }
  const Token &name(const char *what) {
    if (!isName())
      fail(std::string("expected ") + what + ", found " + describe(peek()));
    return next();
  }
  Relation rel() {
    if (peek().kind != Tok::Rel)
      fail("expected a relation, found " + describe(peek()));
    return next().rel;
  }

  static std::string describe(const Token &t) {
    if (t.kind == Tok::End)
      return "end of input";
    return "'" + t.text + "'";
  }

private:
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

template <typename Map>
std::uint32_t lookup(const Map &m, const Token &tok, const char *what) {
  auto it = m.find(tok.text);
  if (it == m.end())
    throw ParseError(tok.span, std::string("unknown ") + what + " '" + tok.text + "'");
  return it->second;
}

template <typename Vec>
std::unordered_map<std::string, std::uint32_t> declareAll(Cursor &cur, Vec &names, const char *what) {
  std::unordered_map<std::string, std::uint32_t> ids;
  for (std::uint32_t i = 0; i < names.size(); ++i)
    ids.emplace(names[i], i);
  while (cur.isName()) {
    const Token &t = cur.next();
    if (!ids.emplace(t.text, static_cast<std::uint32_t>(names.size())).second)
      throw ParseError(t.span, std::string("duplicate ") + what + " '" + t.text + "'");
    names.push_back(t.text);
  }
  return ids;
}

std::string joined(const std::vector<std::string> &names) {
  std::string out;
  for (const auto &n : names)
    out += " " + n;
  return out;
}

} // namespace

Program parseProgram(std::string_view text) {
  Cursor cur(text);
  const SourceSpan start = cur.peek().span;
  cur.keyword("domain");
  cur.keyword("nat");

  ProgramBuilder b;
  std::unordered_map<std::string, SourceSpan> varSpans;
  while (cur.isKeyword("vars")) {
    cur.next();
    while (cur.isName()) {
      const Token &t = cur.next();
      if (varSpans.count(t.text))
        throw ParseError(t.span, "duplicate variable '" + t.text + "'");
      varSpans.emplace(t.text, t.span);
      b.var(t.text);
    }
  }

  if (!cur.isKeyword("thread"))
    cur.fail("expected 'thread', found " + Cursor::describe(cur.peek()));

  while (cur.isKeyword("thread")) {
    cur.next();
    const Token &tname = cur.name("a thread name");
    if (b.peek().findThread(tname.text))
      throw ParseError(tname.span, "duplicate thread '" + tname.text + "'");
    cur.sym("{");
    cur.keyword("regs");
    std::vector<Token> regToks;
    while (cur.isName())
      regToks.push_back(cur.next());
    cur.keyword("init");
    const Token &init = cur.name("an initial state");
    const ThreadId t = b.thread(tname.text, init.text);
    std::set<std::string> own;
    for (const auto &rt : regToks) {
      if (!own.insert(rt.text).second)
        throw ParseError(rt.span, "duplicate register '" + rt.text + "'");
      b.reg(t, rt.text);
    }

    auto regRef = [&]() -> RegId {
      const Token &rt = cur.name("a register");
      auto id = b.findReg(rt.text);
      if (!id)
        throw ParseError(rt.span, "unknown register '" + rt.text + "'");
      return *id;
    };
    auto varRef = [&]() -> VarId {
      const Token &vt = cur.name("a variable");
      auto id = b.peek().findVar(vt.text);
      if (!id)
        throw ParseError(vt.span, "unknown variable '" + vt.text + "'");
      return *id;
    };

    while (!cur.isSym("}")) {
      const Token &from = cur.name("a state or '}'");
      cur.sym("->");
      const Token &to = cur.name("a state");
      cur.sym(":");
      Op op;
      if (cur.isKeyword("assume")) {
        cur.next();
        const RegId a = regRef();
        const Relation rel = cur.rel();
        const RegId c = regRef();
        op = Op::guard(rel, a, c);
      } else if (cur.isKeyword("read")) {
        cur.next();
        const VarId x = varRef();
        op = Op::read(x, regRef());
      } else if (cur.isKeyword("write")) {
        cur.next();
        const VarId x = varRef();
        op = Op::write(x, regRef());
      } else if (cur.isKeyword("arw")) {
        cur.next();
        const VarId x = varRef();
        const RegId r1 = regRef();
        op = Op::arw(x, r1, regRef());
      } else {
        const RegId dst = regRef();
        cur.sym(":=");
        if (cur.isSym("*")) {
          cur.next();
          op = Op::newValue(dst);
        } else {
          op = Op::assign(dst, regRef());
        }
      }
      b.add(t, from.text, op, to.text);
    }
    cur.sym("}");
  }

  if (cur.isKeyword("target")) {
    cur.next();
    const Token &tt = cur.name("a thread");
    cur.sym(":");
    const Token &st = cur.name("a state");
    auto tid = b.peek().findThread(tt.text);
    if (!tid)
      throw ParseError(tt.span, "unknown thread '" + tt.text + "'");
    if (!b.peek().findState(*tid, st.text))
      throw ParseError(st.span, "thread '" + tt.text + "' has no state '" + st.text + "'");
    b.setTarget(*tid, st.text);
  }
  if (!cur.atEnd())
    cur.fail("unexpected " + Cursor::describe(cur.peek()));

  Program p = b.build();
  auto diags = validate(p);
  if (!diags.empty())
    throw ParseError({start.line, start.column, start.length}, diags.front().message);
  return p;
}

std::string renderProgram(const Program &p) {
  std::ostringstream os;
  os << "domain nat\n";
  if (!p.vars.empty())
    os << "vars" << joined(p.vars) << "\n";
  for (ThreadId t = 0; t < p.threads.size(); ++t) {
    const auto &th = p.threads[t];
    os << "\nthread " << th.name << " {\n  regs";
    for (RegId r : th.regs)
      os << ' ' << p.regNames[r];
    os << "\n  init " << th.states[th.init] << "\n";
    for (const auto &tr : th.transitions)
      os << "  " << th.states[tr.from] << " -> " << th.states[tr.to] << " : "
         << p.describe(t, tr.op) << "\n";
    os << "}\n";
  }
  if (p.target)
    os << "\ntarget " << p.threads[p.target->thread].name << " : "
       << p.threads[p.target->thread].states[p.target->state] << "\n";
  return os.str();
}

std::vector<std::string> validateDfa(const Dfa &d) {
  std::vector<std::string> out;
  if (d.states.empty())
    out.push_back("automaton has no states");
  if (d.init >= d.states.size())
    out.push_back("initial state out of range");
  for (auto f : d.finals)
    if (f >= d.states.size())
      out.push_back("final state out of range");
  for (const auto &e : d.transitions)
    if (e.from >= d.states.size() || e.to >= d.states.size() || e.letter >= d.alphabet.size())
      out.push_back("transition references an undeclared state or letter");
  return out;
}

Dfa parseDfa(std::string_view text) {
  Cursor cur(text);
  Dfa d;
  cur.keyword("dfa");
  cur.keyword("alphabet");
  const auto letters = declareAll(cur, d.alphabet, "letter");
  cur.keyword("states");
  const auto states = declareAll(cur, d.states, "state");
  if (d.states.empty())
    cur.fail("an automaton needs at least one state");
  cur.keyword("init");
  d.init = lookup(states, cur.name("a state"), "state");
  if (cur.isKeyword("final")) {
    cur.next();
    std::set<std::uint32_t> seen;
    // a name followed by '->' already starts the first transition
    while (cur.isName() && !(cur.peek(1).kind == Tok::Sym && cur.peek(1).text == "->")) {
      const Token &t = cur.next();
      const auto s = lookup(states, t, "state");
      if (!seen.insert(s).second)
        throw ParseError(t.span, "duplicate final state '" + t.text + "'");
      d.finals.push_back(s);
    }
  }
  while (!cur.atEnd()) {
    const auto from = lookup(states, cur.name("a state"), "state");
    cur.sym("->");
    const auto to = lookup(states, cur.name("a state"), "state");
    cur.sym(":");
    const auto a = lookup(letters, cur.name("a letter"), "letter");
    d.transitions.push_back({from, a, to});
  }
  return d;
}

std::string renderDfa(const Dfa &d) {
  std::ostringstream os;
  os << "dfa\nalphabet" << joined(d.alphabet) << "\nstates" << joined(d.states) << "\ninit "
     << d.states[d.init] << "\nfinal";
  for (auto f : d.finals)
    os << ' ' << d.states[f];
  os << "\n";
  for (const auto &e : d.transitions)
    os << d.states[e.from] << " -> " << d.states[e.to] << " : " << d.alphabet[e.letter] << "\n";
  return os.str();
}

std::vector<std::string> validateDlcs(const DlcsModel &m) {
  std::vector<std::string> out;
  if (m.states.empty())
    out.push_back("model has no states");
  if (m.init >= m.states.size())
    out.push_back("initial state out of range");
  if (m.target && *m.target >= m.states.size())
    out.push_back("target state out of range");
  for (const auto &e : m.transitions) {
    if (e.from >= m.states.size() || e.to >= m.states.size())
      out.push_back("transition endpoint out of range");
    if (e.op.x >= m.vars.size())
      out.push_back("transition references an undeclared variable");
    const bool binary = e.op.kind == DlcsOpKind::Assign || e.op.kind == DlcsOpKind::Eq ||
                        e.op.kind == DlcsOpKind::Neq;
    if (binary && e.op.y >= m.vars.size())
      out.push_back("transition references an undeclared variable");
    const bool channel = e.op.kind == DlcsOpKind::Send || e.op.kind == DlcsOpKind::Recv;
    if (channel && e.op.letter >= m.alphabet.size())
      out.push_back("transition references an undeclared letter");
  }
  return out;
}

DlcsModel parseDlcs(std::string_view text) {
  Cursor cur(text);
  DlcsModel m;
  cur.keyword("dlcs");
  cur.keyword("states");
  const auto states = declareAll(cur, m.states, "state");
  if (m.states.empty())
    cur.fail("a model needs at least one state");
  cur.keyword("vars");
  const auto vars = declareAll(cur, m.vars, "variable");
  cur.keyword("alphabet");
  const auto letters = declareAll(cur, m.alphabet, "letter");
  cur.keyword("init");
  m.init = lookup(states, cur.name("a state"), "state");
  while (!cur.atEnd() && !cur.isKeyword("target")) {
    const auto from = lookup(states, cur.name("a state"), "state");
    cur.sym("->");
    const auto to = lookup(states, cur.name("a state"), "state");
    cur.sym(":");
    DlcsOp op;
    if (cur.isKeyword("assume")) {
      cur.next();
      op.x = lookup(vars, cur.name("a variable"), "variable");
      const Token &relTok = cur.peek();
      const Relation rel = cur.rel();
      if (rel == Relation::eq())
        op.kind = DlcsOpKind::Eq;
      else if (rel == Relation::neq())
        op.kind = DlcsOpKind::Neq;
      else
        throw ParseError(relTok.span, "channel systems only compare with = and !=");
      op.y = lookup(vars, cur.name("a variable"), "variable");
    } else if (cur.isKeyword("send") || cur.isKeyword("recv")) {
      op.kind = cur.isKeyword("send") ? DlcsOpKind::Send : DlcsOpKind::Recv;
      cur.next();
      op.letter = lookup(letters, cur.name("a letter"), "letter");
      op.x = lookup(vars, cur.name("a variable"), "variable");
    } else {
      op.x = lookup(vars, cur.name("a variable"), "variable");
      cur.sym(":=");
      if (cur.isSym("*")) {
        cur.next();
        op.kind = DlcsOpKind::Fresh;
      } else {
        op.kind = DlcsOpKind::Assign;
        op.y = lookup(vars, cur.name("a variable"), "variable");
      }
    }
    m.transitions.push_back({from, op, to});
  }
  if (cur.isKeyword("target")) {
    cur.next();
    m.target = lookup(states, cur.name("a state"), "state");
  }
  if (!cur.atEnd())
    cur.fail("unexpected " + Cursor::describe(cur.peek()));
  return m;
}

std::string renderDlcs(const DlcsModel &m) {
  std::ostringstream os;
  os << "dlcs\nstates" << joined(m.states) << "\nvars" << joined(m.vars) << "\nalphabet"
     << joined(m.alphabet) << "\ninit " << m.states[m.init] << "\n";
  for (const auto &e : m.transitions) {
    os << m.states[e.from] << " -> " << m.states[e.to] << " : ";
    const auto &op = e.op;
    switch (op.kind) {
    case DlcsOpKind::Assign:
      os << m.vars[op.x] << " := " << m.vars[op.y];
      break;
    case DlcsOpKind::Fresh:
      os << m.vars[op.x] << " := *";
      break;
    case DlcsOpKind::Eq:
      os << "assume " << m.vars[op.x] << " = " << m.vars[op.y];
      break;
    case DlcsOpKind::Neq:
      os << "assume " << m.vars[op.x] << " != " << m.vars[op.y];
      break;
    case DlcsOpKind::Send:
      os << "send " << m.alphabet[op.letter] << ' ' << m.vars[op.x];
      break;
    case DlcsOpKind::Recv:
      os << "recv " << m.alphabet[op.letter] << ' ' << m.vars[op.x];
      break;
    }
    os << "\n";
  }
  if (m.target)
    os << "target " << m.states[*m.target] << "\n";
  return os.str();
}

} // namespace tsocb
