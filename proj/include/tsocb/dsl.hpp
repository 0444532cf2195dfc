#pragma once

#include "tsocb/program.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace tsocb {

struct SourceSpan {
  std::uint32_t line = 1;
  std::uint32_t column = 1;
  std::uint32_t length = 0;
};

class ParseError : public std::runtime_error {
public:
  ParseError(SourceSpan span, const std::string &msg)
      : std::runtime_error(std::to_string(span.line) + ":" + std::to_string(span.column) + ": " + msg),
        span_(span), detail_(msg) {}

  const SourceSpan &span() const { return span_; }
  const std::string &detail() const { return detail_; }

private:
  SourceSpan span_;
  std::string detail_;
};

/// A finite automaton over a named alphabet. Neither determinism nor
/// completeness is required; transitions only have to reference declared
/// states and letters.
struct Dfa {
  struct Edge {
    std::uint32_t from = 0;
    std::uint32_t letter = 0;
    std::uint32_t to = 0;
    friend bool operator==(const Edge &, const Edge &) = default;
  };

  std::vector<std::string> states;
  std::vector<std::string> alphabet;
  std::vector<Edge> transitions;
  std::uint32_t init = 0;
  std::vector<std::uint32_t> finals;

  friend bool operator==(const Dfa &, const Dfa &) = default;
};

enum class DlcsOpKind : std::uint8_t { Assign, Fresh, Eq, Neq, Send, Recv };

/// Operation of a lossy channel system with data. `x`/`y` index variables,
/// `letter` indexes the channel alphabet (Send/Recv only).
///   Assign  x := y      Fresh x := *
///   Eq      assume x = y    Neq assume x != y
///   Send    send a x    Recv recv a x
struct DlcsOp {
  DlcsOpKind kind = DlcsOpKind::Assign;
  std::uint32_t x = 0;
  std::uint32_t y = 0;
  std::uint32_t letter = 0;

  friend bool operator==(const DlcsOp &a, const DlcsOp &b);
};

struct DlcsModel {
  struct Edge {
    std::uint32_t from = 0;
    DlcsOp op;
    std::uint32_t to = 0;
    friend bool operator==(const Edge &, const Edge &) = default;
  };

  std::vector<std::string> states;
  std::vector<std::string> vars;
  std::vector<std::string> alphabet;
  std::vector<Edge> transitions;
  std::uint32_t init = 0;
  std::optional<std::uint32_t> target;

  std::optional<std::uint32_t> findState(std::string_view name) const;

  friend bool operator==(const DlcsModel &, const DlcsModel &) = default;
};

/// Checks that every index in the model is in range. Empty means valid.
std::vector<std::string> validateDlcs(const DlcsModel &m);
std::vector<std::string> validateDfa(const Dfa &d);

Program parseProgram(std::string_view text);
std::string renderProgram(const Program &p);

Dfa parseDfa(std::string_view text);
std::string renderDfa(const Dfa &d);

DlcsModel parseDlcs(std::string_view text);
std::string renderDlcs(const DlcsModel &m);

} // namespace tsocb
