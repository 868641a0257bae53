// Slicing criteria written as text, resolved against a recorded run.

#include <fmt/format.h>

#include "itml/frontend.hpp"
#include "itml/lattice.hpp"
#include "lexer.hpp"

namespace itml {

std::vector<std::pair<std::string, ValueP>> top_level_bindings(const RunRecord& r) {
  std::vector<std::pair<std::string, ValueP>> out;
  for (const auto& [x, v] : r.env.entries()) out.emplace_back(x, v);
  const Comp* m = r.program.get();
  const Trace* t = r.trace.get();
  while (m && t && m->kind == Comp::Kind::Let && t->kind == Trace::Kind::LetS) {
    if (m->x != "_" && t->bound) out.emplace_back(m->x, t->bound);
    m = m->m2.get();
    t = t->t2.get();
  }
  return out;
}

namespace {

using detail::Tok;
using detail::Token;

class CriterionParser {
 public:
  CriterionParser(std::string_view text, const RunRecord& r)
      : text_(text), toks_(tokenize(text)), run_(r), bindings_(top_level_bindings(r)) {}

  Criterion parse() {
    Criterion c = empty_criterion(run_);
    if (at(Tok::End)) return c;
    for (;;) {
      item(c);
      if (!accept(Tok::Comma)) break;
    }
    if (!at(Tok::End)) fail("expected ',' or end of criterion");
    return c;
  }

 private:
  static std::vector<Token> tokenize(std::string_view text) {
    try {
      return detail::tokenize(text, false);
    } catch (const SyntaxError& e) {
      throw CriterionError(fmt::format("criterion: {}", e.what()));
    }
  }

  const Token& peek() const { return toks_[std::min(k_, toks_.size() - 1)]; }
  bool at(Tok t) const { return peek().kind == t; }
  Token take() {
    Token t = peek();
    if (k_ < toks_.size() - 1) ++k_;
    return t;
  }
  bool accept(Tok t) {
    if (!at(t)) return false;
    take();
    return true;
  }
  [[noreturn]] void fail(const std::string& message) const {
    throw CriterionError(fmt::format("criterion, column {}: {}", peek().begin + 1, message));
  }
  void expect(Tok t) {
    if (!accept(t)) fail(fmt::format("expected {}", detail::token_name(t)));
  }
  std::string ident() {
    if (!at(Tok::Ident)) fail("expected a name");
    return take().text;
  }

  const ValueP& lookup(const std::string& x) const {
    for (auto it = bindings_.rbegin(); it != bindings_.rend(); ++it) {
      if (it->first == x) return it->second;
    }
    throw CriterionError(fmt::format("criterion: unknown name '{}'", x));
  }

  void demand(Criterion& c, Cell cell, const ValueP& v) {
    const ValueP& before = c.store.get(cell);
    try {
      c.store.set(cell, join(before, v));
    } catch (const UndefinedJoin&) {
      throw CriterionError(fmt::format("criterion: conflicting demands on {}", render_cell(cell)));
    }
  }

  void item(Criterion& c) {
    if (at(Tok::Ident) && peek().text == "result") {
      take();
      expect(Tok::Equals);
      std::string tag = ident();
      Outcome k;
      if (tag == "val") {
        k = Outcome::Val;
      } else if (tag == "exn") {
        k = Outcome::Exn;
      } else {
        fail("expected 'val' or 'exn'");
      }
      ValueP v = pattern();
      if (k != run_.result.outcome) {
        throw CriterionError(fmt::format("criterion: the run ended with {}, not {}",
                                         outcome_name(run_.result.outcome), outcome_name(k)));
      }
      try {
        c.result = Result{k, join(c.result.value, v)};
      } catch (const UndefinedJoin&) {
        throw CriterionError("criterion: conflicting demands on the result");
      }
      return;
    }
    if (accept(Tok::Bang)) {
      std::string x = ident();
      const ValueP& v = lookup(x);
      if (v->kind != Value::Kind::Loc) throw CriterionError(fmt::format("criterion: '{}' is not a reference", x));
      expect(Tok::Equals);
      demand(c, Cell{v->loc, -1}, pattern());
      return;
    }
    std::string x = ident();
    if (!at(Tok::LBracket)) fail(fmt::format("expected '!{}' or an indexed array such as '{}[0]'", x, x));
    ValueP v = lookup(x);
    std::string shown = x;
    Cell cell;
    bool first = true;
    while (accept(Tok::LBracket)) {
      bool negative = accept(Tok::Minus);
      if (!at(Tok::Int)) fail("expected an integer index");
      int64_t i = take().int_value;
      if (negative) i = -i;
      expect(Tok::RBracket);
      if (!first) v = run_.final_store.get(cell);
      first = false;
      if (v->kind != Value::Kind::Arr) throw CriterionError(fmt::format("criterion: '{}' is not an array", shown));
      if (i < 0 || i >= v->i) {
        throw CriterionError(
            fmt::format("criterion: index {} out of range for '{}' of length {}", i, shown, v->i));
      }
      cell = Cell{v->loc, i};
      shown += fmt::format("[{}]", i);
    }
    expect(Tok::Equals);
    demand(c, cell, pattern());
  }

  ValueP pattern() {
    switch (peek().kind) {
      case Tok::Underscore: take(); return Value::hole();
      case Tok::True: take(); return Value::boolean(true);
      case Tok::False: take(); return Value::boolean(false);
      case Tok::Str: return Value::str(take().text);
      case Tok::Int: {
        Token t = take();
        if (t.int_overflow) fail("integer out of range");
        return Value::integer(t.int_value);
      }
      case Tok::Float: return Value::floating(take().float_value);
      case Tok::Minus: {
        take();
        if (at(Tok::Int)) {
          Token t = take();
          return Value::integer(t.int_overflow ? t.int_value : -t.int_value);
        }
        if (at(Tok::Float)) return Value::floating(-take().float_value);
        fail("expected a number after '-'");
      }
      case Tok::Inl: take(); return Value::inl(pattern());
      case Tok::Inr: take(); return Value::inr(pattern());
      case Tok::LParen: {
        take();
        if (accept(Tok::RParen)) return Value::unit();
        std::vector<ValueP> items{pattern()};
        while (accept(Tok::Comma)) items.push_back(pattern());
        expect(Tok::RParen);
        ValueP v = items.back();
        for (size_t k = items.size() - 1; k-- > 0;) v = Value::pair(items[k], v);
        return v;
      }
      case Tok::LBracket: {
        // Lists, in the encoding used by the elaborator.
        take();
        std::vector<ValueP> items;
        while (!at(Tok::RBracket)) {
          items.push_back(pattern());
          if (!accept(Tok::Comma) && !accept(Tok::Semi)) break;
        }
        expect(Tok::RBracket);
        ValueP v = Value::inl(Value::unit());
        for (auto it = items.rbegin(); it != items.rend(); ++it) v = Value::inr(Value::pair(*it, v));
        return v;
      }
      default: fail("expected a value pattern");
    }
  }

  std::string_view text_;
  std::vector<Token> toks_;
  size_t k_ = 0;
  const RunRecord& run_;
  std::vector<std::pair<std::string, ValueP>> bindings_;
};

}  // namespace

Criterion parse_criterion(std::string_view text, const RunRecord& r) {
  Criterion c = CriterionParser(text, r).parse();
  try {
    validate_criterion(c, r);
  } catch (const ShapeMismatch& e) {
    throw CriterionError(fmt::format("criterion does not match the run: {}", e.what()));
  }
  return c;
}

}  // namespace itml
