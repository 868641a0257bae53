// Recursive-descent parser for the surface language. Precedence, loosest
// first: sequencing, binding forms (let, fun, if, while, case, try), the
// assignments `:=` and `<-`, `||`, `&&`, comparisons, `+ -`, `* / mod`,
// prefix `- not !`, application and the keyword operators (ref, raise, fst,
// snd, inl, inr), indexing, atoms.

#include <fmt/format.h>

#include <functional>

#include "itml/frontend.hpp"
#include "lexer.hpp"

namespace itml {

namespace {

using detail::Tok;
using detail::Token;
using K = SNode::Kind;

bool is_structural(K k) {
  switch (k) {
    case K::Pair:
    case K::Fst:
    case K::Snd:
    case K::Inl:
    case K::Inr:
    case K::Unary:
    case K::Binary:
    case K::ListLit:
    case K::Return: return true;
    default: return false;
  }
}

bool is_leaf_pure(K k) {
  switch (k) {
    case K::Hole:
    case K::Var:
    case K::Unit:
    case K::Bool:
    case K::Int:
    case K::Float:
    case K::Str:
    case K::Fun: return true;
    default: return false;
  }
}

class Parser {
 public:
  Parser(std::string_view src, const ParseOptions& options)
      : src_(src), toks_(detail::tokenize(src, options.core_names)) {}

  SNodeP program() {
    SNodeP root = seq();
    if (!at(Tok::End)) fail_expected("end of input");
    return root;
  }

 private:
  // ---- token handling ----

  const Token& peek(size_t ahead = 0) const { return toks_[std::min(k_ + ahead, toks_.size() - 1)]; }
  bool at(Tok t) const { return peek().kind == t; }

  Token take() {
    Token t = peek();
    if (k_ < toks_.size() - 1) ++k_;
    last_end_ = t.end;
    return t;
  }

  bool accept(Tok t) {
    if (!at(t)) return false;
    take();
    return true;
  }

  Token expect(Tok t) {
    if (!at(t)) fail_expected(std::string(detail::token_name(t)));
    return take();
  }

  [[noreturn]] void fail(const std::string& message, uint32_t at_offset) const {
    throw SyntaxError(message, position_of(src_, at_offset));
  }

  [[noreturn]] void fail_expected(const std::string& what) const {
    fail(fmt::format("expected {}, found {}", what, detail::token_name(peek().kind)), peek().begin);
  }

  // ---- node construction ----

  std::shared_ptr<SNode> make(K kind, uint32_t begin, std::vector<SNodeP> kids = {}) const {
    auto n = std::make_shared<SNode>();
    n->kind = kind;
    n->span = SourceSpan{begin, last_end_};
    n->kids = std::move(kids);
    if (is_leaf_pure(kind)) {
      n->pure = true;
    } else if (is_structural(kind)) {
      n->pure = true;
      for (const auto& c : n->kids) n->pure = n->pure && c->pure;
    } else {
      n->pure = false;
    }
    return n;
  }

  // ---- grammar ----

  static bool closes_sequence(Tok t) {
    switch (t) {
      case Tok::End:
      case Tok::RParen:
      case Tok::RBracket:
      case Tok::RArr:
      case Tok::In:
      case Tok::Then:
      case Tok::Else:
      case Tok::Do:
      case Tok::With:
      case Tok::Of:
      case Tok::Bar:
      case Tok::Comma: return true;
      default: return false;
    }
  }

  SNodeP seq() {
    uint32_t begin = peek().begin;
    std::vector<SNodeP> items{stmt()};
    while (at(Tok::Semi) || at(Tok::SemiSemi)) {
      take();
      if (closes_sequence(peek().kind)) break;
      items.push_back(stmt());
    }
    if (items.size() == 1) return items[0];
    return make(K::Seq, begin, std::move(items));
  }

  std::string binder() {
    if (accept(Tok::Underscore)) return "_";
    if (at(Tok::Ident) || at(Tok::AdminIdent)) return take().text;
    fail_expected("a variable name or '_'");
  }

  Param param() {
    Param p;
    if (at(Tok::LParen)) {
      take();
      if (accept(Tok::RParen)) {
        p.first = "_";
        return p;
      }
      p.first = binder();
      if (accept(Tok::Comma)) {
        p.is_pair = true;
        p.second = binder();
      }
      expect(Tok::RParen);
      return p;
    }
    p.first = binder();
    return p;
  }

  bool starts_param() const {
    return at(Tok::Ident) || at(Tok::AdminIdent) || at(Tok::Underscore) || at(Tok::LParen);
  }

  void arrow() {
    if (!accept(Tok::Arrow) && !accept(Tok::FatArrow)) fail_expected("'->' or '=>'");
  }

  SNodeP function(uint32_t begin, std::string name) {
    std::vector<Param> params;
    while (starts_param()) params.push_back(param());
    if (params.empty()) fail_expected("a parameter");
    arrow();
    SNodeP body = seq();
    auto n = make(K::Fun, begin, {body});
    n->name = std::move(name);
    n->params = std::move(params);
    return n;
  }

  SNodeP stmt() {
    uint32_t begin = peek().begin;
    switch (peek().kind) {
      case Tok::Let: {
        take();
        std::string x = binder();
        expect(Tok::Equals);
        SNodeP rhs = seq();
        expect(Tok::In);
        SNodeP body = seq();
        auto n = make(K::Let, begin, {rhs, body});
        n->name = std::move(x);
        return n;
      }
      case Tok::Fun: take(); return function(begin, "_");
      case Tok::Rec: {
        take();
        std::string f = binder();
        return function(begin, std::move(f));
      }
      case Tok::If: {
        take();
        SNodeP c = seq();
        expect(Tok::Then);
        SNodeP t = stmt();
        std::vector<SNodeP> kids{c, t};
        if (accept(Tok::Else)) kids.push_back(stmt());
        return make(K::If, begin, std::move(kids));
      }
      case Tok::While: {
        take();
        SNodeP c = seq();
        expect(Tok::Do);
        // Like let and fun bodies, a loop body extends as far as possible.
        SNodeP body = seq();
        return make(K::While, begin, {c, body});
      }
      case Tok::Case: {
        take();
        SNodeP e = seq();
        expect(Tok::Of);
        accept(Tok::Bar);
        expect(Tok::Inl);
        std::string x = binder();
        arrow();
        SNodeP left = stmt();
        expect(Tok::Bar);
        expect(Tok::Inr);
        std::string y = binder();
        arrow();
        SNodeP right = stmt();
        auto n = make(K::Case, begin, {e, left, right});
        n->name = std::move(x);
        n->name2 = std::move(y);
        return n;
      }
      case Tok::Try: {
        take();
        SNodeP m = seq();
        expect(Tok::With);
        std::string x = binder();
        arrow();
        SNodeP h = stmt();
        auto n = make(K::Try, begin, {m, h});
        n->name = std::move(x);
        return n;
      }
      case Tok::Return: {
        take();
        SNodeP e = disjunction();
        return make(K::Return, begin, {e});
      }
      default: return assignment();
    }
  }

  bool starts_binding_form() const {
    switch (peek().kind) {
      case Tok::Let:
      case Tok::Fun:
      case Tok::Rec:
      case Tok::If:
      case Tok::While:
      case Tok::Case:
      case Tok::Try: return true;
      default: return false;
    }
  }

  SNodeP assignment() {
    uint32_t begin = peek().begin;
    SNodeP lhs = disjunction();
    if (at(Tok::ColonEq)) {
      take();
      SNodeP rhs = starts_binding_form() ? stmt() : disjunction();
      return make(K::Assign, begin, {lhs, rhs});
    }
    if (at(Tok::LeftArrow)) {
      if (lhs->kind != K::Index) fail("'<-' needs an indexed array on its left", peek().begin);
      take();
      SNodeP rhs = starts_binding_form() ? stmt() : disjunction();
      return make(K::SetIndex, begin, {lhs->kids[0], lhs->kids[1], rhs});
    }
    return lhs;
  }

  SNodeP binary_node(PrimOp op, uint32_t begin, SNodeP a, SNodeP b) {
    auto n = make(K::Binary, begin, {std::move(a), std::move(b)});
    n->op = op;
    return n;
  }

  SNodeP disjunction() {
    uint32_t begin = peek().begin;
    SNodeP a = conjunction();
    while (accept(Tok::OrOr)) a = binary_node(PrimOp::Or, begin, a, conjunction());
    return a;
  }

  SNodeP conjunction() {
    uint32_t begin = peek().begin;
    SNodeP a = comparison();
    while (accept(Tok::AndAnd)) a = binary_node(PrimOp::And, begin, a, comparison());
    return a;
  }

  SNodeP comparison() {
    uint32_t begin = peek().begin;
    SNodeP a = additive();
    PrimOp op;
    switch (peek().kind) {
      case Tok::Lt: op = PrimOp::Lt; break;
      case Tok::Le: op = PrimOp::Le; break;
      case Tok::Gt: op = PrimOp::Gt; break;
      case Tok::Ge: op = PrimOp::Ge; break;
      case Tok::EqEq: op = PrimOp::Eq; break;
      case Tok::Ne: op = PrimOp::Ne; break;
      default: return a;
    }
    take();
    return binary_node(op, begin, a, additive());
  }

  SNodeP additive() {
    uint32_t begin = peek().begin;
    SNodeP a = multiplicative();
    for (;;) {
      if (accept(Tok::Plus)) {
        a = binary_node(PrimOp::Add, begin, a, multiplicative());
      } else if (accept(Tok::Minus)) {
        a = binary_node(PrimOp::Sub, begin, a, multiplicative());
      } else {
        return a;
      }
    }
  }

  SNodeP multiplicative() {
    uint32_t begin = peek().begin;
    SNodeP a = prefix();
    for (;;) {
      if (accept(Tok::Star)) {
        a = binary_node(PrimOp::Mul, begin, a, prefix());
      } else if (at(Tok::Slash) || at(Tok::Mod)) {
        DivOp op = take().kind == Tok::Slash ? DivOp::Div : DivOp::Mod;
        SNodeP b = prefix();
        auto n = make(K::Div, begin, {a, b});
        n->div = op;
        a = n;
      } else {
        return a;
      }
    }
  }

  // A minus directly followed by a numeral is a negative literal.
  SNodeP negative(uint32_t begin, const std::function<SNodeP()>& operand) {
    if (at(Tok::Int)) {
      Token t = take();
      auto n = make(K::Int, begin);
      n->i = t.int_overflow ? t.int_value : -t.int_value;
      return n;
    }
    if (at(Tok::Float)) {
      Token t = take();
      auto n = make(K::Float, begin);
      n->f = -t.float_value;
      return n;
    }
    auto n = make(K::Unary, begin, {operand()});
    n->op = PrimOp::Neg;
    n->span.end = last_end_;
    return n;
  }

  SNodeP prefix() {
    uint32_t begin = peek().begin;
    if (accept(Tok::Minus)) return negative(begin, [&] { return prefix(); });
    if (accept(Tok::Not)) {
      SNodeP a = prefix();
      auto n = make(K::Unary, begin, {a});
      n->op = PrimOp::Not;
      return n;
    }
    if (accept(Tok::Bang)) {
      SNodeP a = prefix();
      return make(K::Deref, begin, {a});
    }
    return application();
  }

  // Operand of a keyword operator such as `ref` or `inl`.
  SNodeP keyword_operand() {
    uint32_t begin = peek().begin;
    if (accept(Tok::Minus)) return negative(begin, [&] { return keyword_operand(); });
    if (accept(Tok::Not)) {
      SNodeP a = keyword_operand();
      auto n = make(K::Unary, begin, {a});
      n->op = PrimOp::Not;
      return n;
    }
    if (accept(Tok::Bang)) {
      SNodeP a = keyword_operand();
      return make(K::Deref, begin, {a});
    }
    return postfix();
  }

  bool starts_argument() const {
    switch (peek().kind) {
      case Tok::Ident:
      case Tok::AdminIdent:
      case Tok::Int:
      case Tok::Float:
      case Tok::Str:
      case Tok::True:
      case Tok::False:
      case Tok::LParen:
      case Tok::LBracket:
      case Tok::LArr:
      case Tok::Underscore:
      case Tok::Bang:
      case Tok::Array: return true;
      default: return false;
    }
  }

  SNodeP argument() {
    uint32_t begin = peek().begin;
    if (accept(Tok::Bang)) {
      SNodeP a = argument();
      return make(K::Deref, begin, {a});
    }
    return postfix();
  }

  SNodeP application() {
    uint32_t begin = peek().begin;
    K keyword;
    switch (peek().kind) {
      case Tok::Ref: keyword = K::Ref; break;
      case Tok::Raise: keyword = K::Raise; break;
      case Tok::Fst: keyword = K::Fst; break;
      case Tok::Snd: keyword = K::Snd; break;
      case Tok::Inl: keyword = K::Inl; break;
      case Tok::Inr: keyword = K::Inr; break;
      default: {
        SNodeP f = postfix();
        while (starts_argument()) {
          SNodeP a = argument();
          f = make(K::App, begin, {f, a});
        }
        return f;
      }
    }
    take();
    SNodeP a = keyword_operand();
    return make(keyword, begin, {a});
  }

  SNodeP postfix() {
    uint32_t begin = peek().begin;
    SNodeP a = atom();
    while (at(Tok::LBracket) && !peek().space_before) {
      take();
      SNodeP i = seq();
      expect(Tok::RBracket);
      a = make(K::Index, begin, {a, i});
    }
    return a;
  }

  // Elements separated by `,` or `;`, with an optional trailing separator.
  std::vector<SNodeP> elements(Tok close) {
    std::vector<SNodeP> out;
    while (!at(close)) {
      out.push_back(stmt());
      if (!accept(Tok::Comma) && !accept(Tok::Semi) && !accept(Tok::SemiSemi)) break;
    }
    expect(close);
    return out;
  }

  SNodeP atom() {
    uint32_t begin = peek().begin;
    switch (peek().kind) {
      case Tok::Ident:
      case Tok::AdminIdent: {
        Token t = take();
        auto n = make(K::Var, begin);
        n->name = t.text;
        return n;
      }
      case Tok::Int: {
        Token t = take();
        if (t.int_overflow) fail("integer literal out of range", t.begin);
        auto n = make(K::Int, begin);
        n->i = t.int_value;
        return n;
      }
      case Tok::Float: {
        Token t = take();
        auto n = make(K::Float, begin);
        n->f = t.float_value;
        return n;
      }
      case Tok::Str: {
        Token t = take();
        auto n = make(K::Str, begin);
        n->name = t.text;
        return n;
      }
      case Tok::True:
      case Tok::False: {
        bool v = take().kind == Tok::True;
        auto n = make(K::Bool, begin);
        n->b = v;
        return n;
      }
      case Tok::Underscore: take(); return make(K::Hole, begin);
      case Tok::LParen: {
        take();
        if (accept(Tok::RParen)) return make(K::Unit, begin);
        SNodeP e = seq();
        if (accept(Tok::Comma)) {
          std::vector<SNodeP> items{e, seq()};
          while (accept(Tok::Comma)) items.push_back(seq());
          expect(Tok::RParen);
          // (a, b, c) is (a, (b, c)).
          SNodeP tail = items.back();
          for (size_t k = items.size() - 1; k-- > 0;) {
            tail = make(K::Pair, k == 0 ? begin : items[k]->span.begin, {items[k], tail});
          }
          return tail;
        }
        expect(Tok::RParen);
        // The parentheses belong to the node they enclose.
        auto widened = std::make_shared<SNode>(*e);
        widened->span = SourceSpan{begin, last_end_};
        return widened;
      }
      case Tok::LBracket: {
        take();
        auto items = elements(Tok::RBracket);
        return make(K::ListLit, begin, std::move(items));
      }
      case Tok::LArr: {
        take();
        auto items = elements(Tok::RArr);
        return make(K::ArrayLit, begin, std::move(items));
      }
      case Tok::Array: {
        take();
        expect(Tok::LParen);
        SNodeP n = seq();
        expect(Tok::Comma);
        SNodeP init = seq();
        expect(Tok::RParen);
        return make(K::ArrayMake, begin, {n, init});
      }
      default: fail_expected("an expression");
    }
  }

  std::string_view src_;
  std::vector<Token> toks_;
  size_t k_ = 0;
  uint32_t last_end_ = 0;
};

}  // namespace

SurfaceProgram parse_program(std::string text, const ParseOptions& options) {
  SurfaceProgram p;
  p.source = std::move(text);
  p.root = Parser(p.source, options).program();
  return p;
}

}  // namespace itml
