// Text format for traces: s-expressions, one trace node per line.

#include <fmt/format.h>

#include <cmath>
#include <charconv>

#include "itml/interpreter.hpp"

namespace itml {

namespace {

// Deep traces would otherwise produce quadratic amounts of indentation.
constexpr int kMaxIndentLevels = 32;

std::string prim_name(PrimOp op) { return op == PrimOp::Neg ? "neg" : std::string(op_symbol(op)); }

std::string float_atom(double f) {
  if (std::isnan(f)) return "(float nan)";
  if (std::isinf(f)) return f > 0 ? "(float inf)" : "(float -inf)";
  return format_float(f);
}

std::string arr_name(ArrOp op) { return op == ArrOp::Make ? "make" : op == ArrOp::Get ? "get" : "set"; }

std::string loc_atom(Location l) { return fmt::format("#{}", l); }

std::string opt_expr(const ExprP& e) { return e ? dump_expr(*e) : "-"; }

std::string trace_head(const Trace& t) {
  using K = Trace::Kind;
  switch (t.kind) {
    case K::Hole: {
      std::string cells;
      for (const Cell& c : t.writes.cells()) {
        if (!cells.empty()) cells += ' ';
        cells += render_cell(c);
      }
      return fmt::format("hole {} {{{}}}", outcome_name(t.outcome), cells);
    }
    case K::Ret: return "ret " + dump_expr(*t.e1);
    case K::LetS: return "let_s " + t.x;
    case K::LetF: return "let_f " + t.x;
    case K::App: return fmt::format("app {} {} {} {}", dump_expr(*t.e1), dump_expr(*t.e2), t.x, t.y);
    case K::CaseL: return fmt::format("case_l {} {} {}", dump_expr(*t.e1), t.x, t.y);
    case K::CaseR: return fmt::format("case_r {} {} {}", dump_expr(*t.e1), t.x, t.y);
    case K::IfT: return "if_t " + dump_expr(*t.e1);
    case K::IfF: return "if_f " + dump_expr(*t.e1);
    case K::Raise: return "raise " + dump_expr(*t.e1);
    case K::TryS: return "try_s " + t.x;
    case K::TryF: return "try_f " + t.x;
    case K::Ref: return fmt::format("ref {} {}", loc_atom(t.loc), dump_expr(*t.e1));
    case K::Assign: return fmt::format("assign {} {} {}", dump_expr(*t.e1), loc_atom(t.loc), dump_expr(*t.e2));
    case K::Deref: return fmt::format("deref {} {}", loc_atom(t.loc), dump_expr(*t.e1));
    case K::ArrMake:
      return fmt::format("array {} {} {} {}", loc_atom(t.loc), t.n, dump_expr(*t.e1), dump_expr(*t.e2));
    case K::ArrGet:
      return fmt::format("get {} {} {} {} {}", dump_expr(*t.e1), dump_expr(*t.e2), loc_atom(t.loc), t.n, t.idx);
    case K::ArrSet:
      return fmt::format("set {} {} {} {} {} {}", dump_expr(*t.e1), dump_expr(*t.e2), loc_atom(t.loc), t.n, t.idx,
                         dump_expr(*t.e3));
    case K::ArrFail:
      return fmt::format("arr_fail {} {} {} {} {} {} {}", arr_name(t.arr), loc_atom(t.loc), t.n, t.idx,
                         opt_expr(t.e1), opt_expr(t.e2), opt_expr(t.e3));
    case K::DivOk: return fmt::format("div_ok {} {} {}", op_symbol(t.div), dump_expr(*t.e1), dump_expr(*t.e2));
    case K::DivFail: return fmt::format("div_fail {} {} {}", op_symbol(t.div), dump_expr(*t.e1), dump_expr(*t.e2));
  }
  return "?";
}

void dump_node(const Trace& t, int depth, std::string& out) {
  out.append(size_t(2 * std::min(depth, kMaxIndentLevels)), ' ');
  out += '(';
  out += trace_head(t);
  for (const TraceP* child : {&t.t1, &t.t2}) {
    if (!*child) continue;
    out += '\n';
    dump_node(**child, depth + 1, out);
  }
  out += ')';
}

}  // namespace

std::string dump_expr(const Expr& e) {
  using K = Expr::Kind;
  switch (e.kind) {
    case K::Hole: return "_";
    case K::Var: return e.name;
    case K::Unit: return "()";
    case K::Bool: return e.b ? "true" : "false";
    case K::Int: return std::to_string(e.i);
    case K::Float: return float_atom(e.f);
    case K::Str: return quote_string(e.name);
    case K::Pair: return fmt::format("(pair {} {})", dump_expr(*e.e1), dump_expr(*e.e2));
    case K::Fst: return fmt::format("(fst {})", dump_expr(*e.e1));
    case K::Snd: return fmt::format("(snd {})", dump_expr(*e.e1));
    case K::Inl: return fmt::format("(inl {})", dump_expr(*e.e1));
    case K::Inr: return fmt::format("(inr {})", dump_expr(*e.e1));
    case K::Fun: return fmt::format("(fun {} {} {})", e.name, e.param, dump_comp(*e.body));
    case K::Prim:
      if (is_unary(e.op)) return fmt::format("(prim {} {})", prim_name(e.op), dump_expr(*e.e1));
      return fmt::format("(prim {} {} {})", prim_name(e.op), dump_expr(*e.e1), dump_expr(*e.e2));
  }
  return "?";
}

std::string dump_comp(const Comp& m) {
  using K = Comp::Kind;
  switch (m.kind) {
    case K::Hole: return "_";
    case K::Ret: return fmt::format("(return {})", dump_expr(*m.e1));
    case K::Let: return fmt::format("(let {} {} {})", m.x, dump_comp(*m.m1), dump_comp(*m.m2));
    case K::App: return fmt::format("(app {} {})", dump_expr(*m.e1), dump_expr(*m.e2));
    case K::Case:
      return fmt::format("(case {} {} {} {} {})", dump_expr(*m.e1), m.x, dump_comp(*m.m1), m.y, dump_comp(*m.m2));
    case K::If: return fmt::format("(if {} {} {})", dump_expr(*m.e1), dump_comp(*m.m1), dump_comp(*m.m2));
    case K::Raise: return fmt::format("(raise {})", dump_expr(*m.e1));
    case K::Try: return fmt::format("(try {} {} {})", dump_comp(*m.m1), m.x, dump_comp(*m.m2));
    case K::Ref: return fmt::format("(ref {})", dump_expr(*m.e1));
    case K::Assign: return fmt::format("(assign {} {})", dump_expr(*m.e1), dump_expr(*m.e2));
    case K::Deref: return fmt::format("(deref {})", dump_expr(*m.e1));
    case K::ArrMake: return fmt::format("(array {} {})", dump_expr(*m.e1), dump_expr(*m.e2));
    case K::ArrGet: return fmt::format("(get {} {})", dump_expr(*m.e1), dump_expr(*m.e2));
    case K::ArrSet: return fmt::format("(set {} {} {})", dump_expr(*m.e1), dump_expr(*m.e2), dump_expr(*m.e3));
    case K::Div: return fmt::format("(div {} {} {})", op_symbol(m.div), dump_expr(*m.e1), dump_expr(*m.e2));
  }
  return "?";
}

std::string dump_trace(const Trace& t) {
  std::string out;
  dump_node(t, 0, out);
  out += '\n';
  return out;
}

// ---------------------------------------------------------------------------
// parsing
// ---------------------------------------------------------------------------

namespace {

struct Token {
  enum class Kind { Open, Close, LBrace, RBrace, Atom, String, End } kind;
  std::string text;
  size_t offset = 0;
};

class SexpParser {
 public:
  explicit SexpParser(std::string_view text) : text_(text) { advance(); }

  ExprP expr() {
    if (tok_.kind == Token::Kind::Atom) {
      std::string a = take_atom();
      return atom_expr(a);
    }
    if (tok_.kind == Token::Kind::String) return Expr::str(take_string());
    expect(Token::Kind::Open, "'('");
    if (tok_.kind == Token::Kind::Close) {
      advance();
      return Expr::unit();
    }
    std::string head = take_atom();
    ExprP r;
    if (head == "pair") {
      ExprP a = expr();
      r = Expr::pair(a, expr());
    } else if (head == "fst") {
      r = Expr::fst(expr());
    } else if (head == "snd") {
      r = Expr::snd(expr());
    } else if (head == "inl") {
      r = Expr::inl(expr());
    } else if (head == "inr") {
      r = Expr::inr(expr());
    } else if (head == "fun") {
      std::string f = take_atom();
      std::string x = take_atom();
      r = Expr::fun(f, x, comp());
    } else if (head == "prim") {
      PrimOp op = prim_op(take_atom());
      ExprP a = expr();
      r = is_unary(op) ? Expr::prim(op, a) : Expr::prim(op, a, expr());
    } else if (head == "float") {
      std::string v = take_atom();
      if (v == "nan") r = Expr::floating(std::nan(""));
      else if (v == "inf") r = Expr::floating(HUGE_VAL);
      else if (v == "-inf") r = Expr::floating(-HUGE_VAL);
      else fail("bad float literal");
    } else {
      fail("unknown expression form '" + head + "'");
    }
    expect(Token::Kind::Close, "')'");
    return r;
  }

  CompP comp() {
    if (tok_.kind == Token::Kind::Atom && tok_.text == "_") {
      advance();
      return Comp::hole();
    }
    expect(Token::Kind::Open, "'('");
    std::string head = take_atom();
    CompP r;
    if (head == "return") {
      r = Comp::ret(expr());
    } else if (head == "let") {
      std::string x = take_atom();
      CompP m1 = comp();
      r = Comp::let(x, m1, comp());
    } else if (head == "app") {
      ExprP a = expr();
      r = Comp::app(a, expr());
    } else if (head == "case") {
      ExprP e = expr();
      std::string x = take_atom();
      CompP m1 = comp();
      std::string y = take_atom();
      r = Comp::case_of(e, x, m1, y, comp());
    } else if (head == "if") {
      ExprP e = expr();
      CompP m1 = comp();
      r = Comp::if_then(e, m1, comp());
    } else if (head == "raise") {
      r = Comp::raise(expr());
    } else if (head == "try") {
      CompP m1 = comp();
      std::string x = take_atom();
      r = Comp::try_with(m1, x, comp());
    } else if (head == "ref") {
      r = Comp::ref(expr());
    } else if (head == "assign") {
      ExprP a = expr();
      r = Comp::assign(a, expr());
    } else if (head == "deref") {
      r = Comp::deref(expr());
    } else if (head == "array") {
      ExprP a = expr();
      r = Comp::arr_make(a, expr());
    } else if (head == "get") {
      ExprP a = expr();
      r = Comp::arr_get(a, expr());
    } else if (head == "set") {
      ExprP a = expr();
      ExprP b = expr();
      r = Comp::arr_set(a, b, expr());
    } else if (head == "div") {
      DivOp op = div_op(take_atom());
      ExprP a = expr();
      r = Comp::divide(op, a, expr());
    } else {
      fail("unknown computation form '" + head + "'");
    }
    expect(Token::Kind::Close, "')'");
    return r;
  }

  TraceP trace() {
    expect(Token::Kind::Open, "'('");
    std::string head = take_atom();
    TraceP r;
    if (head == "hole") {
      Outcome k = outcome(take_atom());
      expect(Token::Kind::LBrace, "'{'");
      std::vector<Cell> cells;
      while (tok_.kind == Token::Kind::Atom) cells.push_back(cell(take_atom()));
      expect(Token::Kind::RBrace, "'}'");
      r = Trace::hole(LocationSet::of(std::move(cells)), k);
    } else if (head == "ret") {
      r = Trace::ret(expr());
    } else if (head == "let_s") {
      std::string x = take_atom();
      TraceP t1 = trace();
      r = Trace::let_s(x, t1, trace());
    } else if (head == "let_f") {
      std::string x = take_atom();
      r = Trace::let_f(x, trace());
    } else if (head == "app") {
      ExprP a = expr();
      ExprP b = expr();
      std::string f = take_atom();
      std::string x = take_atom();
      r = Trace::app(a, b, f, x, trace());
    } else if (head == "case_l" || head == "case_r") {
      ExprP e = expr();
      std::string x = take_atom();
      std::string y = take_atom();
      TraceP body = trace();
      r = head == "case_l" ? Trace::case_inl(e, x, body, y) : Trace::case_inr(e, x, y, body);
    } else if (head == "if_t" || head == "if_f") {
      ExprP e = expr();
      TraceP body = trace();
      r = head == "if_t" ? Trace::if_true(e, body) : Trace::if_false(e, body);
    } else if (head == "raise") {
      r = Trace::raise(expr());
    } else if (head == "try_s") {
      std::string x = take_atom();
      r = Trace::try_s(x, trace());
    } else if (head == "try_f") {
      std::string x = take_atom();
      TraceP t1 = trace();
      r = Trace::try_f(t1, x, trace());
    } else if (head == "ref") {
      Location l = location(take_atom());
      r = Trace::ref(l, expr());
    } else if (head == "assign") {
      ExprP a = expr();
      Location l = location(take_atom());
      r = Trace::assign(a, l, expr());
    } else if (head == "deref") {
      Location l = location(take_atom());
      r = Trace::deref(l, expr());
    } else if (head == "array") {
      Location l = location(take_atom());
      int64_t n = integer(take_atom());
      ExprP a = expr();
      r = Trace::arr_make(l, n, a, expr());
    } else if (head == "get") {
      ExprP a = expr();
      ExprP b = expr();
      Location l = location(take_atom());
      int64_t n = integer(take_atom());
      r = Trace::arr_get(a, b, l, n, integer(take_atom()));
    } else if (head == "set") {
      ExprP a = expr();
      ExprP b = expr();
      Location l = location(take_atom());
      int64_t n = integer(take_atom());
      int64_t i = integer(take_atom());
      r = Trace::arr_set(a, b, l, n, i, expr());
    } else if (head == "arr_fail") {
      ArrOp op = arr_op(take_atom());
      Location l = location(take_atom());
      int64_t n = integer(take_atom());
      int64_t i = integer(take_atom());
      ExprP a = opt_expr();
      ExprP b = opt_expr();
      r = Trace::arr_fail(op, a, b, opt_expr(), l, n, i);
    } else if (head == "div_ok" || head == "div_fail") {
      DivOp op = div_op(take_atom());
      ExprP a = expr();
      ExprP b = expr();
      r = head == "div_ok" ? Trace::div_ok(op, a, b) : Trace::div_fail(op, a, b);
    } else {
      fail("unknown trace form '" + head + "'");
    }
    expect(Token::Kind::Close, "')'");
    return r;
  }

  void finish() {
    if (tok_.kind != Token::Kind::End) fail("trailing input");
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw Error(fmt::format("trace text, offset {}: {}", tok_.offset, what));
  }

  void advance() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    tok_.offset = pos_;
    tok_.text.clear();
    if (pos_ >= text_.size()) {
      tok_.kind = Token::Kind::End;
      return;
    }
    char c = text_[pos_];
    switch (c) {
      case '(': tok_.kind = Token::Kind::Open; ++pos_; return;
      case ')': tok_.kind = Token::Kind::Close; ++pos_; return;
      case '{': tok_.kind = Token::Kind::LBrace; ++pos_; return;
      case '}': tok_.kind = Token::Kind::RBrace; ++pos_; return;
      case '"': {
        tok_.kind = Token::Kind::String;
        ++pos_;
        while (pos_ < text_.size() && text_[pos_] != '"') {
          char d = text_[pos_++];
          if (d == '\\' && pos_ < text_.size()) {
            char esc = text_[pos_++];
            d = esc == 'n' ? '\n' : esc == 't' ? '\t' : esc;
          }
          tok_.text += d;
        }
        if (pos_ >= text_.size()) fail("unterminated string");
        ++pos_;
        return;
      }
      default: break;
    }
    tok_.kind = Token::Kind::Atom;
    while (pos_ < text_.size()) {
      char d = text_[pos_];
      if (std::isspace(static_cast<unsigned char>(d)) || d == '(' || d == ')' || d == '{' || d == '}' || d == '"') break;
      tok_.text += d;
      ++pos_;
    }
  }

  void expect(Token::Kind k, const char* what) {
    if (tok_.kind != k) fail(std::string("expected ") + what);
    advance();
  }

  std::string take_atom() {
    if (tok_.kind != Token::Kind::Atom) fail("expected a name or literal");
    std::string s = std::move(tok_.text);
    advance();
    return s;
  }

  std::string take_string() {
    std::string s = std::move(tok_.text);
    advance();
    return s;
  }

  ExprP opt_expr() {
    if (tok_.kind == Token::Kind::Atom && tok_.text == "-") {
      advance();
      return nullptr;
    }
    return expr();
  }

  ExprP atom_expr(const std::string& a) {
    if (a == "_") return Expr::hole();
    if (a == "true") return Expr::boolean(true);
    if (a == "false") return Expr::boolean(false);
    bool numeric = std::isdigit(static_cast<unsigned char>(a[0])) ||
                   (a.size() > 1 && a[0] == '-' && std::isdigit(static_cast<unsigned char>(a[1])));
    if (!numeric) return Expr::var(a);
    if (a.find_first_of(".eE") != std::string::npos) {
      try {
        size_t used = 0;
        double d = std::stod(a, &used);
        if (used == a.size()) return Expr::floating(d);
      } catch (const std::exception&) {
      }
      fail("bad float literal '" + a + "'");
    }
    return Expr::integer(integer(a));
  }

  int64_t integer(const std::string& a) const {
    int64_t v = 0;
    auto [p, ec] = std::from_chars(a.data(), a.data() + a.size(), v);
    if (ec != std::errc() || p != a.data() + a.size()) fail("bad integer '" + a + "'");
    return v;
  }

  Location location(const std::string& a) const {
    if (a.size() < 2 || a[0] != '#') fail("expected a location '#k'");
    int64_t v = integer(a.substr(1));
    if (v < 0 || v > int64_t(UINT32_MAX)) fail("location out of range");
    return Location(v);
  }

  Cell cell(const std::string& a) const {
    auto open = a.find('[');
    if (open == std::string::npos) return Cell{location(a), -1};
    if (a.back() != ']') fail("bad cell '" + a + "'");
    return Cell{location(a.substr(0, open)), integer(a.substr(open + 1, a.size() - open - 2))};
  }

  Outcome outcome(const std::string& a) const {
    if (a == "val") return Outcome::Val;
    if (a == "exn") return Outcome::Exn;
    fail("expected an outcome");
  }

  PrimOp prim_op(const std::string& a) const {
    static const std::pair<const char*, PrimOp> table[] = {
        {"+", PrimOp::Add}, {"-", PrimOp::Sub}, {"*", PrimOp::Mul},   {"<", PrimOp::Lt},   {"<=", PrimOp::Le},
        {">", PrimOp::Gt},  {">=", PrimOp::Ge}, {"==", PrimOp::Eq},   {"!=", PrimOp::Ne},  {"&&", PrimOp::And},
        {"||", PrimOp::Or}, {"not", PrimOp::Not}, {"neg", PrimOp::Neg}};
    for (const auto& [name, op] : table) {
      if (a == name) return op;
    }
    fail("unknown operator '" + a + "'");
  }

  DivOp div_op(const std::string& a) const {
    if (a == "/") return DivOp::Div;
    if (a == "mod") return DivOp::Mod;
    fail("expected '/' or 'mod'");
  }

  ArrOp arr_op(const std::string& a) const {
    if (a == "make") return ArrOp::Make;
    if (a == "get") return ArrOp::Get;
    if (a == "set") return ArrOp::Set;
    fail("expected an array operation");
  }

  std::string_view text_;
  size_t pos_ = 0;
  Token tok_{Token::Kind::End, {}, 0};
};

}  // namespace

TraceP parse_trace(std::string_view text) {
  SexpParser p(text);
  TraceP t = p.trace();
  p.finish();
  return t;
}

ExprP parse_expr_sexp(std::string_view text) {
  SexpParser p(text);
  ExprP e = p.expr();
  p.finish();
  return e;
}

CompP parse_comp_sexp(std::string_view text) {
  SexpParser p(text);
  CompP m = p.comp();
  p.finish();
  return m;
}

}  // namespace itml
