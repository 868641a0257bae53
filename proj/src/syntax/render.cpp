#include <fmt/format.h>

#include "itml/syntax.hpp"

namespace itml {

std::string format_float(double v) {
  std::string s = fmt::format("{}", v);
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

std::string quote_string(std::string_view s) {
  std::string r = "\"";
  for (char c : s) {
    switch (c) {
      case '"': r += "\\\""; break;
      case '\\': r += "\\\\"; break;
      case '\n': r += "\\n"; break;
      case '\t': r += "\\t"; break;
      default: r += c;
    }
  }
  r += '"';
  return r;
}

std::string render_cell(Cell c) {
  if (c.is_element()) return fmt::format("#{}[{}]", c.loc, c.index);
  return fmt::format("#{}", c.loc);
}

namespace {

// Precedence levels, loosest first.
enum Level : int {
  kStmt = 0,
  kAssign = 1,
  kOr = 2,
  kAnd = 3,
  kCmp = 4,
  kAdd = 5,
  kMul = 6,
  kUnary = 7,
  kApp = 8,
  kPostfix = 9,
  kAtom = 10,
};

int binary_level(PrimOp op) {
  switch (op) {
    case PrimOp::Or: return kOr;
    case PrimOp::And: return kAnd;
    case PrimOp::Lt:
    case PrimOp::Le:
    case PrimOp::Gt:
    case PrimOp::Ge:
    case PrimOp::Eq:
    case PrimOp::Ne: return kCmp;
    case PrimOp::Add:
    case PrimOp::Sub: return kAdd;
    case PrimOp::Mul: return kMul;
    default: return kUnary;
  }
}

class Printer {
 public:
  explicit Printer(RenderMode mode) : mode_(mode) {}

  std::string expr(const Expr& e, int ctx) {
    int level = 0;
    std::string s = expr_body(e, level);
    return level < ctx ? "(" + s + ")" : s;
  }

  std::string comp(const Comp& m, int ctx) {
    int level = 0;
    std::string s = comp_body(m, level);
    return level < ctx ? "(" + s + ")" : s;
  }

 private:
  std::string hole() const { return mode_ == RenderMode::Shaded ? "⟦_⟧" : "_"; }

  static bool is_numeral(const Expr& e) {
    return e.kind == Expr::Kind::Int || e.kind == Expr::Kind::Float;
  }

  std::string expr_body(const Expr& e, int& level) {
    using K = Expr::Kind;
    level = kAtom;
    switch (e.kind) {
      case K::Hole: return hole();
      case K::Var: return e.name;
      case K::Unit: return "()";
      case K::Bool: return e.b ? "true" : "false";
      case K::Int:
        if (e.i < 0) level = kUnary;
        return std::to_string(e.i);
      case K::Float: {
        std::string s = format_float(e.f);
        if (!s.empty() && s[0] == '-') level = kUnary;
        return s;
      }
      case K::Str: return quote_string(e.name);
      case K::Pair: return "(" + expr(*e.e1, kStmt) + ", " + expr(*e.e2, kStmt) + ")";
      case K::Fst:
      case K::Snd:
      case K::Inl:
      case K::Inr: {
        level = kApp;
        const char* kw = e.kind == K::Fst ? "fst " : e.kind == K::Snd ? "snd " : e.kind == K::Inl ? "inl " : "inr ";
        return kw + expr(*e.e1, kPostfix);
      }
      case K::Fun:
        level = kStmt;
        return "rec " + e.name + " " + e.param + " -> " + comp(*e.body, kStmt);
      case K::Prim: {
        if (e.op == PrimOp::Not) {
          level = kUnary;
          return "not " + expr(*e.e1, kUnary);
        }
        if (e.op == PrimOp::Neg) {
          level = kUnary;
          std::string operand = expr(*e.e1, kUnary);
          if (is_numeral(*e.e1) || operand[0] == '-') operand = "(" + operand + ")";
          return "-" + operand;
        }
        level = binary_level(e.op);
        int lhs = level == kCmp ? level + 1 : level;
        return expr(*e.e1, lhs) + " " + std::string(op_symbol(e.op)) + " " + expr(*e.e2, level + 1);
      }
    }
    return "?";
  }

  std::string comp_body(const Comp& m, int& level) {
    using K = Comp::Kind;
    level = kStmt;
    switch (m.kind) {
      case K::Hole: level = kAtom; return hole();
      case K::Ret: return "return " + expr(*m.e1, kOr);
      case K::Let: return "let " + m.x + " = " + comp(*m.m1, kStmt) + " in " + comp(*m.m2, kStmt);
      case K::App: level = kApp; return expr(*m.e1, kApp) + " " + expr(*m.e2, kPostfix);
      case K::Case:
        return "case " + expr(*m.e1, kStmt) + " of inl " + m.x + " -> " + comp(*m.m1, kStmt) +
               " | inr " + m.y + " -> " + comp(*m.m2, kStmt);
      case K::If:
        return "if " + expr(*m.e1, kStmt) + " then " + comp(*m.m1, kStmt) + " else " + comp(*m.m2, kStmt);
      case K::Raise: level = kApp; return "raise " + expr(*m.e1, kPostfix);
      case K::Try: return "try " + comp(*m.m1, kStmt) + " with " + m.x + " -> " + comp(*m.m2, kStmt);
      case K::Ref: level = kApp; return "ref " + expr(*m.e1, kPostfix);
      case K::Assign: level = kAssign; return expr(*m.e1, kOr) + " := " + expr(*m.e2, kOr);
      case K::Deref: level = kUnary; return "!" + expr(*m.e1, kUnary);
      case K::ArrMake: level = kAtom; return "array(" + expr(*m.e1, kStmt) + ", " + expr(*m.e2, kStmt) + ")";
      case K::ArrGet: level = kPostfix; return expr(*m.e1, kPostfix) + "[" + expr(*m.e2, kStmt) + "]";
      case K::ArrSet:
        level = kAssign;
        return expr(*m.e1, kPostfix) + "[" + expr(*m.e2, kStmt) + "] <- " + expr(*m.e3, kOr);
      case K::Div:
        level = kMul;
        return expr(*m.e1, kMul) + " " + std::string(op_symbol(m.div)) + " " + expr(*m.e2, kUnary);
    }
    return "?";
  }

  RenderMode mode_;
};

}  // namespace

std::string render_term(const Expr& e, RenderMode mode) { return Printer(mode).expr(e, kStmt); }

std::string render_term(const Comp& m, RenderMode mode) { return Printer(mode).comp(m, kStmt); }

std::string render_value(const Value& v) {
  using K = Value::Kind;
  switch (v.kind) {
    case K::Hole: return "_";
    case K::Unit: return "()";
    case K::Bool: return v.b ? "true" : "false";
    case K::Int: return std::to_string(v.i);
    case K::Float: return format_float(v.f);
    case K::Str: return quote_string(v.s);
    case K::Pair: return "(" + render_value(*v.v1) + ", " + render_value(*v.v2) + ")";
    case K::Inl:
    case K::Inr: {
      std::string inner = render_value(*v.v1);
      bool compound = v.v1->kind == K::Inl || v.v1->kind == K::Inr ||
                      (!inner.empty() && inner[0] == '-');
      return std::string(v.kind == K::Inl ? "inl " : "inr ") + (compound ? "(" + inner + ")" : inner);
    }
    case K::Closure: return "<fun " + v.s + ">";
    case K::Loc: return fmt::format("#{}", v.loc);
    case K::Arr: return fmt::format("<array #{} of {}>", v.loc, v.i);
  }
  return "?";
}

std::string render_result(const Result& r) {
  return std::string(outcome_name(r.outcome)) + " " + render_value(*r.value);
}

}  // namespace itml
