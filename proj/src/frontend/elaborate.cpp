// Elaboration of surface programs into the stratified core.
//
// Effectful operands are bound to administrative variables in left-to-right
// order. `M1; M2` becomes `let _ = M1 in M2` and `while e do M` becomes
// `(rec $w _ -> if e then (M; $w ()) else return ()) ()`. Array literals
// allocate first and then store their elements one by one; lists are
// `inl ()` for nil and `inr (head, tail)` for cons.

#include <fmt/format.h>

#include <functional>

#include "itml/frontend.hpp"

namespace itml {

MaybeSpan ElaborationMap::span_of(const Expr& e) const {
  if (e.span) return e.span;
  auto it = administrative.find(&e);
  if (it == administrative.end()) return std::nullopt;
  return it->second;
}

MaybeSpan ElaborationMap::span_of(const Comp& m) const {
  if (m.span) return m.span;
  auto it = administrative.find(&m);
  if (it == administrative.end()) return std::nullopt;
  return it->second;
}

namespace {

using K = SNode::Kind;

std::string child_path(const std::string& path, size_t i) {
  return path.empty() ? std::to_string(i) : path + "." + std::to_string(i);
}

class Elaborator {
 public:
  Elaborator(const SurfaceProgram& p, const ElaborateOptions& options,
             const std::unordered_set<const SNode*>* holed)
      : p_(p), options_(options), holed_(holed) {}

  Elaboration run() {
    CompP body = comp(*p_.root, "", false);
    Elaboration out;
    if (uses_prelude_) {
      CompP prelude = map_prelude();
      register_all(*prelude, p_.root->span);
      body = admin(Comp::let("map", prelude, body), p_.root->span);
    }
    out.program = std::move(body);
    out.map = std::move(map_);
    out.uses_prelude = uses_prelude_;
    return out;
  }

 private:
  using Cont = std::function<CompP(ExprP)>;
  using ListCont = std::function<CompP(std::vector<ExprP>)>;

  // ---- bookkeeping ----

  template <class P>
  P admin(P node, SourceSpan served) {
    map_.administrative[node.get()] = served;
    return node;
  }

  void register_all(const Expr& e, SourceSpan s) {
    if (!e.span) map_.administrative[&e] = s;
    if (e.e1) register_all(*e.e1, s);
    if (e.e2) register_all(*e.e2, s);
    if (e.body) register_all(*e.body, s);
  }

  void register_all(const Comp& m, SourceSpan s) {
    if (!m.span) map_.administrative[&m] = s;
    for (const ExprP* e : {&m.e1, &m.e2, &m.e3}) {
      if (*e) register_all(**e, s);
    }
    if (m.m1) register_all(*m.m1, s);
    if (m.m2) register_all(*m.m2, s);
  }

  [[noreturn]] void fail(const std::string& message, const SNode& n) const {
    throw ElaborationError(message, position_of(p_.source, n.span.begin));
  }

  bool is_holed(const SNode& n, bool inherited) const { return inherited || (holed_ && holed_->count(&n)); }

  // Scope of user-visible names, for unbound-variable errors.
  struct Scope {
    Elaborator& self;
    size_t mark;
    explicit Scope(Elaborator& s) : self(s), mark(s.scope_.size()) {}
    ~Scope() { self.scope_.resize(mark); }
    void bind(const std::string& x) {
      if (x != "_") self.scope_.push_back(x);
    }
  };

  void check_bound(const SNode& n) {
    if (!options_.check_scope) return;
    for (auto it = scope_.rbegin(); it != scope_.rend(); ++it) {
      if (*it == n.name) return;
    }
    if (options_.prelude && n.name == "map") {
      uses_prelude_ = true;
      return;
    }
    fail(fmt::format("unbound variable '{}'", n.name), n);
  }

  // ---- pure expressions ----

  ExprP list_spine(std::vector<ExprP> items, SourceSpan span) {
    ExprP tail = Expr::inl(Expr::unit(span), span);
    for (auto it = items.rbegin(); it != items.rend(); ++it) tail = Expr::inr(Expr::pair(*it, tail, span), span);
    return tail;
  }

  // Rebuilds a structural node from already elaborated operands.
  ExprP rebuild(const SNode& n, std::vector<ExprP> es) {
    SourceSpan s = n.span;
    switch (n.kind) {
      case K::Pair: return Expr::pair(es[0], es[1], s);
      case K::Fst: return Expr::fst(es[0], s);
      case K::Snd: return Expr::snd(es[0], s);
      case K::Inl: return Expr::inl(es[0], s);
      case K::Inr: return Expr::inr(es[0], s);
      case K::Unary: return Expr::prim(n.op, es[0], nullptr, s);
      case K::Binary: return Expr::prim(n.op, es[0], es[1], s);
      case K::ListLit: return list_spine(std::move(es), s);
      case K::Return: return es[0];
      default: fail("internal error: not a structural node", n);
    }
  }

  ExprP expr(const SNode& n, const std::string& path, bool holed) {
    holed = is_holed(n, holed);
    if (holed) return Expr::hole_at(n.span);
    SourceSpan s = n.span;
    switch (n.kind) {
      case K::Hole: return Expr::hole_at(s);
      case K::Var: check_bound(n); return Expr::var(n.name, s);
      case K::Unit: return Expr::unit(s);
      case K::Bool: return Expr::boolean(n.b, s);
      case K::Int: return Expr::integer(n.i, s);
      case K::Float: return Expr::floating(n.f, s);
      case K::Str: return Expr::str(n.name, s);
      case K::Fun: return function(n, path);
      default: break;
    }
    std::vector<ExprP> es;
    for (size_t k = 0; k < n.kids.size(); ++k) es.push_back(expr(*n.kids[k], child_path(path, k), false));
    return rebuild(n, std::move(es));
  }

  ExprP function(const SNode& n, const std::string& path) {
    Scope scope(*this);
    scope.bind(n.name);
    for (const Param& p : n.params) {
      scope.bind(p.first);
      if (p.is_pair) scope.bind(p.second);
    }
    CompP body = comp(*n.kids[0], child_path(path, 0), false);
    ExprP f;
    for (size_t k = n.params.size(); k-- > 0;) {
      const Param& p = n.params[k];
      std::string x = p.first;
      if (p.is_pair) {
        x = fmt::format("${}v{}", path, k);
        ExprP whole = admin(Expr::var(x), n.span);
        if (p.second != "_") {
          body = admin(Comp::let(p.second, admin(Comp::ret(admin(Expr::snd(whole), n.span)), n.span), body), n.span);
        }
        if (p.first != "_") {
          body = admin(Comp::let(p.first, admin(Comp::ret(admin(Expr::fst(whole), n.span)), n.span), body), n.span);
        }
      }
      f = Expr::fun(k == 0 ? n.name : "_", x, body, n.span);
      if (k > 0) body = Comp::ret(f, n.span);
    }
    return f;
  }

  // ---- operands ----

  static bool is_structural(K k) {
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

  // Elaborates n as an operand: effects are bound first, and the
  // continuation receives a pure expression for the value.
  CompP atomize(const SNode& n, const std::string& path, bool holed, const Cont& k) {
    holed = is_holed(n, holed);
    if (n.pure) return k(expr(n, path, holed));
    if (is_structural(n.kind)) {
      return atomize_all(n.kids, path, holed, [&](std::vector<ExprP> es) {
        return k(holed ? Expr::hole_at(n.span) : rebuild(n, std::move(es)));
      });
    }
    std::string x = "$" + path;
    CompP m = comp(n, path, holed);
    CompP rest = k(admin(Expr::var(x), n.span));
    return admin(Comp::let(x, m, rest), n.span);
  }

  CompP atomize_all(const std::vector<SNodeP>& kids, const std::string& path, bool holed, const ListCont& k) {
    std::vector<ExprP> acc;
    std::function<CompP(size_t)> step = [&](size_t i) -> CompP {
      if (i == kids.size()) return k(acc);
      return atomize(*kids[i], child_path(path, i), holed, [&, i](ExprP e) {
        acc.resize(i);
        acc.push_back(std::move(e));
        return step(i + 1);
      });
    };
    return step(0);
  }

  // ---- computations ----

  CompP comp(const SNode& n, const std::string& path, bool holed) {
    holed = is_holed(n, holed);
    SourceSpan s = n.span;
    if (holed || n.kind == K::Hole) return Comp::hole_at(s);
    if (n.kind == K::Return) {
      return atomize(*n.kids[0], child_path(path, 0), false, [&](ExprP e) { return Comp::ret(e, s); });
    }
    if (n.pure) return Comp::ret(expr(n, path, false), s);
    if (is_structural(n.kind)) return atomize(n, path, false, [&](ExprP e) { return Comp::ret(e, s); });

    auto operands = [&](const ListCont& k) { return atomize_all(n.kids, path, false, k); };
    auto kid = [&](size_t i) { return child_path(path, i); };

    switch (n.kind) {
      case K::Let: {
        CompP rhs = comp(*n.kids[0], kid(0), false);
        Scope scope(*this);
        scope.bind(n.name);
        CompP body = comp(*n.kids[1], kid(1), false);
        return Comp::let(n.name, rhs, body, s);
      }
      case K::Seq: {
        size_t count = n.kids.size();
        std::vector<CompP> items;
        for (size_t i = 0; i < count; ++i) items.push_back(comp(*n.kids[i], kid(i), false));
        CompP out = items.back();
        for (size_t i = count - 1; i-- > 0;) {
          out = Comp::let("_", items[i], out, SourceSpan{n.kids[i]->span.begin, s.end});
        }
        return out;
      }
      case K::App:
        return operands([&](std::vector<ExprP> es) { return Comp::app(es[0], es[1], s); });
      case K::If:
        return atomize(*n.kids[0], kid(0), false, [&](ExprP c) {
          CompP then_branch = comp(*n.kids[1], kid(1), false);
          CompP else_branch = n.kids.size() > 2 ? comp(*n.kids[2], kid(2), false)
                                                : admin(Comp::ret(admin(Expr::unit(), s)), s);
          return Comp::if_then(c, then_branch, else_branch, s);
        });
      case K::While: {
        std::string loop = "$" + path + "w";
        CompP inner = atomize(*n.kids[0], kid(0), false, [&](ExprP c) {
          CompP body = comp(*n.kids[1], kid(1), false);
          CompP again = Comp::app(admin(Expr::var(loop), s), admin(Expr::unit(), s), s);
          CompP done = Comp::ret(admin(Expr::unit(), s), s);
          return Comp::if_then(c, Comp::let("_", body, again, s), done, s);
        });
        return Comp::app(Expr::fun(loop, "_", inner, s), admin(Expr::unit(), s), s);
      }
      case K::Case:
        return atomize(*n.kids[0], kid(0), false, [&](ExprP e) {
          CompP left, right;
          {
            Scope scope(*this);
            scope.bind(n.name);
            left = comp(*n.kids[1], kid(1), false);
          }
          {
            Scope scope(*this);
            scope.bind(n.name2);
            right = comp(*n.kids[2], kid(2), false);
          }
          return Comp::case_of(e, n.name, left, n.name2, right, s);
        });
      case K::Try: {
        CompP m = comp(*n.kids[0], kid(0), false);
        Scope scope(*this);
        scope.bind(n.name);
        CompP h = comp(*n.kids[1], kid(1), false);
        return Comp::try_with(m, n.name, h, s);
      }
      case K::Raise: return operands([&](std::vector<ExprP> es) { return Comp::raise(es[0], s); });
      case K::Ref: return operands([&](std::vector<ExprP> es) { return Comp::ref(es[0], s); });
      case K::Deref: return operands([&](std::vector<ExprP> es) { return Comp::deref(es[0], s); });
      case K::Assign: return operands([&](std::vector<ExprP> es) { return Comp::assign(es[0], es[1], s); });
      case K::Index: return operands([&](std::vector<ExprP> es) { return Comp::arr_get(es[0], es[1], s); });
      case K::SetIndex:
        return operands([&](std::vector<ExprP> es) { return Comp::arr_set(es[0], es[1], es[2], s); });
      case K::ArrayMake: return operands([&](std::vector<ExprP> es) { return Comp::arr_make(es[0], es[1], s); });
      case K::Div: return operands([&](std::vector<ExprP> es) { return Comp::divide(n.div, es[0], es[1], s); });
      case K::ArrayLit: return array_literal(n, path);
      default: fail("internal error: unexpected node in computation position", n);
    }
  }

  CompP array_literal(const SNode& n, const std::string& path) {
    SourceSpan s = n.span;
    std::string a = "$" + path + "a";
    std::function<CompP(size_t)> fill = [&](size_t i) -> CompP {
      if (i == n.kids.size()) return admin(Comp::ret(admin(Expr::var(a), s)), s);
      return atomize(*n.kids[i], child_path(path, i), false, [&, i](ExprP v) {
        CompP store = admin(Comp::arr_set(admin(Expr::var(a), s), admin(Expr::integer(int64_t(i)), s), v), s);
        return admin(Comp::let("_", store, fill(i + 1)), s);
      });
    };
    CompP make = Comp::arr_make(admin(Expr::integer(int64_t(n.kids.size())), s), admin(Expr::unit(), s), s);
    return admin(Comp::let(a, make, fill(0)), s);
  }

  // map f l applies f to the elements of l from the head on.
  static CompP map_prelude() {
    using E = Expr;
    using C = Comp;
    CompP cons = C::let(
        "$h", C::app(E::var("$f"), E::fst(E::var("$c"))),
        C::let("$g", C::app(E::var("map"), E::var("$f")),
               C::let("$t", C::app(E::var("$g"), E::snd(E::var("$c"))),
                      C::ret(E::inr(E::pair(E::var("$h"), E::var("$t")))))));
    CompP walk = C::case_of(E::var("$l"), "_", C::ret(E::inl(E::unit())), "$c", cons);
    ExprP inner = E::fun("_", "$l", walk);
    return C::ret(E::fun("map", "$f", C::ret(inner)));
  }

  const SurfaceProgram& p_;
  ElaborateOptions options_;
  const std::unordered_set<const SNode*>* holed_;
  ElaborationMap map_;
  std::vector<std::string> scope_;
  bool uses_prelude_ = false;
};

// Pairs up a partial surface tree with the full one, collecting the full
// nodes that the partial tree replaces by `_`.
class Aligner {
 public:
  Aligner(const SurfaceProgram& partial, std::unordered_set<const SNode*>& holed)
      : partial_(partial), holed_(holed) {}

  void align(const SNode& p, const SNode& f) {
    if (p.kind == K::Hole && f.kind != K::Hole) {
      holed_.insert(&f);
      return;
    }
    bool same = p.kind == f.kind && p.op == f.op && p.div == f.div && p.b == f.b && p.i == f.i &&
                same_float(p.f, f.f) && p.name == f.name && p.name2 == f.name2 && p.params == f.params &&
                p.kids.size() == f.kids.size();
    if (!same) {
      TextPosition at = position_of(partial_.source, p.span.begin);
      throw ShapeMismatch(fmt::format("partial program differs from the source at line {}, column {}", at.line,
                                      at.column));
    }
    for (size_t k = 0; k < p.kids.size(); ++k) align(*p.kids[k], *f.kids[k]);
  }

 private:
  const SurfaceProgram& partial_;
  std::unordered_set<const SNode*>& holed_;
};

}  // namespace

Elaboration elaborate(const SurfaceProgram& p, const ElaborateOptions& options) {
  return Elaborator(p, options, nullptr).run();
}

Elaboration elaborate_aligned(const SurfaceProgram& partial, const SurfaceProgram& full,
                              const ElaborateOptions& options) {
  std::unordered_set<const SNode*> holed;
  Aligner(partial, holed).align(*partial.root, *full.root);
  return Elaborator(full, options, &holed).run();
}

CompP parse_core(std::string text) {
  ParseOptions parse;
  parse.core_names = true;
  SurfaceProgram p = parse_program(std::move(text), parse);
  ElaborateOptions options;
  options.prelude = false;
  options.check_scope = false;
  return elaborate(p, options).program;
}

}  // namespace itml
