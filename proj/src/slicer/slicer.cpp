#include "itml/slicer.hpp"

#include <fmt/format.h>

#include "itml/lattice.hpp"

namespace itml {

namespace {

[[noreturn]] void mismatch(const std::string& what) { throw ShapeMismatch(what); }

ExprP rebuild(const ExprP& e, ExprP e1, ExprP e2, CompP body) {
  auto r = std::make_shared<Expr>(*e);
  r->e1 = std::move(e1);
  r->e2 = std::move(e2);
  r->body = std::move(body);
  return r;
}

}  // namespace

// ---------------------------------------------------------------------------
// expressions
// ---------------------------------------------------------------------------

ValueP fwd_expr(const Env& env, const ExprP& e) {
  using K = Expr::Kind;
  switch (e->kind) {
    case K::Hole: return Value::hole();
    case K::Var: return env.get(e->name);
    case K::Unit: return Value::unit();
    case K::Bool: return Value::boolean(e->b);
    case K::Int: return Value::integer(e->i);
    case K::Float: return Value::floating(e->f);
    case K::Str: return Value::str(e->name);
    case K::Pair: return Value::pair(fwd_expr(env, e->e1), fwd_expr(env, e->e2));
    case K::Fst:
    case K::Snd: {
      ValueP v = fwd_expr(env, e->e1);
      if (v->is_hole()) return v;
      if (v->kind != Value::Kind::Pair) mismatch("projection from a non-pair");
      return e->kind == K::Fst ? v->v1 : v->v2;
    }
    case K::Inl: return Value::inl(fwd_expr(env, e->e1));
    case K::Inr: return Value::inr(fwd_expr(env, e->e1));
    case K::Fun: return Value::closure(env, e->name, e->param, e->body);
    case K::Prim: {
      ValueP a = fwd_expr(env, e->e1);
      ValueP b = is_unary(e->op) ? nullptr : fwd_expr(env, e->e2);
      if (!is_complete(*a) || (b && !is_complete(*b))) return Value::hole();
      return apply_prim(e->op, *a, b.get());
    }
  }
  mismatch("unknown expression");
}

std::pair<Env, ExprP> bwd_expr(const Env& full_env, const ValueP& v, const ExprP& e) {
  if (v->is_hole() || e->is_hole()) {
    if (!v->is_hole()) mismatch("demand on a part of the program that is a hole");
    return {Env{}, Expr::hole()};
  }
  using K = Expr::Kind;
  switch (e->kind) {
    case K::Var: {
      Env r;
      r.set(e->name, v);
      return {std::move(r), e};
    }
    case K::Unit:
    case K::Bool:
    case K::Int:
    case K::Float:
    case K::Str: return {Env{}, e};
    case K::Pair: {
      if (v->kind != Value::Kind::Pair) mismatch("pair expression demanded as a non-pair");
      auto [r1, e1] = bwd_expr(full_env, v->v1, e->e1);
      auto [r2, e2] = bwd_expr(full_env, v->v2, e->e2);
      return {join(r1, r2), rebuild(e, e1, e2, nullptr)};
    }
    case K::Fst:
    case K::Snd: {
      ValueP need = e->kind == K::Fst ? Value::pair(v, Value::hole()) : Value::pair(Value::hole(), v);
      auto [r, e1] = bwd_expr(full_env, need, e->e1);
      return {std::move(r), rebuild(e, e1, nullptr, nullptr)};
    }
    case K::Inl:
    case K::Inr: {
      auto want = e->kind == K::Inl ? Value::Kind::Inl : Value::Kind::Inr;
      if (v->kind != want) mismatch("injection demanded with the wrong tag");
      auto [r, e1] = bwd_expr(full_env, v->v1, e->e1);
      return {std::move(r), rebuild(e, e1, nullptr, nullptr)};
    }
    case K::Fun: {
      if (v->kind != Value::Kind::Closure) mismatch("function demanded as a non-closure");
      return {v->env, rebuild(e, nullptr, nullptr, v->body)};
    }
    case K::Prim: {
      // Operators are strict: any known result needs both operands in full.
      ValueP a = eval_expr(full_env, *e->e1);
      auto [r1, e1] = bwd_expr(full_env, a, e->e1);
      if (is_unary(e->op)) return {std::move(r1), rebuild(e, e1, nullptr, nullptr)};
      ValueP b = eval_expr(full_env, *e->e2);
      auto [r2, e2] = bwd_expr(full_env, b, e->e2);
      return {join(r1, r2), rebuild(e, e1, e2, nullptr)};
    }
    case K::Hole: break;
  }
  mismatch("unknown expression");
}

// ---------------------------------------------------------------------------
// forward slicing of computations
// ---------------------------------------------------------------------------

namespace {

bool kinds_match(Comp::Kind m, const Trace& t) {
  using C = Comp::Kind;
  using T = Trace::Kind;
  switch (t.kind) {
    case T::Ret: return m == C::Ret;
    case T::LetS:
    case T::LetF: return m == C::Let;
    case T::App: return m == C::App;
    case T::CaseL:
    case T::CaseR: return m == C::Case;
    case T::IfT:
    case T::IfF: return m == C::If;
    case T::Raise: return m == C::Raise;
    case T::TryS:
    case T::TryF: return m == C::Try;
    case T::Ref: return m == C::Ref;
    case T::Assign: return m == C::Assign;
    case T::Deref: return m == C::Deref;
    case T::ArrMake: return m == C::ArrMake;
    case T::ArrGet: return m == C::ArrGet;
    case T::ArrSet: return m == C::ArrSet;
    case T::ArrFail:
      return (t.arr == ArrOp::Make && m == C::ArrMake) || (t.arr == ArrOp::Get && m == C::ArrGet) ||
             (t.arr == ArrOp::Set && m == C::ArrSet);
    case T::DivOk:
    case T::DivFail: return m == C::Div;
    case T::Hole: return true;
  }
  return false;
}

// Both the program and the trace mention the same expression; only the part
// known in both is used.
ExprP common(const ExprP& program_side, const ExprP& trace_side) {
  if (!trace_side) return program_side;
  if (!compatible(*program_side, *trace_side)) mismatch("program and trace disagree on an expression");
  return meet(program_side, trace_side);
}

class Forward {
 public:
  explicit Forward(const SliceConfig& config) : config_(config) {}

  ForwardResult run(const Env& env, Store mu, const Comp& m, const Trace& t) {
    if (t.is_hole()) return {erase(std::move(mu), t.writes), Result{t.outcome, Value::hole()}};
    if (m.is_hole()) return {erase(std::move(mu), t.writes), Result{t.outcome, Value::hole()}};
    if (!kinds_match(m.kind, t)) mismatch("program and trace have different shapes");

    using T = Trace::Kind;
    auto val = [](ValueP v) { return Result{Outcome::Val, std::move(v)}; };
    auto exn = [](ValueP v) { return Result{Outcome::Exn, std::move(v)}; };
    auto opaque = [&](Store s) { return ForwardResult{erase(std::move(s), t.writes), Result{t.outcome, Value::hole()}}; };

    switch (t.kind) {
      case T::Ret: return {std::move(mu), val(fwd_expr(env, common(m.e1, t.e1)))};
      case T::LetS:
      case T::LetF: {
        if (m.x != t.x) mismatch("let binders differ");
        ForwardResult first = run(env, std::move(mu), *m.m1, *t.t1);
        if (t.kind == T::LetF) return first;
        return run(env.with(m.x, first.result.value), std::move(first.store), *m.m2, *t.t2);
      }
      case T::App: {
        ValueP f = fwd_expr(env, common(m.e1, t.e1));
        if (f->is_hole()) return opaque(std::move(mu));
        if (f->kind != Value::Kind::Closure || f->s != t.x || f->x != t.y) mismatch("applied function differs");
        ValueP arg = fwd_expr(env, common(m.e2, t.e2));
        return run(f->env.with(f->s, f).with(f->x, arg), std::move(mu), *f->body, *t.t1);
      }
      case T::CaseL:
      case T::CaseR: {
        if (m.x != t.x || m.y != t.y) mismatch("case binders differ");
        ValueP v = fwd_expr(env, common(m.e1, t.e1));
        if (v->is_hole()) return opaque(std::move(mu));
        bool left = t.kind == T::CaseL;
        if (v->kind != (left ? Value::Kind::Inl : Value::Kind::Inr)) mismatch("case scrutinee takes the other branch");
        return left ? run(env.with(m.x, v->v1), std::move(mu), *m.m1, *t.t1)
                    : run(env.with(m.y, v->v1), std::move(mu), *m.m2, *t.t1);
      }
      case T::IfT:
      case T::IfF: {
        ValueP v = fwd_expr(env, common(m.e1, t.e1));
        if (v->is_hole()) return opaque(std::move(mu));
        bool taken = t.kind == T::IfT;
        if (v->kind != Value::Kind::Bool || v->b != taken) mismatch("if condition takes the other branch");
        return run(env, std::move(mu), taken ? *m.m1 : *m.m2, *t.t1);
      }
      case T::Raise: return {std::move(mu), exn(fwd_expr(env, common(m.e1, t.e1)))};
      case T::TryS:
      case T::TryF: {
        if (m.x != t.x) mismatch("try binders differ");
        ForwardResult first = run(env, std::move(mu), *m.m1, *t.t1);
        if (t.kind == T::TryS) return first;
        return run(env.with(m.x, first.result.value), std::move(first.store), *m.m2, *t.t2);
      }
      case T::Ref: {
        ValueP v = fwd_expr(env, common(m.e1, t.e1));
        if (config_.fault == Fault::RefStoresHole) v = Value::hole();
        mu.set(Cell{t.loc, -1}, std::move(v));
        return {std::move(mu), val(Value::location(t.loc))};
      }
      case T::Assign: {
        ValueP target = fwd_expr(env, common(m.e1, t.e1));
        Cell c{t.loc, -1};
        if (target->is_hole()) {
          mu.remove(c);
          return {std::move(mu), val(Value::unit())};
        }
        if (target->kind != Value::Kind::Loc || target->loc != t.loc) mismatch("assignment target differs");
        mu.set(c, fwd_expr(env, common(m.e2, t.e2)));
        return {std::move(mu), val(Value::unit())};
      }
      case T::Deref: {
        ValueP target = fwd_expr(env, common(m.e1, t.e1));
        if (target->is_hole()) return {std::move(mu), val(Value::hole())};
        if (target->kind != Value::Kind::Loc || target->loc != t.loc) mismatch("dereferenced location differs");
        ValueP v = mu.get(Cell{t.loc, -1});
        return {std::move(mu), val(std::move(v))};
      }
      case T::ArrMake: {
        ValueP n = fwd_expr(env, common(m.e1, t.e1));
        if (n->is_hole()) return {erase(std::move(mu), t.writes), val(Value::hole())};
        if (n->kind != Value::Kind::Int || n->i != t.n) mismatch("array length differs");
        ValueP init = fwd_expr(env, common(m.e2, t.e2));
        for (int64_t k = 0; k < t.n; ++k) mu.set(Cell{t.loc, k}, init);
        return {std::move(mu), val(Value::array(t.loc, t.n))};
      }
      case T::ArrGet:
      case T::ArrSet: {
        bool is_set = t.kind == T::ArrSet;
        Cell c{t.loc, t.idx};
        ValueP a = fwd_expr(env, common(m.e1, t.e1));
        ValueP i = fwd_expr(env, common(m.e2, t.e2));
        if (a->is_hole() || i->is_hole()) {
          if (is_set) mu.remove(c);
          return {std::move(mu), val(Value::hole())};
        }
        if (a->kind != Value::Kind::Arr || a->loc != t.loc || i->kind != Value::Kind::Int || i->i != t.idx) {
          mismatch("array access differs");
        }
        if (!is_set) {
          ValueP v = mu.get(c);
          return {std::move(mu), val(std::move(v))};
        }
        mu.set(c, fwd_expr(env, common(m.e3, t.e3)));
        return {std::move(mu), val(Value::unit())};
      }
      case T::ArrFail: {
        ValueP a = fwd_expr(env, common(m.e1, t.e1));
        bool decided;
        if (t.arr == ArrOp::Make) {
          decided = !a->is_hole();
        } else {
          ValueP i = fwd_expr(env, common(m.e2, t.e2));
          decided = !a->is_hole() && !i->is_hole();
        }
        if (!decided) return {std::move(mu), exn(Value::hole())};
        std::string_view msg = t.arr == ArrOp::Make ? kInvalidLength : kIndexOutOfBounds;
        return {std::move(mu), exn(Value::str(std::string(msg)))};
      }
      case T::DivOk:
      case T::DivFail: {
        if (m.div != t.div) mismatch("division operators differ");
        ValueP a = fwd_expr(env, common(m.e1, t.e1));
        ValueP b = fwd_expr(env, common(m.e2, t.e2));
        bool known = is_complete(*a) && is_complete(*b);
        if (t.kind == T::DivFail) {
          return {std::move(mu), exn(known ? Value::str(std::string(kDivisionByZero)) : Value::hole())};
        }
        if (!known) return {std::move(mu), val(Value::hole())};
        ValueP r = apply_div(t.div, *a, *b);
        if (!r) mismatch("division by zero under a successful division trace");
        return {std::move(mu), val(std::move(r))};
      }
      case T::Hole: break;
    }
    mismatch("unknown trace");
  }

 private:
  const SliceConfig& config_;
};

// ---------------------------------------------------------------------------
// backward slicing of computations
// ---------------------------------------------------------------------------

class Backward {
 public:
  explicit Backward(const SliceConfig& config) : config_(config) {}

  BackwardSlice run(const Env& full, Store mu, const Result& r, const TraceP& tp) {
    const Trace& t = *tp;
    if (r.outcome != t.outcome) mismatch("criterion outcome differs from the trace outcome");
    if (r.value->is_hole() && disjoint(mu, t.writes)) {
      TraceP hole = t.is_hole() ? tp : Trace::hole(t.writes, t.outcome);
      return {Env{}, std::move(mu), Comp::hole(), std::move(hole)};
    }
    if (t.is_hole()) mismatch("criterion demands output of an elided computation");

    using T = Trace::Kind;
    const ValueP& v = r.value;
    auto node = [&] { return clone_node(t); };
    auto comp = [&](Comp::Kind k) {
      auto c = std::make_shared<Comp>();
      c->kind = k;
      c->span = t.span;
      return c;
    };

    switch (t.kind) {
      case T::Ret: {
        auto [rho, e] = bwd_expr(full, v, t.e1);
        auto m = comp(Comp::Kind::Ret);
        m->e1 = e;
        auto u = node();
        u->e1 = e;
        return {std::move(rho), std::move(mu), m, u};
      }
      case T::LetS: {
        BackwardSlice second = run(full.with(t.x, bound(t)), std::move(mu), r, t.t2);
        ValueP demand = second.env.get(t.x);
        second.env.remove(t.x);
        if (config_.fault == Fault::ForgetLetDemand) demand = Value::hole();
        BackwardSlice first = run(full, std::move(second.store), Result{Outcome::Val, demand}, t.t1);
        auto m = comp(Comp::Kind::Let);
        m->x = t.x;
        m->m1 = first.program;
        m->m2 = second.program;
        auto u = node();
        u->t1 = first.trace;
        u->t2 = second.trace;
        return {join(first.env, second.env), std::move(first.store), m, u};
      }
      case T::LetF: {
        BackwardSlice first = run(full, std::move(mu), r, t.t1);
        auto m = comp(Comp::Kind::Let);
        m->x = t.x;
        m->m1 = first.program;
        m->m2 = Comp::hole();
        auto u = node();
        u->t1 = first.trace;
        return {std::move(first.env), std::move(first.store), m, u};
      }
      case T::App: {
        ValueP f = eval_expr(full, *t.e1);
        ValueP arg = eval_expr(full, *t.e2);
        BackwardSlice body = run(f->env.with(t.x, f).with(t.y, arg), std::move(mu), r, t.t1);
        ValueP want_arg = body.env.get(t.y);
        body.env.remove(t.y);
        ValueP want_fun = t.x == t.y ? Value::hole() : body.env.get(t.x);
        body.env.remove(t.x);
        auto [rho2, e2] = bwd_expr(full, want_arg, t.e2);
        ValueP closure = join(want_fun, Value::closure(std::move(body.env), t.x, t.y, body.program));
        auto [rho1, e1] = bwd_expr(full, closure, t.e1);
        auto m = comp(Comp::Kind::App);
        m->e1 = e1;
        m->e2 = e2;
        auto u = node();
        u->e1 = e1;
        u->e2 = e2;
        u->t1 = body.trace;
        return {join(rho1, rho2), std::move(body.store), m, u};
      }
      case T::CaseL:
      case T::CaseR: {
        bool left = t.kind == T::CaseL;
        ValueP scrutinee = eval_expr(full, *t.e1);
        const std::string& binder = left ? t.x : t.y;
        BackwardSlice body = run(full.with(binder, scrutinee->v1), std::move(mu), r, t.t1);
        ValueP inner = body.env.get(binder);
        body.env.remove(binder);
        auto [rho, e] = bwd_expr(full, left ? Value::inl(inner) : Value::inr(inner), t.e1);
        auto m = comp(Comp::Kind::Case);
        m->e1 = e;
        m->x = t.x;
        m->y = t.y;
        m->m1 = left ? body.program : Comp::hole();
        m->m2 = left ? Comp::hole() : body.program;
        auto u = node();
        u->e1 = e;
        u->t1 = body.trace;
        return {join(body.env, rho), std::move(body.store), m, u};
      }
      case T::IfT:
      case T::IfF: {
        bool taken = t.kind == T::IfT;
        BackwardSlice body = run(full, std::move(mu), r, t.t1);
        auto [rho, e] = bwd_expr(full, Value::boolean(taken), t.e1);
        auto m = comp(Comp::Kind::If);
        m->e1 = e;
        m->m1 = taken ? body.program : Comp::hole();
        m->m2 = taken ? Comp::hole() : body.program;
        auto u = node();
        u->e1 = e;
        u->t1 = body.trace;
        return {join(body.env, rho), std::move(body.store), m, u};
      }
      case T::Raise: {
        auto [rho, e] = bwd_expr(full, v, t.e1);
        auto m = comp(Comp::Kind::Raise);
        m->e1 = e;
        auto u = node();
        u->e1 = e;
        return {std::move(rho), std::move(mu), m, u};
      }
      case T::TryS: {
        BackwardSlice first = run(full, std::move(mu), r, t.t1);
        auto m = comp(Comp::Kind::Try);
        m->x = t.x;
        m->m1 = first.program;
        m->m2 = Comp::hole();
        auto u = node();
        u->t1 = first.trace;
        return {std::move(first.env), std::move(first.store), m, u};
      }
      case T::TryF: {
        BackwardSlice handler = run(full.with(t.x, bound(t)), std::move(mu), r, t.t2);
        ValueP demand = handler.env.get(t.x);
        handler.env.remove(t.x);
        BackwardSlice first = run(full, std::move(handler.store), Result{Outcome::Exn, demand}, t.t1);
        auto m = comp(Comp::Kind::Try);
        m->x = t.x;
        m->m1 = first.program;
        m->m2 = handler.program;
        auto u = node();
        u->t1 = first.trace;
        u->t2 = handler.trace;
        return {join(first.env, handler.env), std::move(first.store), m, u};
      }
      case T::Ref: {
        Cell c{t.loc, -1};
        auto [rho, e] = bwd_expr(full, mu.get(c), t.e1);
        mu.remove(c);
        auto m = comp(Comp::Kind::Ref);
        m->e1 = e;
        auto u = node();
        u->e1 = e;
        return {std::move(rho), std::move(mu), m, u};
      }
      case T::Assign: {
        Cell c{t.loc, -1};
        auto m = comp(Comp::Kind::Assign);
        auto u = node();
        if (mu.get(c)->is_hole()) {
          // Only the unit result is demanded, which the trace alone supplies.
          m->e1 = m->e2 = u->e1 = u->e2 = Expr::hole();
          return {Env{}, std::move(mu), m, u};
        }
        auto [rho2, e2] = bwd_expr(full, mu.get(c), t.e2);
        auto [rho1, e1] = bwd_expr(full, Value::location(t.loc), t.e1);
        mu.remove(c);
        m->e1 = u->e1 = e1;
        m->e2 = u->e2 = e2;
        return {join(rho1, rho2), std::move(mu), m, u};
      }
      case T::Deref: {
        auto [rho, e] = bwd_expr(full, Value::location(t.loc), t.e1);
        Cell c{t.loc, -1};
        mu.set(c, join(mu.get(c), v));
        auto m = comp(Comp::Kind::Deref);
        m->e1 = e;
        auto u = node();
        u->e1 = e;
        return {std::move(rho), std::move(mu), m, u};
      }
      case T::ArrMake: {
        ValueP init = Value::hole();
        for (int64_t k = 0; k < t.n; ++k) init = join(init, mu.get(Cell{t.loc, k}));
        auto [rho2, e2] = bwd_expr(full, init, t.e2);
        auto [rho1, e1] = bwd_expr(full, Value::integer(t.n), t.e1);
        mu.remove_location(t.loc);
        auto m = comp(Comp::Kind::ArrMake);
        m->e1 = e1;
        m->e2 = e2;
        auto u = node();
        u->e1 = e1;
        u->e2 = e2;
        return {join(rho1, rho2), std::move(mu), m, u};
      }
      case T::ArrGet:
      case T::ArrSet: {
        bool is_set = t.kind == T::ArrSet;
        Cell c{t.loc, t.idx};
        Env rho3;
        ExprP e3;
        if (is_set) {
          std::tie(rho3, e3) = bwd_expr(full, mu.get(c), t.e3);
          mu.remove(c);
        } else {
          mu.set(c, join(mu.get(c), v));
        }
        auto [rho2, e2] = bwd_expr(full, Value::integer(t.idx), t.e2);
        auto [rho1, e1] = bwd_expr(full, Value::array(t.loc, t.n), t.e1);
        auto m = comp(is_set ? Comp::Kind::ArrSet : Comp::Kind::ArrGet);
        auto u = node();
        m->e1 = u->e1 = e1;
        m->e2 = u->e2 = e2;
        if (is_set) m->e3 = u->e3 = e3;
        return {join(join(rho1, rho2), rho3), std::move(mu), m, u};
      }
      case T::ArrFail: {
        Env rho;
        ExprP e1, e2 = Expr::hole();
        if (t.arr == ArrOp::Make) {
          std::tie(rho, e1) = bwd_expr(full, Value::integer(t.n), t.e1);
        } else {
          std::tie(rho, e1) = bwd_expr(full, Value::array(t.loc, t.n), t.e1);
          auto [rho2, e2x] = bwd_expr(full, Value::integer(t.idx), t.e2);
          rho = join(rho, rho2);
          e2 = e2x;
        }
        auto kind = t.arr == ArrOp::Make ? Comp::Kind::ArrMake
                    : t.arr == ArrOp::Get ? Comp::Kind::ArrGet
                                          : Comp::Kind::ArrSet;
        auto m = comp(kind);
        auto u = node();
        m->e1 = u->e1 = e1;
        m->e2 = u->e2 = e2;
        if (t.arr == ArrOp::Set) m->e3 = u->e3 = Expr::hole();
        return {std::move(rho), std::move(mu), m, u};
      }
      case T::DivOk:
      case T::DivFail: {
        auto [rho1, e1] = bwd_expr(full, eval_expr(full, *t.e1), t.e1);
        auto [rho2, e2] = bwd_expr(full, eval_expr(full, *t.e2), t.e2);
        auto m = comp(Comp::Kind::Div);
        m->div = t.div;
        auto u = node();
        m->e1 = u->e1 = e1;
        m->e2 = u->e2 = e2;
        return {join(rho1, rho2), std::move(mu), m, u};
      }
      case T::Hole: break;
    }
    mismatch("unknown trace");
  }

 private:
  static const ValueP& bound(const Trace& t) {
    if (!t.bound) throw Error("trace does not record bound values; slice a trace produced by evaluation");
    return t.bound;
  }

  const SliceConfig& config_;
};

}  // namespace

ForwardResult fwd_comp(const Env& env, const Store& store, const CompP& program, const TraceP& trace,
                       const SliceConfig& config) {
  return Forward(config).run(env, store, *program, *trace);
}

BackwardSlice bwd_comp(const Criterion& c, const Env& full_env, const TraceP& trace, const SliceConfig& config) {
  return Backward(config).run(full_env, c.store, c.result, trace);
}

BackwardSlice bwd_comp(const Criterion& c, const RunRecord& r, const SliceConfig& config) {
  validate_criterion(c, r);
  return bwd_comp(c, r.env, r.trace, config);
}

void validate_criterion(const Criterion& c, const RunRecord& r) {
  if (c.result.outcome != r.result.outcome) {
    mismatch(fmt::format("criterion asks for outcome {} but the run ended with {}", outcome_name(c.result.outcome),
                         outcome_name(r.result.outcome)));
  }
  if (!leq(*c.result.value, *r.result.value)) {
    mismatch(fmt::format("criterion result {} is not a prefix of the run's result {}", render_value(*c.result.value),
                         render_value(*r.result.value)));
  }
  for (const auto& [cell, v] : c.store.entries()) {
    const ValueP& actual = r.final_store.get(cell);
    if (!leq(*v, *actual)) {
      mismatch(fmt::format("criterion demands {} = {} but the run left {}", render_cell(cell), render_value(*v),
                           render_value(*actual)));
    }
  }
}

Criterion empty_criterion(const RunRecord& r) { return Criterion{Result{r.result.outcome, Value::hole()}, Store{}}; }

Criterion full_criterion(const RunRecord& r) { return Criterion{r.result, r.final_store}; }

bool replay_check(const RunRecord& r) {
  try {
    ForwardResult out = fwd_comp(r.env, r.initial_store, r.program, r.trace);
    return equal_terms(out.store, r.final_store) && equal_terms(out.result, r.result);
  } catch (const Error&) {
    return false;
  }
}

}  // namespace itml
