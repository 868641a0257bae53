#include "itml/syntax.hpp"

#include <algorithm>
#include <cstring>

namespace itml {

bool is_unary(PrimOp op) { return op == PrimOp::Not || op == PrimOp::Neg; }

std::string_view op_symbol(PrimOp op) {
  switch (op) {
    case PrimOp::Add: return "+";
    case PrimOp::Sub: return "-";
    case PrimOp::Mul: return "*";
    case PrimOp::Lt: return "<";
    case PrimOp::Le: return "<=";
    case PrimOp::Gt: return ">";
    case PrimOp::Ge: return ">=";
    case PrimOp::Eq: return "==";
    case PrimOp::Ne: return "!=";
    case PrimOp::And: return "&&";
    case PrimOp::Or: return "||";
    case PrimOp::Not: return "not";
    case PrimOp::Neg: return "-";
  }
  return "?";
}

std::string_view op_symbol(DivOp op) { return op == DivOp::Div ? "/" : "mod"; }

std::string_view outcome_name(Outcome k) { return k == Outcome::Val ? "val" : "exn"; }

bool same_float(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

// ---------------------------------------------------------------------------
// expression constructors
// ---------------------------------------------------------------------------

namespace {

std::shared_ptr<Expr> new_expr(Expr::Kind k, MaybeSpan span) {
  auto e = std::make_shared<Expr>();
  e->kind = k;
  e->span = span;
  return e;
}

std::shared_ptr<Comp> new_comp(Comp::Kind k, MaybeSpan span) {
  auto m = std::make_shared<Comp>();
  m->kind = k;
  m->span = span;
  return m;
}

}  // namespace

const ExprP& Expr::hole() {
  static const ExprP h = std::make_shared<Expr>();
  return h;
}

ExprP Expr::hole_at(MaybeSpan span) {
  if (!span) return hole();
  return new_expr(Kind::Hole, span);
}

ExprP Expr::var(std::string x, MaybeSpan span) {
  auto e = new_expr(Kind::Var, span);
  e->name = std::move(x);
  return e;
}

ExprP Expr::unit(MaybeSpan span) { return new_expr(Kind::Unit, span); }

ExprP Expr::boolean(bool v, MaybeSpan span) {
  auto e = new_expr(Kind::Bool, span);
  e->b = v;
  return e;
}

ExprP Expr::integer(int64_t v, MaybeSpan span) {
  auto e = new_expr(Kind::Int, span);
  e->i = v;
  return e;
}

ExprP Expr::floating(double v, MaybeSpan span) {
  auto e = new_expr(Kind::Float, span);
  e->f = v;
  return e;
}

ExprP Expr::str(std::string s, MaybeSpan span) {
  auto e = new_expr(Kind::Str, span);
  e->name = std::move(s);
  return e;
}

ExprP Expr::pair(ExprP a, ExprP b, MaybeSpan span) {
  auto e = new_expr(Kind::Pair, span);
  e->e1 = std::move(a);
  e->e2 = std::move(b);
  return e;
}

ExprP Expr::fst(ExprP a, MaybeSpan span) {
  auto e = new_expr(Kind::Fst, span);
  e->e1 = std::move(a);
  return e;
}

ExprP Expr::snd(ExprP a, MaybeSpan span) {
  auto e = new_expr(Kind::Snd, span);
  e->e1 = std::move(a);
  return e;
}

ExprP Expr::inl(ExprP a, MaybeSpan span) {
  auto e = new_expr(Kind::Inl, span);
  e->e1 = std::move(a);
  return e;
}

ExprP Expr::inr(ExprP a, MaybeSpan span) {
  auto e = new_expr(Kind::Inr, span);
  e->e1 = std::move(a);
  return e;
}

ExprP Expr::fun(std::string f, std::string x, CompP body, MaybeSpan span) {
  auto e = new_expr(Kind::Fun, span);
  e->name = std::move(f);
  e->param = std::move(x);
  e->body = std::move(body);
  return e;
}

ExprP Expr::prim(PrimOp op, ExprP a, ExprP b, MaybeSpan span) {
  auto e = new_expr(Kind::Prim, span);
  e->op = op;
  e->e1 = std::move(a);
  e->e2 = std::move(b);
  return e;
}

// ---------------------------------------------------------------------------
// computation constructors
// ---------------------------------------------------------------------------

const CompP& Comp::hole() {
  static const CompP h = std::make_shared<Comp>();
  return h;
}

CompP Comp::hole_at(MaybeSpan span) {
  if (!span) return hole();
  return new_comp(Kind::Hole, span);
}

CompP Comp::ret(ExprP e, MaybeSpan span) {
  auto m = new_comp(Kind::Ret, span);
  m->e1 = std::move(e);
  return m;
}

CompP Comp::let(std::string x, CompP m1, CompP m2, MaybeSpan span) {
  auto m = new_comp(Kind::Let, span);
  m->x = std::move(x);
  m->m1 = std::move(m1);
  m->m2 = std::move(m2);
  return m;
}

CompP Comp::app(ExprP e1, ExprP e2, MaybeSpan span) {
  auto m = new_comp(Kind::App, span);
  m->e1 = std::move(e1);
  m->e2 = std::move(e2);
  return m;
}

CompP Comp::case_of(ExprP e, std::string x, CompP m1, std::string y, CompP m2, MaybeSpan span) {
  auto m = new_comp(Kind::Case, span);
  m->e1 = std::move(e);
  m->x = std::move(x);
  m->m1 = std::move(m1);
  m->y = std::move(y);
  m->m2 = std::move(m2);
  return m;
}

CompP Comp::if_then(ExprP e, CompP m1, CompP m2, MaybeSpan span) {
  auto m = new_comp(Kind::If, span);
  m->e1 = std::move(e);
  m->m1 = std::move(m1);
  m->m2 = std::move(m2);
  return m;
}

CompP Comp::raise(ExprP e, MaybeSpan span) {
  auto m = new_comp(Kind::Raise, span);
  m->e1 = std::move(e);
  return m;
}

CompP Comp::try_with(CompP m1, std::string x, CompP m2, MaybeSpan span) {
  auto m = new_comp(Kind::Try, span);
  m->m1 = std::move(m1);
  m->x = std::move(x);
  m->m2 = std::move(m2);
  return m;
}

CompP Comp::ref(ExprP e, MaybeSpan span) {
  auto m = new_comp(Kind::Ref, span);
  m->e1 = std::move(e);
  return m;
}

CompP Comp::assign(ExprP e1, ExprP e2, MaybeSpan span) {
  auto m = new_comp(Kind::Assign, span);
  m->e1 = std::move(e1);
  m->e2 = std::move(e2);
  return m;
}

CompP Comp::deref(ExprP e, MaybeSpan span) {
  auto m = new_comp(Kind::Deref, span);
  m->e1 = std::move(e);
  return m;
}

CompP Comp::arr_make(ExprP n, ExprP init, MaybeSpan span) {
  auto m = new_comp(Kind::ArrMake, span);
  m->e1 = std::move(n);
  m->e2 = std::move(init);
  return m;
}

CompP Comp::arr_get(ExprP a, ExprP i, MaybeSpan span) {
  auto m = new_comp(Kind::ArrGet, span);
  m->e1 = std::move(a);
  m->e2 = std::move(i);
  return m;
}

CompP Comp::arr_set(ExprP a, ExprP i, ExprP v, MaybeSpan span) {
  auto m = new_comp(Kind::ArrSet, span);
  m->e1 = std::move(a);
  m->e2 = std::move(i);
  m->e3 = std::move(v);
  return m;
}

CompP Comp::divide(DivOp op, ExprP a, ExprP b, MaybeSpan span) {
  auto m = new_comp(Kind::Div, span);
  m->div = op;
  m->e1 = std::move(a);
  m->e2 = std::move(b);
  return m;
}

// ---------------------------------------------------------------------------
// environments and stores
// ---------------------------------------------------------------------------

const ValueP& Env::get(std::string_view x) const {
  auto it = m_.find(x);
  return it == m_.end() ? Value::hole() : it->second;
}

void Env::set(const std::string& x, ValueP v) {
  if (v->is_hole()) {
    m_.erase(x);
  } else {
    m_.insert_or_assign(x, std::move(v));
  }
}

void Env::remove(std::string_view x) {
  auto it = m_.find(x);
  if (it != m_.end()) m_.erase(it);
}

Env Env::with(const std::string& x, ValueP v) const {
  Env r = *this;
  r.set(x, std::move(v));
  return r;
}

Env Env::without(std::string_view x) const {
  Env r = *this;
  r.remove(x);
  return r;
}

const ValueP& Store::get(Cell c) const {
  auto it = m_.find(c);
  return it == m_.end() ? Value::hole() : it->second;
}

void Store::set(Cell c, ValueP v) {
  if (v->is_hole()) {
    m_.erase(c);
  } else {
    m_.insert_or_assign(c, std::move(v));
  }
}

void Store::remove(Cell c) { m_.erase(c); }

void Store::remove_location(Location l) {
  auto lo = m_.lower_bound(Cell{l, INT64_MIN});
  auto hi = m_.lower_bound(Cell{l + 1, INT64_MIN});
  m_.erase(lo, hi);
}

// ---------------------------------------------------------------------------
// values
// ---------------------------------------------------------------------------

namespace {

std::shared_ptr<Value> new_value(Value::Kind k) {
  auto v = std::make_shared<Value>();
  v->kind = k;
  return v;
}

}  // namespace

const ValueP& Value::hole() {
  static const ValueP h = std::make_shared<Value>();
  return h;
}

const ValueP& Value::unit() {
  static const ValueP u = new_value(Kind::Unit);
  return u;
}

ValueP Value::boolean(bool b) {
  auto v = new_value(Kind::Bool);
  v->b = b;
  return v;
}

ValueP Value::integer(int64_t n) {
  auto v = new_value(Kind::Int);
  v->i = n;
  return v;
}

ValueP Value::floating(double d) {
  auto v = new_value(Kind::Float);
  v->f = d;
  return v;
}

ValueP Value::str(std::string s) {
  auto v = new_value(Kind::Str);
  v->s = std::move(s);
  return v;
}

ValueP Value::pair(ValueP a, ValueP b) {
  auto v = new_value(Kind::Pair);
  v->v1 = std::move(a);
  v->v2 = std::move(b);
  return v;
}

ValueP Value::inl(ValueP a) {
  auto v = new_value(Kind::Inl);
  v->v1 = std::move(a);
  return v;
}

ValueP Value::inr(ValueP a) {
  auto v = new_value(Kind::Inr);
  v->v1 = std::move(a);
  return v;
}

ValueP Value::closure(Env env, std::string f, std::string x, CompP body) {
  auto v = new_value(Kind::Closure);
  v->env = std::move(env);
  v->s = std::move(f);
  v->x = std::move(x);
  v->body = std::move(body);
  return v;
}

ValueP Value::location(Location l) {
  auto v = new_value(Kind::Loc);
  v->loc = l;
  return v;
}

ValueP Value::array(Location l, int64_t n) {
  auto v = new_value(Kind::Arr);
  v->loc = l;
  v->i = n;
  return v;
}

// ---------------------------------------------------------------------------
// write sets
// ---------------------------------------------------------------------------

bool WriteLog::contains(Cell c, uint32_t begin, uint32_t end) const {
  if (begin >= end) return false;
  if (end - begin <= 8) {
    for (uint32_t k = begin; k < end; ++k) {
      if (events_[k] == c) return true;
    }
    return false;
  }
  std::call_once(indexed_, [this] {
    for (uint32_t k = 0; k < events_.size(); ++k) index_[events_[k]].push_back(k);
  });
  auto it = index_.find(c);
  if (it == index_.end()) return false;
  auto pos = std::lower_bound(it->second.begin(), it->second.end(), begin);
  return pos != it->second.end() && *pos < end;
}

LocationSet LocationSet::of(std::vector<Cell> cells) {
  std::sort(cells.begin(), cells.end());
  cells.erase(std::unique(cells.begin(), cells.end()), cells.end());
  LocationSet s;
  if (!cells.empty()) s.explicit_ = std::make_shared<const std::vector<Cell>>(std::move(cells));
  return s;
}

LocationSet LocationSet::range(std::shared_ptr<const WriteLog> log, uint32_t begin, uint32_t end) {
  LocationSet s;
  if (begin < end) {
    s.log_ = std::move(log);
    s.begin_ = begin;
    s.end_ = end;
  }
  return s;
}

LocationSet LocationSet::unite(const LocationSet& a, const LocationSet& b) {
  if (a.empty()) return b;
  if (b.empty()) return a;
  if (a.log_ && a.log_ == b.log_ && a.end_ == b.begin_) return range(a.log_, a.begin_, b.end_);
  if (a.log_ && a.log_ == b.log_ && b.end_ == a.begin_) return range(a.log_, b.begin_, a.end_);
  std::vector<Cell> all = a.cells();
  std::vector<Cell> more = b.cells();
  all.insert(all.end(), more.begin(), more.end());
  return of(std::move(all));
}

bool LocationSet::empty() const { return !log_ && !explicit_; }

bool LocationSet::contains(Cell c) const {
  if (log_) return log_->contains(c, begin_, end_);
  if (explicit_) return std::binary_search(explicit_->begin(), explicit_->end(), c);
  return false;
}

size_t LocationSet::size_bound() const {
  if (log_) return end_ - begin_;
  if (explicit_) return explicit_->size();
  return 0;
}

std::vector<Cell> LocationSet::cells() const {
  if (explicit_) return *explicit_;
  std::vector<Cell> out;
  if (log_) {
    out.reserve(end_ - begin_);
    for (uint32_t k = begin_; k < end_; ++k) out.push_back((*log_)[k]);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
  }
  return out;
}

bool operator==(const LocationSet& a, const LocationSet& b) {
  if (a.empty() || b.empty()) return a.empty() && b.empty();
  if (a.log_ && a.log_ == b.log_ && a.begin_ == b.begin_ && a.end_ == b.end_) return true;
  if (a.explicit_ && a.explicit_ == b.explicit_) return true;
  return a.cells() == b.cells();
}

// ---------------------------------------------------------------------------
// trace constructors
// ---------------------------------------------------------------------------

namespace {

std::shared_ptr<Trace> new_trace(Trace::Kind k, LocationSet writes, Outcome outcome) {
  auto t = std::make_shared<Trace>();
  t->kind = k;
  t->writes = std::move(writes);
  t->outcome = outcome;
  return t;
}

}  // namespace

std::shared_ptr<Trace> clone_node(const Trace& t) { return std::make_shared<Trace>(t); }

TraceP Trace::hole(LocationSet writes, Outcome k) { return new_trace(Kind::Hole, std::move(writes), k); }

TraceP Trace::ret(ExprP e) {
  auto t = new_trace(Kind::Ret, {}, Outcome::Val);
  t->e1 = std::move(e);
  return t;
}

TraceP Trace::let_s(std::string x, TraceP t1, TraceP t2) {
  auto t = new_trace(Kind::LetS, LocationSet::unite(t1->writes, t2->writes), t2->outcome);
  t->x = std::move(x);
  t->t1 = std::move(t1);
  t->t2 = std::move(t2);
  return t;
}

TraceP Trace::let_f(std::string x, TraceP t1) {
  auto t = new_trace(Kind::LetF, t1->writes, Outcome::Exn);
  t->x = std::move(x);
  t->t1 = std::move(t1);
  return t;
}

TraceP Trace::app(ExprP e1, ExprP e2, std::string f, std::string x, TraceP body) {
  auto t = new_trace(Kind::App, body->writes, body->outcome);
  t->e1 = std::move(e1);
  t->e2 = std::move(e2);
  t->x = std::move(f);
  t->y = std::move(x);
  t->t1 = std::move(body);
  return t;
}

TraceP Trace::case_inl(ExprP e, std::string x, TraceP body, std::string y) {
  auto t = new_trace(Kind::CaseL, body->writes, body->outcome);
  t->e1 = std::move(e);
  t->x = std::move(x);
  t->y = std::move(y);
  t->t1 = std::move(body);
  return t;
}

TraceP Trace::case_inr(ExprP e, std::string x, std::string y, TraceP body) {
  auto t = new_trace(Kind::CaseR, body->writes, body->outcome);
  t->e1 = std::move(e);
  t->x = std::move(x);
  t->y = std::move(y);
  t->t1 = std::move(body);
  return t;
}

TraceP Trace::if_true(ExprP e, TraceP body) {
  auto t = new_trace(Kind::IfT, body->writes, body->outcome);
  t->e1 = std::move(e);
  t->t1 = std::move(body);
  return t;
}

TraceP Trace::if_false(ExprP e, TraceP body) {
  auto t = new_trace(Kind::IfF, body->writes, body->outcome);
  t->e1 = std::move(e);
  t->t1 = std::move(body);
  return t;
}

TraceP Trace::raise(ExprP e) {
  auto t = new_trace(Kind::Raise, {}, Outcome::Exn);
  t->e1 = std::move(e);
  return t;
}

TraceP Trace::try_s(std::string x, TraceP t1) {
  auto t = new_trace(Kind::TryS, t1->writes, Outcome::Val);
  t->x = std::move(x);
  t->t1 = std::move(t1);
  return t;
}

TraceP Trace::try_f(TraceP t1, std::string x, TraceP t2) {
  auto t = new_trace(Kind::TryF, LocationSet::unite(t1->writes, t2->writes), t2->outcome);
  t->t1 = std::move(t1);
  t->x = std::move(x);
  t->t2 = std::move(t2);
  return t;
}

TraceP Trace::ref(Location l, ExprP e) {
  auto t = new_trace(Kind::Ref, LocationSet::of({Cell{l, -1}}), Outcome::Val);
  t->loc = l;
  t->e1 = std::move(e);
  return t;
}

TraceP Trace::assign(ExprP e1, Location l, ExprP e2) {
  auto t = new_trace(Kind::Assign, LocationSet::of({Cell{l, -1}}), Outcome::Val);
  t->e1 = std::move(e1);
  t->loc = l;
  t->e2 = std::move(e2);
  return t;
}

TraceP Trace::deref(Location l, ExprP e) {
  auto t = new_trace(Kind::Deref, {}, Outcome::Val);
  t->loc = l;
  t->e1 = std::move(e);
  return t;
}

TraceP Trace::arr_make(Location l, int64_t n, ExprP e1, ExprP e2) {
  std::vector<Cell> cells;
  cells.reserve(size_t(std::max<int64_t>(n, 0)));
  for (int64_t k = 0; k < n; ++k) cells.push_back(Cell{l, k});
  auto t = new_trace(Kind::ArrMake, LocationSet::of(std::move(cells)), Outcome::Val);
  t->loc = l;
  t->n = n;
  t->e1 = std::move(e1);
  t->e2 = std::move(e2);
  return t;
}

TraceP Trace::arr_get(ExprP e1, ExprP e2, Location l, int64_t n, int64_t i) {
  auto t = new_trace(Kind::ArrGet, {}, Outcome::Val);
  t->e1 = std::move(e1);
  t->e2 = std::move(e2);
  t->loc = l;
  t->n = n;
  t->idx = i;
  return t;
}

TraceP Trace::arr_set(ExprP e1, ExprP e2, Location l, int64_t n, int64_t i, ExprP e3) {
  auto t = new_trace(Kind::ArrSet, LocationSet::of({Cell{l, i}}), Outcome::Val);
  t->e1 = std::move(e1);
  t->e2 = std::move(e2);
  t->loc = l;
  t->n = n;
  t->idx = i;
  t->e3 = std::move(e3);
  return t;
}

TraceP Trace::arr_fail(ArrOp op, ExprP e1, ExprP e2, ExprP e3, Location l, int64_t n, int64_t i) {
  auto t = new_trace(Kind::ArrFail, {}, Outcome::Exn);
  t->arr = op;
  t->e1 = std::move(e1);
  t->e2 = std::move(e2);
  t->e3 = std::move(e3);
  t->loc = l;
  t->n = n;
  t->idx = i;
  return t;
}

TraceP Trace::div_ok(DivOp op, ExprP e1, ExprP e2) {
  auto t = new_trace(Kind::DivOk, {}, Outcome::Val);
  t->div = op;
  t->e1 = std::move(e1);
  t->e2 = std::move(e2);
  return t;
}

TraceP Trace::div_fail(DivOp op, ExprP e1, ExprP e2) {
  auto t = new_trace(Kind::DivFail, {}, Outcome::Exn);
  t->div = op;
  t->e1 = std::move(e1);
  t->e2 = std::move(e2);
  return t;
}

// ---------------------------------------------------------------------------
// structural equality
// ---------------------------------------------------------------------------

namespace {

template <class P>
bool eq_opt(const P& a, const P& b) {
  if (!a || !b) return !a && !b;
  return equal_terms(a, b);
}

}  // namespace

bool equal_terms(const Expr& a, const Expr& b) {
  if (&a == &b) return true;
  if (a.kind != b.kind) return false;
  using K = Expr::Kind;
  switch (a.kind) {
    case K::Hole:
    case K::Unit: return true;
    case K::Var:
    case K::Str: return a.name == b.name;
    case K::Bool: return a.b == b.b;
    case K::Int: return a.i == b.i;
    case K::Float: return same_float(a.f, b.f);
    case K::Pair: return equal_terms(a.e1, b.e1) && equal_terms(a.e2, b.e2);
    case K::Fst:
    case K::Snd:
    case K::Inl:
    case K::Inr: return equal_terms(a.e1, b.e1);
    case K::Fun: return a.name == b.name && a.param == b.param && equal_terms(a.body, b.body);
    case K::Prim: return a.op == b.op && equal_terms(a.e1, b.e1) && eq_opt(a.e2, b.e2);
  }
  return false;
}

bool equal_terms(const Comp& a, const Comp& b) {
  if (&a == &b) return true;
  if (a.kind != b.kind) return false;
  using K = Comp::Kind;
  switch (a.kind) {
    case K::Hole: return true;
    case K::Ret:
    case K::Raise:
    case K::Ref:
    case K::Deref: return equal_terms(a.e1, b.e1);
    case K::Let: return a.x == b.x && equal_terms(a.m1, b.m1) && equal_terms(a.m2, b.m2);
    case K::App:
    case K::Assign:
    case K::ArrMake:
    case K::ArrGet: return equal_terms(a.e1, b.e1) && equal_terms(a.e2, b.e2);
    case K::Div: return a.div == b.div && equal_terms(a.e1, b.e1) && equal_terms(a.e2, b.e2);
    case K::ArrSet:
      return equal_terms(a.e1, b.e1) && equal_terms(a.e2, b.e2) && equal_terms(a.e3, b.e3);
    case K::Case:
      return a.x == b.x && a.y == b.y && equal_terms(a.e1, b.e1) && equal_terms(a.m1, b.m1) &&
             equal_terms(a.m2, b.m2);
    case K::If: return equal_terms(a.e1, b.e1) && equal_terms(a.m1, b.m1) && equal_terms(a.m2, b.m2);
    case K::Try: return a.x == b.x && equal_terms(a.m1, b.m1) && equal_terms(a.m2, b.m2);
  }
  return false;
}

bool equal_terms(const Env& a, const Env& b) {
  if (a.size() != b.size()) return false;
  auto ia = a.entries().begin();
  auto ib = b.entries().begin();
  for (; ia != a.entries().end(); ++ia, ++ib) {
    if (ia->first != ib->first || !equal_terms(ia->second, ib->second)) return false;
  }
  return true;
}

bool equal_terms(const Store& a, const Store& b) {
  if (a.size() != b.size()) return false;
  auto ia = a.entries().begin();
  auto ib = b.entries().begin();
  for (; ia != a.entries().end(); ++ia, ++ib) {
    if (ia->first != ib->first || !equal_terms(ia->second, ib->second)) return false;
  }
  return true;
}

bool equal_terms(const Value& a, const Value& b) {
  if (&a == &b) return true;
  if (a.kind != b.kind) return false;
  using K = Value::Kind;
  switch (a.kind) {
    case K::Hole:
    case K::Unit: return true;
    case K::Bool: return a.b == b.b;
    case K::Int: return a.i == b.i;
    case K::Float: return same_float(a.f, b.f);
    case K::Str: return a.s == b.s;
    case K::Pair: return equal_terms(a.v1, b.v1) && equal_terms(a.v2, b.v2);
    case K::Inl:
    case K::Inr: return equal_terms(a.v1, b.v1);
    case K::Closure:
      return a.s == b.s && a.x == b.x && equal_terms(a.body, b.body) && equal_terms(a.env, b.env);
    case K::Loc: return a.loc == b.loc;
    case K::Arr: return a.loc == b.loc && a.i == b.i;
  }
  return false;
}

bool equal_terms(const Result& a, const Result& b) {
  return a.outcome == b.outcome && equal_terms(a.value, b.value);
}

bool equal_terms(const Trace& a, const Trace& b) {
  if (&a == &b) return true;
  if (a.kind != b.kind) return false;
  using K = Trace::Kind;
  switch (a.kind) {
    case K::Hole: return a.outcome == b.outcome && a.writes == b.writes;
    case K::Ret:
    case K::Raise: return equal_terms(a.e1, b.e1);
    case K::LetS: return a.x == b.x && equal_terms(a.t1, b.t1) && equal_terms(a.t2, b.t2);
    case K::LetF:
    case K::TryS: return a.x == b.x && equal_terms(a.t1, b.t1);
    case K::TryF: return a.x == b.x && equal_terms(a.t1, b.t1) && equal_terms(a.t2, b.t2);
    case K::App:
      return a.x == b.x && a.y == b.y && equal_terms(a.e1, b.e1) && equal_terms(a.e2, b.e2) &&
             equal_terms(a.t1, b.t1);
    case K::CaseL:
    case K::CaseR:
      return a.x == b.x && a.y == b.y && equal_terms(a.e1, b.e1) && equal_terms(a.t1, b.t1);
    case K::IfT:
    case K::IfF: return equal_terms(a.e1, b.e1) && equal_terms(a.t1, b.t1);
    case K::Ref:
    case K::Deref: return a.loc == b.loc && equal_terms(a.e1, b.e1);
    case K::Assign: return a.loc == b.loc && equal_terms(a.e1, b.e1) && equal_terms(a.e2, b.e2);
    case K::ArrMake:
      return a.loc == b.loc && a.n == b.n && equal_terms(a.e1, b.e1) && equal_terms(a.e2, b.e2);
    case K::ArrGet:
      return a.loc == b.loc && a.n == b.n && a.idx == b.idx && equal_terms(a.e1, b.e1) &&
             equal_terms(a.e2, b.e2);
    case K::ArrSet:
      return a.loc == b.loc && a.n == b.n && a.idx == b.idx && equal_terms(a.e1, b.e1) &&
             equal_terms(a.e2, b.e2) && equal_terms(a.e3, b.e3);
    case K::ArrFail:
      return a.arr == b.arr && a.loc == b.loc && a.n == b.n && a.idx == b.idx &&
             eq_opt(a.e1, b.e1) && eq_opt(a.e2, b.e2) && eq_opt(a.e3, b.e3);
    case K::DivOk:
    case K::DivFail: return a.div == b.div && equal_terms(a.e1, b.e1) && equal_terms(a.e2, b.e2);
  }
  return false;
}

// ---------------------------------------------------------------------------
// sizes
// ---------------------------------------------------------------------------

namespace {

size_t expr_nodes(const Expr& e);

size_t comp_nodes(const Comp& m) {
  if (m.is_hole()) return 1;
  size_t n = 1;
  for (const ExprP* e : {&m.e1, &m.e2, &m.e3}) {
    if (*e) n += expr_nodes(**e);
  }
  if (m.m1) n += comp_nodes(*m.m1);
  if (m.m2) n += comp_nodes(*m.m2);
  return n;
}

size_t expr_nodes(const Expr& e) {
  size_t n = 1;
  if (e.e1) n += expr_nodes(*e.e1);
  if (e.e2) n += expr_nodes(*e.e2);
  if (e.body) n += comp_nodes(*e.body);
  return n;
}

}  // namespace

size_t node_count(const Comp& m) { return comp_nodes(m); }

size_t node_count(const Trace& t) {
  // Iterative over the t2 spine so that long let chains do not recurse deeply.
  size_t n = 0;
  const Trace* cur = &t;
  while (cur) {
    ++n;
    if (cur->t1) n += node_count(*cur->t1);
    cur = cur->t2.get();
  }
  return n;
}

}  // namespace itml
