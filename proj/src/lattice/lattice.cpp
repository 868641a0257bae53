#include "itml/lattice.hpp"

#include <fmt/format.h>

namespace itml {

uint64_t saturating_mul(uint64_t a, uint64_t b) {
  if (a == 0 || b == 0) return 0;
  if (a > UINT64_MAX / b) return UINT64_MAX;
  return a * b;
}

namespace {

uint64_t saturating_add(uint64_t a, uint64_t b) { return a > UINT64_MAX - b ? UINT64_MAX : a + b; }

template <class P>
bool leq_opt(const P& a, const P& b) {
  if (!a || !b) return !a && !b;
  return a == b || leq(*a, *b);
}

}  // namespace

// ---------------------------------------------------------------------------
// prefix order
// ---------------------------------------------------------------------------

bool leq(const Expr& a, const Expr& b) {
  if (a.is_hole()) return true;
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
    case K::Pair: return leq_opt(a.e1, b.e1) && leq_opt(a.e2, b.e2);
    case K::Fst:
    case K::Snd:
    case K::Inl:
    case K::Inr: return leq_opt(a.e1, b.e1);
    case K::Fun: return a.name == b.name && a.param == b.param && leq_opt(a.body, b.body);
    case K::Prim: return a.op == b.op && leq_opt(a.e1, b.e1) && leq_opt(a.e2, b.e2);
  }
  return false;
}

bool leq(const Comp& a, const Comp& b) {
  if (a.is_hole()) return true;
  if (a.kind != b.kind || a.x != b.x || a.y != b.y) return false;
  if (a.kind == Comp::Kind::Div && a.div != b.div) return false;
  return leq_opt(a.e1, b.e1) && leq_opt(a.e2, b.e2) && leq_opt(a.e3, b.e3) && leq_opt(a.m1, b.m1) &&
         leq_opt(a.m2, b.m2);
}

bool leq(const Env& a, const Env& b) {
  for (const auto& [x, v] : a.entries()) {
    if (!leq(*v, *b.get(x))) return false;
  }
  return true;
}

bool leq(const Store& a, const Store& b) {
  for (const auto& [c, v] : a.entries()) {
    if (!leq(*v, *b.get(c))) return false;
  }
  return true;
}

bool leq(const Value& a, const Value& b) {
  if (a.is_hole()) return true;
  if (a.kind != b.kind) return false;
  using K = Value::Kind;
  switch (a.kind) {
    case K::Hole:
    case K::Unit: return true;
    case K::Bool: return a.b == b.b;
    case K::Int: return a.i == b.i;
    case K::Float: return same_float(a.f, b.f);
    case K::Str: return a.s == b.s;
    case K::Pair: return leq_opt(a.v1, b.v1) && leq_opt(a.v2, b.v2);
    case K::Inl:
    case K::Inr: return leq_opt(a.v1, b.v1);
    case K::Closure: return a.s == b.s && a.x == b.x && leq_opt(a.body, b.body) && leq(a.env, b.env);
    case K::Loc: return a.loc == b.loc;
    case K::Arr: return a.loc == b.loc && a.i == b.i;
  }
  return false;
}

bool leq(const Result& a, const Result& b) { return a.outcome == b.outcome && leq(*a.value, *b.value); }

namespace {

bool same_trace_labels(const Trace& a, const Trace& b) {
  return a.kind == b.kind && a.x == b.x && a.y == b.y && a.loc == b.loc && a.n == b.n && a.idx == b.idx &&
         a.arr == b.arr && a.div == b.div;
}

}  // namespace

bool leq(const Trace& a, const Trace& b) {
  if (a.is_hole()) return a.outcome == b.outcome && a.writes == b.writes;
  if (!same_trace_labels(a, b)) return false;
  return leq_opt(a.e1, b.e1) && leq_opt(a.e2, b.e2) && leq_opt(a.e3, b.e3) && leq_opt(a.t1, b.t1) &&
         leq_opt(a.t2, b.t2);
}

// ---------------------------------------------------------------------------
// meets
// ---------------------------------------------------------------------------

namespace {

template <class P>
P meet_opt(const P& a, const P& b) {
  if (!a || !b) return nullptr;
  return meet(a, b);
}

template <class P>
P join_opt(const P& a, const P& b) {
  if (!a && !b) return nullptr;
  if (!a || !b) throw UndefinedJoin("join: arity mismatch");
  return join(a, b);
}

bool same_expr_label(const Expr& a, const Expr& b) {
  if (a.kind != b.kind) return false;
  using K = Expr::Kind;
  switch (a.kind) {
    case K::Var:
    case K::Str: return a.name == b.name;
    case K::Bool: return a.b == b.b;
    case K::Int: return a.i == b.i;
    case K::Float: return same_float(a.f, b.f);
    case K::Fun: return a.name == b.name && a.param == b.param;
    case K::Prim: return a.op == b.op;
    default: return true;
  }
}

bool same_comp_label(const Comp& a, const Comp& b) {
  return a.kind == b.kind && a.x == b.x && a.y == b.y && (a.kind != Comp::Kind::Div || a.div == b.div);
}

bool same_value_label(const Value& a, const Value& b) {
  if (a.kind != b.kind) return false;
  using K = Value::Kind;
  switch (a.kind) {
    case K::Bool: return a.b == b.b;
    case K::Int: return a.i == b.i;
    case K::Float: return same_float(a.f, b.f);
    case K::Str: return a.s == b.s;
    case K::Closure: return a.s == b.s && a.x == b.x;
    case K::Loc: return a.loc == b.loc;
    case K::Arr: return a.loc == b.loc && a.i == b.i;
    default: return true;
  }
}

}  // namespace

ExprP meet(const ExprP& a, const ExprP& b) {
  if (a == b) return a;
  if (a->is_hole()) return a;
  if (b->is_hole()) return b;
  if (!same_expr_label(*a, *b)) return Expr::hole();
  ExprP e1 = meet_opt(a->e1, b->e1);
  ExprP e2 = meet_opt(a->e2, b->e2);
  CompP body = meet_opt(a->body, b->body);
  if (e1 == a->e1 && e2 == a->e2 && body == a->body) return a;
  auto r = std::make_shared<Expr>(*a);
  r->e1 = std::move(e1);
  r->e2 = std::move(e2);
  r->body = std::move(body);
  return r;
}

CompP meet(const CompP& a, const CompP& b) {
  if (a == b) return a;
  if (a->is_hole()) return a;
  if (b->is_hole()) return b;
  if (!same_comp_label(*a, *b)) return Comp::hole();
  auto r = std::make_shared<Comp>(*a);
  r->e1 = meet_opt(a->e1, b->e1);
  r->e2 = meet_opt(a->e2, b->e2);
  r->e3 = meet_opt(a->e3, b->e3);
  r->m1 = meet_opt(a->m1, b->m1);
  r->m2 = meet_opt(a->m2, b->m2);
  return r;
}

Env meet(const Env& a, const Env& b) {
  Env r;
  for (const auto& [x, v] : a.entries()) {
    const ValueP& w = b.get(x);
    if (!w->is_hole()) r.set(x, meet(v, w));
  }
  return r;
}

Store meet(const Store& a, const Store& b) {
  Store r;
  for (const auto& [c, v] : a.entries()) {
    const ValueP& w = b.get(c);
    if (!w->is_hole()) r.set(c, meet(v, w));
  }
  return r;
}

ValueP meet(const ValueP& a, const ValueP& b) {
  if (a == b) return a;
  if (a->is_hole()) return a;
  if (b->is_hole()) return b;
  if (!same_value_label(*a, *b)) return Value::hole();
  using K = Value::Kind;
  switch (a->kind) {
    case K::Pair: return Value::pair(meet(a->v1, b->v1), meet(a->v2, b->v2));
    case K::Inl: return Value::inl(meet(a->v1, b->v1));
    case K::Inr: return Value::inr(meet(a->v1, b->v1));
    case K::Closure: return Value::closure(meet(a->env, b->env), a->s, a->x, meet(a->body, b->body));
    default: return a;
  }
}

Result meet(const Result& a, const Result& b) {
  if (a.outcome != b.outcome) throw ShapeMismatch("meet of results with different outcomes");
  return Result{a.outcome, meet(a.value, b.value)};
}

TraceP meet(const TraceP& a, const TraceP& b) {
  if (a == b) return a;
  if (a->is_hole()) return a;
  if (b->is_hole()) return b;
  if (!same_trace_labels(*a, *b)) throw ShapeMismatch("meet of traces that are not prefixes of one trace");
  auto r = clone_node(*a);
  r->e1 = meet_opt(a->e1, b->e1);
  r->e2 = meet_opt(a->e2, b->e2);
  r->e3 = meet_opt(a->e3, b->e3);
  r->t1 = meet_opt(a->t1, b->t1);
  r->t2 = meet_opt(a->t2, b->t2);
  return r;
}

// ---------------------------------------------------------------------------
// joins
// ---------------------------------------------------------------------------

ExprP join(const ExprP& a, const ExprP& b) {
  if (a == b) return a;
  if (a->is_hole()) return b;
  if (b->is_hole()) return a;
  if (!same_expr_label(*a, *b)) {
    throw UndefinedJoin(fmt::format("join of {} and {}", render_term(*a), render_term(*b)));
  }
  ExprP e1 = join_opt(a->e1, b->e1);
  ExprP e2 = join_opt(a->e2, b->e2);
  CompP body = join_opt(a->body, b->body);
  if (e1 == a->e1 && e2 == a->e2 && body == a->body) return a;
  auto r = std::make_shared<Expr>(*a);
  r->e1 = std::move(e1);
  r->e2 = std::move(e2);
  r->body = std::move(body);
  return r;
}

CompP join(const CompP& a, const CompP& b) {
  if (a == b) return a;
  if (a->is_hole()) return b;
  if (b->is_hole()) return a;
  if (!same_comp_label(*a, *b)) throw UndefinedJoin("join of computations with different shapes");
  auto r = std::make_shared<Comp>(*a);
  r->e1 = join_opt(a->e1, b->e1);
  r->e2 = join_opt(a->e2, b->e2);
  r->e3 = join_opt(a->e3, b->e3);
  r->m1 = join_opt(a->m1, b->m1);
  r->m2 = join_opt(a->m2, b->m2);
  return r;
}

Env join(const Env& a, const Env& b) {
  Env r = a;
  for (const auto& [x, v] : b.entries()) r.set(x, join(a.get(x), v));
  return r;
}

Store join(const Store& a, const Store& b) {
  Store r = a;
  for (const auto& [c, v] : b.entries()) r.set(c, join(a.get(c), v));
  return r;
}

ValueP join(const ValueP& a, const ValueP& b) {
  if (a == b) return a;
  if (a->is_hole()) return b;
  if (b->is_hole()) return a;
  if (!same_value_label(*a, *b)) {
    throw UndefinedJoin(fmt::format("join of {} and {}", render_value(*a), render_value(*b)));
  }
  using K = Value::Kind;
  switch (a->kind) {
    case K::Pair: return Value::pair(join(a->v1, b->v1), join(a->v2, b->v2));
    case K::Inl: return Value::inl(join(a->v1, b->v1));
    case K::Inr: return Value::inr(join(a->v1, b->v1));
    case K::Closure: return Value::closure(join(a->env, b->env), a->s, a->x, join(a->body, b->body));
    default: return a;
  }
}

Result join(const Result& a, const Result& b) {
  if (a.outcome != b.outcome) throw UndefinedJoin("join of results with different outcomes");
  return Result{a.outcome, join(a.value, b.value)};
}

TraceP join(const TraceP& a, const TraceP& b) {
  if (a == b) return a;
  if (a->is_hole() || b->is_hole()) {
    if (a->outcome != b->outcome || !(a->writes == b->writes)) {
      throw UndefinedJoin("join of traces with different write sets or outcomes");
    }
    return a->is_hole() ? b : a;
  }
  if (!same_trace_labels(*a, *b)) throw UndefinedJoin("join of traces with different shapes");
  auto r = clone_node(*a);
  r->e1 = join_opt(a->e1, b->e1);
  r->e2 = join_opt(a->e2, b->e2);
  r->e3 = join_opt(a->e3, b->e3);
  r->t1 = join_opt(a->t1, b->t1);
  r->t2 = join_opt(a->t2, b->t2);
  return r;
}

bool compatible(const Expr& a, const Expr& b) {
  if (&a == &b || a.is_hole() || b.is_hole()) return true;
  if (!same_expr_label(a, b)) return false;
  auto ok = [](const ExprP& x, const ExprP& y) { return !x || !y || compatible(*x, *y); };
  if (!ok(a.e1, b.e1) || !ok(a.e2, b.e2)) return false;
  if (a.body && b.body) {
    try {
      (void)join(a.body, b.body);
    } catch (const UndefinedJoin&) {
      return false;
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// erasure
// ---------------------------------------------------------------------------

Store erase(Store mu, const LocationSet& cells) {
  if (mu.empty() || cells.empty()) return mu;
  if (cells.size_bound() < mu.size()) {
    for (const Cell& c : cells.cells()) mu.remove(c);
    return mu;
  }
  std::vector<Cell> doomed;
  for (const auto& [c, v] : mu.entries()) {
    if (cells.contains(c)) doomed.push_back(c);
  }
  for (const Cell& c : doomed) mu.remove(c);
  return mu;
}

bool disjoint(const Store& mu, const LocationSet& cells) {
  if (mu.empty() || cells.empty()) return true;
  for (const auto& [c, v] : mu.entries()) {
    if (cells.contains(c)) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// counting
// ---------------------------------------------------------------------------

namespace {

template <class P>
uint64_t count_opt(const P& p) {
  return p ? count_prefixes(*p) : 1;
}

template <class P>
uint64_t points_opt(const P& p) {
  return p ? hole_points(*p) : 0;
}

}  // namespace

uint64_t count_prefixes(const Expr& e) {
  if (e.is_hole()) return 1;
  uint64_t inner = saturating_mul(saturating_mul(count_opt(e.e1), count_opt(e.e2)), count_opt(e.body));
  return saturating_add(1, inner);
}

uint64_t count_prefixes(const Comp& m) {
  if (m.is_hole()) return 1;
  uint64_t inner = 1;
  for (const ExprP* e : {&m.e1, &m.e2, &m.e3}) inner = saturating_mul(inner, count_opt(*e));
  inner = saturating_mul(inner, count_opt(m.m1));
  inner = saturating_mul(inner, count_opt(m.m2));
  return saturating_add(1, inner);
}

uint64_t count_prefixes(const Env& r) {
  uint64_t n = 1;
  for (const auto& [x, v] : r.entries()) n = saturating_mul(n, count_prefixes(*v));
  return n;
}

uint64_t count_prefixes(const Store& s) {
  uint64_t n = 1;
  for (const auto& [c, v] : s.entries()) n = saturating_mul(n, count_prefixes(*v));
  return n;
}

uint64_t count_prefixes(const Value& v) {
  if (v.is_hole()) return 1;
  uint64_t inner = saturating_mul(count_opt(v.v1), count_opt(v.v2));
  if (v.kind == Value::Kind::Closure) {
    inner = saturating_mul(inner, saturating_mul(count_prefixes(v.env), count_opt(v.body)));
  }
  return saturating_add(1, inner);
}

uint64_t count_prefixes(const Trace& t) {
  if (t.is_hole()) return 1;
  uint64_t inner = 1;
  for (const ExprP* e : {&t.e1, &t.e2, &t.e3}) inner = saturating_mul(inner, count_opt(*e));
  inner = saturating_mul(inner, count_opt(t.t1));
  inner = saturating_mul(inner, count_opt(t.t2));
  return saturating_add(1, inner);
}

uint64_t hole_points(const Expr& e) {
  if (e.is_hole()) return 0;
  return 1 + points_opt(e.e1) + points_opt(e.e2) + points_opt(e.body);
}

uint64_t hole_points(const Comp& m) {
  if (m.is_hole()) return 0;
  return 1 + points_opt(m.e1) + points_opt(m.e2) + points_opt(m.e3) + points_opt(m.m1) + points_opt(m.m2);
}

uint64_t hole_points(const Value& v) {
  if (v.is_hole()) return 0;
  uint64_t n = 1 + points_opt(v.v1) + points_opt(v.v2) + points_opt(v.body);
  for (const auto& [x, w] : v.env.entries()) n += hole_points(*w);
  return n;
}

uint64_t hole_points(const Trace& t) {
  if (t.is_hole()) return 0;
  return 1 + points_opt(t.e1) + points_opt(t.e2) + points_opt(t.e3) + points_opt(t.t1) + points_opt(t.t2);
}

// ---------------------------------------------------------------------------
// enumeration
// ---------------------------------------------------------------------------

namespace {

template <class P>
std::vector<P> child_prefixes(const P& p);

std::vector<ExprP> all_prefixes(const ExprP& e);
std::vector<CompP> all_prefixes(const CompP& m);
std::vector<ValueP> all_prefixes(const ValueP& v);
std::vector<TraceP> all_prefixes(const TraceP& t);
std::vector<Env> all_env_prefixes(const Env& r);

template <class P>
std::vector<P> child_prefixes(const P& p) {
  if (!p) return {nullptr};
  return all_prefixes(p);
}

std::vector<ExprP> all_prefixes(const ExprP& e) {
  std::vector<ExprP> out{Expr::hole()};
  if (e->is_hole()) return out;
  auto E1 = child_prefixes(e->e1);
  auto E2 = child_prefixes(e->e2);
  auto B = child_prefixes(e->body);
  for (const auto& a : E1) {
    for (const auto& b : E2) {
      for (const auto& c : B) {
        if (a == e->e1 && b == e->e2 && c == e->body) {
          out.push_back(e);
          continue;
        }
        auto r = std::make_shared<Expr>(*e);
        r->e1 = a;
        r->e2 = b;
        r->body = c;
        out.push_back(r);
      }
    }
  }
  return out;
}

std::vector<CompP> all_prefixes(const CompP& m) {
  std::vector<CompP> out{Comp::hole()};
  if (m->is_hole()) return out;
  auto E1 = child_prefixes(m->e1);
  auto E2 = child_prefixes(m->e2);
  auto E3 = child_prefixes(m->e3);
  auto M1 = child_prefixes(m->m1);
  auto M2 = child_prefixes(m->m2);
  for (const auto& a : E1)
    for (const auto& b : E2)
      for (const auto& c : E3)
        for (const auto& d : M1)
          for (const auto& f : M2) {
            auto r = std::make_shared<Comp>(*m);
            r->e1 = a;
            r->e2 = b;
            r->e3 = c;
            r->m1 = d;
            r->m2 = f;
            out.push_back(r);
          }
  out.back() = m;
  return out;
}

std::vector<ValueP> all_prefixes(const ValueP& v) {
  std::vector<ValueP> out{Value::hole()};
  if (v->is_hole()) return out;
  using K = Value::Kind;
  switch (v->kind) {
    case K::Pair:
      for (const auto& a : all_prefixes(v->v1))
        for (const auto& b : all_prefixes(v->v2)) out.push_back(Value::pair(a, b));
      break;
    case K::Inl:
      for (const auto& a : all_prefixes(v->v1)) out.push_back(Value::inl(a));
      break;
    case K::Inr:
      for (const auto& a : all_prefixes(v->v1)) out.push_back(Value::inr(a));
      break;
    case K::Closure:
      for (const auto& r : all_env_prefixes(v->env))
        for (const auto& b : all_prefixes(v->body)) out.push_back(Value::closure(r, v->s, v->x, b));
      break;
    default: out.push_back(v); return out;
  }
  out.back() = v;
  return out;
}

std::vector<TraceP> all_prefixes(const TraceP& t) {
  std::vector<TraceP> out{t->is_hole() ? t : Trace::hole(t->writes, t->outcome)};
  if (t->is_hole()) return out;
  auto E1 = child_prefixes(t->e1);
  auto E2 = child_prefixes(t->e2);
  auto E3 = child_prefixes(t->e3);
  auto T1 = child_prefixes(t->t1);
  auto T2 = child_prefixes(t->t2);
  for (const auto& a : E1)
    for (const auto& b : E2)
      for (const auto& c : E3)
        for (const auto& d : T1)
          for (const auto& f : T2) {
            auto r = clone_node(*t);
            r->e1 = a;
            r->e2 = b;
            r->e3 = c;
            r->t1 = d;
            r->t2 = f;
            out.push_back(r);
          }
  out.back() = t;
  return out;
}

// Product over the entries of a finitely supported map.
template <class MapLike, class Key>
std::vector<MapLike> map_prefixes(const std::vector<std::pair<Key, ValueP>>& entries) {
  std::vector<MapLike> out{MapLike{}};
  for (const auto& [k, v] : entries) {
    auto choices = all_prefixes(v);
    std::vector<MapLike> next;
    next.reserve(out.size() * choices.size());
    for (const auto& partial : out) {
      for (const auto& c : choices) {
        MapLike m = partial;
        m.set(k, c);
        next.push_back(std::move(m));
      }
    }
    out = std::move(next);
  }
  return out;
}

std::vector<Env> all_env_prefixes(const Env& r) {
  std::vector<std::pair<std::string, ValueP>> entries(r.entries().begin(), r.entries().end());
  return map_prefixes<Env>(entries);
}

void check_limits(uint64_t points, uint64_t count, const EnumerateLimits& lim) {
  if (points > lim.max_points) {
    throw CapExceeded(fmt::format("term has {} hole points, cap is {}", points, lim.max_points));
  }
  if (count > lim.max_count) {
    throw CapExceeded(fmt::format("prefix lattice has {} elements, cap is {}", count, lim.max_count));
  }
}

}  // namespace

std::vector<ExprP> enumerate_prefixes(const ExprP& e, const EnumerateLimits& lim) {
  check_limits(hole_points(*e), count_prefixes(*e), lim);
  return all_prefixes(e);
}

std::vector<CompP> enumerate_prefixes(const CompP& m, const EnumerateLimits& lim) {
  check_limits(hole_points(*m), count_prefixes(*m), lim);
  return all_prefixes(m);
}

std::vector<ValueP> enumerate_prefixes(const ValueP& v, const EnumerateLimits& lim) {
  check_limits(hole_points(*v), count_prefixes(*v), lim);
  return all_prefixes(v);
}

std::vector<TraceP> enumerate_prefixes(const TraceP& t, const EnumerateLimits& lim) {
  check_limits(hole_points(*t), count_prefixes(*t), lim);
  return all_prefixes(t);
}

std::vector<Env> enumerate_prefixes(const Env& r, const EnumerateLimits& lim) {
  uint64_t points = 0;
  for (const auto& [x, v] : r.entries()) points += hole_points(*v);
  check_limits(points, count_prefixes(r), lim);
  return all_env_prefixes(r);
}

std::vector<Store> enumerate_prefixes(const Store& s, const EnumerateLimits& lim) {
  uint64_t points = 0;
  for (const auto& [c, v] : s.entries()) points += hole_points(*v);
  check_limits(points, count_prefixes(s), lim);
  std::vector<std::pair<Cell, ValueP>> entries(s.entries().begin(), s.entries().end());
  return map_prefixes<Store>(entries);
}

}  // namespace itml
