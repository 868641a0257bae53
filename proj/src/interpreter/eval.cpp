#include <fmt/format.h>
#include <pthread.h>

#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>

#include "itml/interpreter.hpp"
#include "itml/lattice.hpp"

namespace itml {

EvalConfig default_eval_config() {
  EvalConfig c;
  if (const char* s = std::getenv("ITML_STEP_LIMIT")) {
    char* end = nullptr;
    unsigned long long v = std::strtoull(s, &end, 10);
    if (end != s && *end == '\0' && v > 0) c.max_depth = v;
  }
  return c;
}

bool is_complete(const Value& v) {
  using K = Value::Kind;
  switch (v.kind) {
    case K::Hole: return false;
    case K::Pair: return is_complete(*v.v1) && is_complete(*v.v2);
    case K::Inl:
    case K::Inr: return is_complete(*v.v1);
    case K::Closure:
      if (v.body->is_hole()) return false;
      for (const auto& [x, w] : v.env.entries()) {
        if (!is_complete(*w)) return false;
      }
      return true;
    default: return true;
  }
}

// ---------------------------------------------------------------------------
// primitive operations
// ---------------------------------------------------------------------------

namespace {

[[noreturn]] void stuck(const std::string& what) { throw StuckError(what); }

int64_t wrap_add(int64_t a, int64_t b) { return int64_t(uint64_t(a) + uint64_t(b)); }
int64_t wrap_sub(int64_t a, int64_t b) { return int64_t(uint64_t(a) - uint64_t(b)); }
int64_t wrap_mul(int64_t a, int64_t b) { return int64_t(uint64_t(a) * uint64_t(b)); }

bool values_equal(const Value& a, const Value& b) {
  using K = Value::Kind;
  if (a.kind == K::Closure || b.kind == K::Closure) stuck("equality on functions");
  if (a.kind != b.kind) {
    bool numeric = (a.kind == K::Int || a.kind == K::Float) && (b.kind == K::Int || b.kind == K::Float);
    if (numeric) stuck("equality between an integer and a float");
    return false;
  }
  switch (a.kind) {
    case K::Unit: return true;
    case K::Bool: return a.b == b.b;
    case K::Int: return a.i == b.i;
    case K::Float: return a.f == b.f;
    case K::Str: return a.s == b.s;
    case K::Pair: return values_equal(*a.v1, *b.v1) && values_equal(*a.v2, *b.v2);
    case K::Inl:
    case K::Inr: return values_equal(*a.v1, *b.v1);
    case K::Loc: return a.loc == b.loc;
    case K::Arr: return a.loc == b.loc && a.i == b.i;
    default: stuck("equality on incomplete values");
  }
}

template <class Cmp>
bool compare(const Value& a, const Value& b, Cmp cmp) {
  using K = Value::Kind;
  if (a.kind == K::Int && b.kind == K::Int) return cmp(a.i, b.i);
  if (a.kind == K::Float && b.kind == K::Float) return cmp(a.f, b.f);
  if (a.kind == K::Str && b.kind == K::Str) return cmp(a.s, b.s);
  stuck("comparison of incompatible values");
}

}  // namespace

ValueP apply_prim(PrimOp op, const Value& a, const Value* b) {
  using K = Value::Kind;
  switch (op) {
    case PrimOp::Not:
      if (a.kind != K::Bool) stuck("not applied to a non-boolean");
      return Value::boolean(!a.b);
    case PrimOp::Neg:
      if (a.kind == K::Int) return Value::integer(wrap_sub(0, a.i));
      if (a.kind == K::Float) return Value::floating(-a.f);
      stuck("negation of a non-number");
    default: break;
  }
  if (!b) stuck("binary operator with one operand");
  switch (op) {
    case PrimOp::Add:
    case PrimOp::Sub:
    case PrimOp::Mul:
      if (a.kind == K::Int && b->kind == K::Int) {
        int64_t r = op == PrimOp::Add ? wrap_add(a.i, b->i) : op == PrimOp::Sub ? wrap_sub(a.i, b->i) : wrap_mul(a.i, b->i);
        return Value::integer(r);
      }
      if (a.kind == K::Float && b->kind == K::Float) {
        double r = op == PrimOp::Add ? a.f + b->f : op == PrimOp::Sub ? a.f - b->f : a.f * b->f;
        return Value::floating(r);
      }
      stuck(fmt::format("arithmetic '{}' on incompatible values", op_symbol(op)));
    case PrimOp::Lt: return Value::boolean(compare(a, *b, [](const auto& x, const auto& y) { return x < y; }));
    case PrimOp::Le: return Value::boolean(compare(a, *b, [](const auto& x, const auto& y) { return x <= y; }));
    case PrimOp::Gt: return Value::boolean(compare(a, *b, [](const auto& x, const auto& y) { return x > y; }));
    case PrimOp::Ge: return Value::boolean(compare(a, *b, [](const auto& x, const auto& y) { return x >= y; }));
    case PrimOp::Eq: return Value::boolean(values_equal(a, *b));
    case PrimOp::Ne: return Value::boolean(!values_equal(a, *b));
    case PrimOp::And:
    case PrimOp::Or:
      if (a.kind != K::Bool || b->kind != K::Bool) stuck("logical operator on non-booleans");
      return Value::boolean(op == PrimOp::And ? (a.b && b->b) : (a.b || b->b));
    default: break;
  }
  stuck("unknown operator");
}

ValueP apply_div(DivOp op, const Value& a, const Value& b) {
  using K = Value::Kind;
  if (a.kind == K::Int && b.kind == K::Int) {
    if (b.i == 0) return nullptr;
    if (a.i == std::numeric_limits<int64_t>::min() && b.i == -1) {
      return Value::integer(op == DivOp::Div ? a.i : 0);
    }
    return Value::integer(op == DivOp::Div ? a.i / b.i : a.i % b.i);
  }
  if (a.kind == K::Float && b.kind == K::Float) {
    if (b.f == 0.0) return nullptr;
    return Value::floating(op == DivOp::Div ? a.f / b.f : std::fmod(a.f, b.f));
  }
  stuck(fmt::format("'{}' on incompatible values", op_symbol(op)));
}

// ---------------------------------------------------------------------------
// expressions
// ---------------------------------------------------------------------------

ValueP eval_expr(const Env& env, const Expr& e) {
  using K = Expr::Kind;
  switch (e.kind) {
    case K::Hole: stuck("evaluation reached a hole");
    case K::Var: {
      const ValueP& v = env.get(e.name);
      if (v->is_hole()) stuck(fmt::format("unbound variable '{}'", e.name));
      return v;
    }
    case K::Unit: return Value::unit();
    case K::Bool: return Value::boolean(e.b);
    case K::Int: return Value::integer(e.i);
    case K::Float: return Value::floating(e.f);
    case K::Str: return Value::str(e.name);
    case K::Pair: return Value::pair(eval_expr(env, *e.e1), eval_expr(env, *e.e2));
    case K::Fst:
    case K::Snd: {
      ValueP v = eval_expr(env, *e.e1);
      if (v->kind != Value::Kind::Pair) stuck("projection from a non-pair");
      return e.kind == K::Fst ? v->v1 : v->v2;
    }
    case K::Inl: return Value::inl(eval_expr(env, *e.e1));
    case K::Inr: return Value::inr(eval_expr(env, *e.e1));
    case K::Fun: return Value::closure(env, e.name, e.param, e.body);
    case K::Prim: {
      ValueP a = eval_expr(env, *e.e1);
      if (is_unary(e.op)) return apply_prim(e.op, *a, nullptr);
      ValueP b = eval_expr(env, *e.e2);
      return apply_prim(e.op, *a, b.get());
    }
  }
  stuck("unknown expression");
}

// ---------------------------------------------------------------------------
// computations
// ---------------------------------------------------------------------------

namespace {

class Evaluator {
 public:
  Evaluator(Store store, const EvalConfig& config)
      : store_(std::move(store)), log_(std::make_shared<WriteLog>()), config_(config) {
    for (const auto& [c, v] : store_.entries()) next_ = std::max<Location>(next_, c.loc + 1);
  }

  // Result of one computation; the store is threaded through store_.
  struct Out {
    TraceP trace;
    Result result;
  };

  Out eval(const Env& env, const Comp& m) {
    using K = Comp::Kind;
    uint32_t start = log_->size();
    switch (m.kind) {
      case K::Hole: stuck("evaluation reached a hole");
      case K::Ret:
        return finish(Trace::ret(m.e1), start, m, Result{Outcome::Val, eval_expr(env, *m.e1)});
      case K::Let: {
        Out first = eval(env, *m.m1);
        if (first.result.outcome == Outcome::Exn) {
          return finish(Trace::let_f(m.x, first.trace), start, m, first.result);
        }
        Out second = eval(env.with(m.x, first.result.value), *m.m2);
        TraceP t = Trace::let_s(m.x, first.trace, second.trace);
        set_bound(t, first.result.value);
        return finish(std::move(t), start, m, second.result);
      }
      case K::App: {
        ValueP f = eval_expr(env, *m.e1);
        if (f->kind != Value::Kind::Closure) stuck("application of a non-function");
        ValueP arg = eval_expr(env, *m.e2);
        if (++depth_ > config_.max_depth) {
          stuck(fmt::format("recursion limit of {} nested applications exceeded", config_.max_depth));
        }
        Out body = eval(f->env.with(f->s, f).with(f->x, arg), *f->body);
        --depth_;
        return finish(Trace::app(m.e1, m.e2, f->s, f->x, body.trace), start, m, body.result);
      }
      case K::Case: {
        ValueP v = eval_expr(env, *m.e1);
        if (v->kind == Value::Kind::Inl) {
          Out body = eval(env.with(m.x, v->v1), *m.m1);
          return finish(Trace::case_inl(m.e1, m.x, body.trace, m.y), start, m, body.result);
        }
        if (v->kind == Value::Kind::Inr) {
          Out body = eval(env.with(m.y, v->v1), *m.m2);
          return finish(Trace::case_inr(m.e1, m.x, m.y, body.trace), start, m, body.result);
        }
        stuck("case on a value that is neither inl nor inr");
      }
      case K::If: {
        ValueP v = eval_expr(env, *m.e1);
        if (v->kind != Value::Kind::Bool) stuck("if condition is not a boolean");
        Out body = eval(env, v->b ? *m.m1 : *m.m2);
        TraceP t = v->b ? Trace::if_true(m.e1, body.trace) : Trace::if_false(m.e1, body.trace);
        return finish(std::move(t), start, m, body.result);
      }
      case K::Raise:
        return finish(Trace::raise(m.e1), start, m, Result{Outcome::Exn, eval_expr(env, *m.e1)});
      case K::Try: {
        Out first = eval(env, *m.m1);
        if (first.result.outcome == Outcome::Val) {
          return finish(Trace::try_s(m.x, first.trace), start, m, first.result);
        }
        Out handler = eval(env.with(m.x, first.result.value), *m.m2);
        TraceP t = Trace::try_f(first.trace, m.x, handler.trace);
        set_bound(t, first.result.value);
        return finish(std::move(t), start, m, handler.result);
      }
      case K::Ref: {
        ValueP v = eval_expr(env, *m.e1);
        Location l = next_++;
        allocations_.push_back(l);
        write(Cell{l, -1}, v);
        return finish(Trace::ref(l, m.e1), start, m, Result{Outcome::Val, Value::location(l)});
      }
      case K::Assign: {
        ValueP target = eval_expr(env, *m.e1);
        if (target->kind != Value::Kind::Loc) stuck("assignment to a non-reference");
        ValueP v = eval_expr(env, *m.e2);
        if (store_.get(Cell{target->loc, -1})->is_hole()) stuck("assignment to an unallocated location");
        write(Cell{target->loc, -1}, v);
        return finish(Trace::assign(m.e1, target->loc, m.e2), start, m, Result{Outcome::Val, Value::unit()});
      }
      case K::Deref: {
        ValueP target = eval_expr(env, *m.e1);
        if (target->kind != Value::Kind::Loc) stuck("dereference of a non-reference");
        const ValueP& v = store_.get(Cell{target->loc, -1});
        if (v->is_hole()) stuck("dereference of an unallocated location");
        return finish(Trace::deref(target->loc, m.e1), start, m, Result{Outcome::Val, v});
      }
      case K::ArrMake: {
        ValueP n = eval_expr(env, *m.e1);
        if (n->kind != Value::Kind::Int) stuck("array length is not an integer");
        ValueP init = eval_expr(env, *m.e2);
        if (n->i < 0) {
          return finish(Trace::arr_fail(ArrOp::Make, m.e1, m.e2, nullptr, 0, n->i, 0), start, m,
                        Result{Outcome::Exn, Value::str(std::string(kInvalidLength))});
        }
        if (n->i > (int64_t(1) << 28)) stuck("array length too large");
        Location l = next_++;
        allocations_.push_back(l);
        for (int64_t k = 0; k < n->i; ++k) write(Cell{l, k}, init);
        return finish(Trace::arr_make(l, n->i, m.e1, m.e2), start, m, Result{Outcome::Val, Value::array(l, n->i)});
      }
      case K::ArrGet:
      case K::ArrSet: {
        bool is_set = m.kind == K::ArrSet;
        ValueP a = eval_expr(env, *m.e1);
        if (a->kind != Value::Kind::Arr) stuck("indexing a non-array");
        ValueP i = eval_expr(env, *m.e2);
        if (i->kind != Value::Kind::Int) stuck("array index is not an integer");
        ValueP v = is_set ? eval_expr(env, *m.e3) : nullptr;
        if (i->i < 0 || i->i >= a->i) {
          TraceP t = Trace::arr_fail(is_set ? ArrOp::Set : ArrOp::Get, m.e1, m.e2, is_set ? m.e3 : nullptr, a->loc,
                                     a->i, i->i);
          return finish(std::move(t), start, m, Result{Outcome::Exn, Value::str(std::string(kIndexOutOfBounds))});
        }
        Cell c{a->loc, i->i};
        if (is_set) {
          write(c, v);
          return finish(Trace::arr_set(m.e1, m.e2, a->loc, a->i, i->i, m.e3), start, m,
                        Result{Outcome::Val, Value::unit()});
        }
        const ValueP& got = store_.get(c);
        if (got->is_hole()) stuck("read from an unallocated array");
        return finish(Trace::arr_get(m.e1, m.e2, a->loc, a->i, i->i), start, m, Result{Outcome::Val, got});
      }
      case K::Div: {
        ValueP a = eval_expr(env, *m.e1);
        ValueP b = eval_expr(env, *m.e2);
        ValueP r = apply_div(m.div, *a, *b);
        if (!r) {
          return finish(Trace::div_fail(m.div, m.e1, m.e2), start, m,
                        Result{Outcome::Exn, Value::str(std::string(kDivisionByZero))});
        }
        return finish(Trace::div_ok(m.div, m.e1, m.e2), start, m, Result{Outcome::Val, r});
      }
    }
    stuck("unknown computation");
  }

  Store take_store() { return std::move(store_); }
  std::vector<Location> take_allocations() { return std::move(allocations_); }
  std::shared_ptr<const WriteLog> log() const { return log_; }

 private:
  void write(Cell c, ValueP v) {
    store_.set(c, std::move(v));
    log_->push(c);
  }

  // Trace nodes are freshly built and uniquely owned here, so the cached
  // annotations can be filled in place.
  static Trace& own(const TraceP& t) { return const_cast<Trace&>(*t); }

  static void set_bound(const TraceP& t, ValueP v) { own(t).bound = std::move(v); }

  Out finish(TraceP t, uint32_t start, const Comp& m, Result r) {
    Trace& node = own(t);
    node.writes = LocationSet::range(log_, start, log_->size());
    node.span = m.span;
    return Out{std::move(t), std::move(r)};
  }

  Store store_;
  std::shared_ptr<WriteLog> log_;
  EvalConfig config_;
  Location next_ = 0;
  uint64_t depth_ = 0;
  std::vector<Location> allocations_;
};

}  // namespace

RunRecord eval_comp(const Env& env, const Store& store, const CompP& program, const EvalConfig& config) {
  Evaluator ev(store, config);
  Evaluator::Out out = ev.eval(env, *program);
  RunRecord r;
  r.env = env;
  r.initial_store = store;
  r.program = program;
  r.trace = std::move(out.trace);
  r.result = std::move(out.result);
  r.final_store = ev.take_store();
  r.allocations = ev.take_allocations();
  r.log = ev.log();
  return r;
}

bool equal_records(const RunRecord& a, const RunRecord& b) {
  return equal_terms(a.env, b.env) && equal_terms(a.initial_store, b.initial_store) &&
         equal_terms(a.program, b.program) && equal_terms(a.trace, b.trace) &&
         equal_terms(a.final_store, b.final_store) && equal_terms(a.result, b.result) &&
         a.allocations == b.allocations;
}

// ---------------------------------------------------------------------------
// large stacks
// ---------------------------------------------------------------------------

namespace {

struct StackJob {
  const std::function<void()>* fn;
  std::exception_ptr error;
};

void* stack_entry(void* arg) {
  auto* job = static_cast<StackJob*>(arg);
  try {
    (*job->fn)();
  } catch (...) {
    job->error = std::current_exception();
  }
  return nullptr;
}

}  // namespace

void run_with_large_stack(const std::function<void()>& fn, size_t stack_bytes) {
  StackJob job{&fn, nullptr};
  pthread_attr_t attr;
  pthread_attr_init(&attr);
  pthread_attr_setstacksize(&attr, stack_bytes);
  pthread_t thread;
  int rc = pthread_create(&thread, &attr, stack_entry, &job);
  pthread_attr_destroy(&attr);
  if (rc != 0) {
    fn();
    return;
  }
  pthread_join(thread, nullptr);
  if (job.error) std::rethrow_exception(job.error);
}

}  // namespace itml
