#include <gtest/gtest.h>

#include "itml/interpreter.hpp"
#include "itml/lattice.hpp"
#include "itml/oracle.hpp"
#include "support.hpp"

namespace itml {
namespace {

ExprP num(int64_t n) { return Expr::integer(n); }
ExprP var(const char* x) { return Expr::var(x); }

RunRecord run(const CompP& m) { return eval_comp(Env{}, Store{}, m); }

TEST(EvalExpr, FirstProjection) {
  ValueP v = eval_expr(Env{}, *Expr::fst(Expr::pair(num(1), num(2))));
  EXPECT_TRUE(equal_terms(v, Value::integer(1)));
}

TEST(EvalExpr, PairOfVariable) {
  Env r;
  r.set("x", Value::integer(3));
  ValueP v = eval_expr(r, *Expr::pair(var("x"), var("x")));
  EXPECT_TRUE(equal_terms(v, Value::pair(Value::integer(3), Value::integer(3))));
}

TEST(EvalExpr, FunctionBuildsClosureOverEnvironment) {
  Env r;
  r.set("y", Value::integer(7));
  CompP body = Comp::ret(var("x"));
  ValueP v = eval_expr(r, *Expr::fun("f", "x", body));
  ASSERT_EQ(v->kind, Value::Kind::Closure);
  EXPECT_EQ(v->s, "f");
  EXPECT_EQ(v->x, "x");
  EXPECT_TRUE(equal_terms(v->env, r));
  EXPECT_TRUE(equal_terms(v->body, body));
}

TEST(EvalExpr, PrimitivesAndStuckStates) {
  EXPECT_TRUE(equal_terms(eval_expr(Env{}, *Expr::prim(PrimOp::Add, num(2), num(3))), Value::integer(5)));
  EXPECT_TRUE(equal_terms(eval_expr(Env{}, *Expr::prim(PrimOp::Lt, num(2), num(3))), Value::boolean(true)));
  EXPECT_TRUE(equal_terms(eval_expr(Env{}, *Expr::prim(PrimOp::Mul, Expr::floating(1.5), Expr::floating(2.0))),
                          Value::floating(3.0)));
  EXPECT_THROW(eval_expr(Env{}, *Expr::fst(num(1))), StuckError);
  EXPECT_THROW(eval_expr(Env{}, *var("nowhere")), StuckError);
  EXPECT_THROW(eval_expr(Env{}, *Expr::prim(PrimOp::Add, num(1), Expr::boolean(true))), StuckError);
}

TEST(EvalComp, ReturnUnit) {
  RunRecord r = run(Comp::ret(Expr::unit()));
  EXPECT_TRUE(equal_terms(r.trace, Trace::ret(Expr::unit())));
  EXPECT_TRUE(r.final_store.empty());
  EXPECT_TRUE(equal_terms(r.result, Result{Outcome::Val, Value::unit()}));
}

TEST(EvalComp, MapWithDivisionRaises) {
  auto l = test::load_program("map_div.itml");
  EXPECT_TRUE(equal_terms(l.run.result, Result{Outcome::Exn, Value::str("division by zero")}));
}

TEST(EvalComp, ArrayLoopFinalState) {
  auto l = test::load_program("array_loop.itml");
  EXPECT_TRUE(equal_terms(l.run.result, Result{Outcome::Val, Value::unit()}));
  // Allocation order: x (#0), i (#1), s (#2).
  const Store& s = l.run.final_store;
  EXPECT_TRUE(equal_terms(s.get(Cell{1, -1}), Value::integer(4)));
  EXPECT_TRUE(equal_terms(s.get(Cell{2, -1}), Value::integer(2)));
  std::vector<int64_t> expected{0, 0, 2, 2};
  for (int64_t k = 0; k < 4; ++k) EXPECT_TRUE(equal_terms(s.get(Cell{0, k}), Value::integer(expected[k])));
}

TEST(EvalComp, TraceConstructorsFollowTheRun) {
  CompP m = Comp::let("x", Comp::raise(Expr::str("e")), Comp::ret(num(1)));
  EXPECT_EQ(run(m).trace->kind, Trace::Kind::LetF);
  EXPECT_EQ(run(Comp::try_with(Comp::ret(num(1)), "x", Comp::ret(var("x")))).trace->kind, Trace::Kind::TryS);
  RunRecord caught = run(Comp::try_with(m, "x", Comp::ret(var("x"))));
  EXPECT_EQ(caught.trace->kind, Trace::Kind::TryF);
  EXPECT_TRUE(equal_terms(caught.result, Result{Outcome::Val, Value::str("e")}));
  CompP c = Comp::case_of(Expr::inr(num(2)), "a", Comp::ret(var("a")), "b", Comp::ret(var("b")));
  EXPECT_EQ(run(c).trace->kind, Trace::Kind::CaseR);
  CompP i = Comp::if_then(Expr::boolean(false), Comp::ret(num(1)), Comp::ret(num(2)));
  EXPECT_EQ(run(i).trace->kind, Trace::Kind::IfF);
}

TEST(EvalComp, DivisionByZeroRaisesForIntegersAndFloats) {
  for (auto [a, b] : {std::pair{num(1), num(0)}, std::pair{Expr::floating(1.0), Expr::floating(0.0)}}) {
    RunRecord r = run(Comp::divide(DivOp::Div, a, b));
    EXPECT_TRUE(equal_terms(r.result, Result{Outcome::Exn, Value::str("division by zero")}));
    EXPECT_EQ(r.trace->kind, Trace::Kind::DivFail);
  }
  RunRecord m = run(Comp::divide(DivOp::Mod, num(7), num(0)));
  EXPECT_EQ(m.result.outcome, Outcome::Exn);
  EXPECT_TRUE(equal_terms(run(Comp::divide(DivOp::Mod, num(7), num(3))).result.value, Value::integer(1)));
}

TEST(EvalComp, ArrayFailuresRaise) {
  CompP oob = Comp::let("a", Comp::arr_make(num(2), num(0)), Comp::arr_get(var("a"), num(2)));
  RunRecord r = run(oob);
  EXPECT_TRUE(equal_terms(r.result, Result{Outcome::Exn, Value::str("index out of bounds")}));
  RunRecord neg = run(Comp::arr_make(num(-1), num(0)));
  EXPECT_TRUE(equal_terms(neg.result, Result{Outcome::Exn, Value::str("invalid array length")}));
  CompP set = Comp::let("a", Comp::arr_make(num(2), num(0)), Comp::arr_set(var("a"), num(-1), num(5)));
  EXPECT_EQ(run(set).result.outcome, Outcome::Exn);
  EXPECT_TRUE(writes(*run(set).trace->t2).empty());
}

TEST(EvalComp, StuckStates) {
  EXPECT_THROW(run(Comp::assign(num(1), num(2))), StuckError);
  EXPECT_THROW(run(Comp::if_then(num(1), Comp::ret(num(1)), Comp::ret(num(2)))), StuckError);
  EXPECT_THROW(run(Comp::app(num(1), num(2))), StuckError);
  EXPECT_THROW(run(Comp::deref(Expr::unit())), StuckError);
}

TEST(EvalComp, RecursionLimitIsAStuckState) {
  // rec f x -> f x, applied once.
  CompP loop = Comp::let("f", Comp::ret(Expr::fun("f", "x", Comp::app(var("f"), var("x")))),
                         Comp::app(var("f"), Expr::unit()));
  EvalConfig config;
  config.max_depth = 500;
  EXPECT_THROW(eval_comp(Env{}, Store{}, loop, config), StuckError);
}

TEST(EvalComp, DeepRecursionWithinTheLimit) {
  auto l = test::load_program("list_build.itml");
  EXPECT_TRUE(equal_terms(l.run.result, Result{Outcome::Val, Value::integer(50005000)}));
}

TEST(Replay, FreshRunsReplay) {
  EXPECT_TRUE(replay_check(run(Comp::ret(Expr::unit()))));
  EXPECT_TRUE(replay_check(test::load_program("array_loop.itml").run));
  EXPECT_TRUE(replay_check(test::load_program("map_div.itml").run));
  EXPECT_TRUE(replay_check(test::load_program("gauss.itml").run));
}

TEST(Replay, TamperedStoreIsDetected) {
  RunRecord r = test::load_program("array_loop.itml").run;
  r.final_store.set(Cell{2, -1}, Value::integer(3));
  EXPECT_FALSE(replay_check(r));
  RunRecord q = test::load_program("array_loop.itml").run;
  q.result = Result{Outcome::Val, Value::integer(0)};
  EXPECT_FALSE(replay_check(q));
}

// Determinism, trace faithfulness and replay over generated programs.
TEST(Properties, GeneratedPrograms) {
  for (uint64_t seed = 0; seed < 300; ++seed) {
    CompP m = generate_program(seed, 6);
    RunRecord a = run(m), b = run(m);
    ASSERT_TRUE(equal_records(a, b)) << "seed " << seed;
    ASSERT_TRUE(replay_check(a)) << "seed " << seed;
    ASSERT_EQ(outcome(*a.trace), a.result.outcome);
    // Every cell that changed, or was created, is in writes(T).
    for (const auto& [cell, v] : a.final_store.entries()) {
      if (!equal_terms(a.initial_store.get(cell), v)) ASSERT_TRUE(writes(*a.trace).contains(cell));
    }
    // try M with x -> return x always succeeds.
    RunRecord t = run(Comp::try_with(m, "exn", Comp::ret(var("exn"))));
    ASSERT_EQ(t.result.outcome, Outcome::Val);
    if (a.result.outcome == Outcome::Exn) ASSERT_TRUE(equal_terms(t.result.value, a.result.value));
  }
}

TEST(TraceText, ReturnProgramIsOneLine) {
  std::string dump = dump_trace(*run(Comp::ret(Expr::unit())).trace);
  while (!dump.empty() && dump.back() == '\n') dump.pop_back();
  EXPECT_EQ(dump.find('\n'), std::string::npos);
  EXPECT_EQ(dump, "(ret ())");
}

TEST(TraceText, DumpParsesBackAndReplays) {
  auto l = test::load_program("array_loop.itml");
  TraceP parsed = parse_trace(dump_trace(*l.run.trace));
  EXPECT_TRUE(equal_terms(parsed, l.run.trace));
  EXPECT_EQ(parsed->writes, l.run.trace->writes);
  RunRecord copy = l.run;
  copy.trace = parsed;
  EXPECT_TRUE(replay_check(copy));
}

TEST(TraceText, RoundTripOverGeneratedRuns) {
  for (uint64_t seed = 0; seed < 200; ++seed) {
    RunRecord r = run(generate_program(seed, 6));
    TraceP parsed = parse_trace(dump_trace(*r.trace));
    ASSERT_TRUE(equal_terms(parsed, r.trace)) << "seed " << seed;
    ASSERT_EQ(parsed->writes, r.trace->writes);
    ASSERT_TRUE(equal_terms(parse_comp_sexp(dump_comp(*r.program)), r.program));
  }
}

TEST(TraceText, MalformedInputIsRejected) {
  EXPECT_THROW(parse_trace("(ret"), Error);
  EXPECT_THROW(parse_trace("(frobnicate 1)"), Error);
}

}  // namespace
}  // namespace itml
