#include <gtest/gtest.h>

#include <random>

#include "itml/lattice.hpp"
#include "itml/oracle.hpp"
#include "support.hpp"

namespace itml {
namespace {

ExprP num(int64_t n) { return Expr::integer(n); }
ExprP pair(ExprP a, ExprP b) { return Expr::pair(std::move(a), std::move(b)); }
const ExprP& hole() { return Expr::hole(); }

TEST(Leq, PairPrefix) {
  EXPECT_TRUE(leq(*pair(num(1), hole()), *pair(num(1), num(2))));
  EXPECT_FALSE(leq(*pair(num(1), num(2)), *pair(num(1), hole())));
  EXPECT_TRUE(leq(*Value::pair(Value::integer(1), Value::hole()),
                  *Value::pair(Value::integer(1), Value::integer(2))));
}

TEST(Leq, Reflexive) {
  ExprP e = pair(num(1), Expr::prim(PrimOp::Add, num(2), num(2)));
  EXPECT_TRUE(leq(*e, *e));
}

TEST(Leq, TraceHoleNeedsMatchingAnnotations) {
  TraceP t = Trace::ref(0, num(1));
  EXPECT_TRUE(leq(*Trace::hole(LocationSet::of({Cell{0, -1}}), Outcome::Val), *t));
  EXPECT_FALSE(leq(*Trace::hole(LocationSet{}, Outcome::Val), *t));
  EXPECT_FALSE(leq(*Trace::hole(LocationSet::of({Cell{0, -1}}), Outcome::Exn), *t));
}

TEST(Meet, PairsAgreeingOnTheFirstComponent) {
  ExprP a = pair(num(1), num(2));
  ExprP b = pair(num(1), Expr::prim(PrimOp::Add, num(2), num(2)));
  EXPECT_TRUE(equal_terms(meet(a, b), pair(num(1), hole())));
}

TEST(Meet, WithHoleIsHole) {
  EXPECT_TRUE(meet(pair(num(1), num(2)), hole())->is_hole());
  TraceP t = Trace::ref(0, num(1));
  TraceP m = meet(t, Trace::hole(t->writes, t->outcome));
  ASSERT_TRUE(m->is_hole());
  EXPECT_EQ(m->writes, t->writes);
  EXPECT_EQ(m->outcome, Outcome::Val);
}

TEST(Meet, Pointwise) {
  EXPECT_TRUE(equal_terms(meet(pair(num(1), hole()), pair(hole(), num(2))), pair(hole(), hole())));
}

TEST(Join, Pointwise) {
  EXPECT_TRUE(equal_terms(join(pair(num(1), hole()), pair(hole(), num(2))), pair(num(1), num(2))));
}

TEST(Join, WithHoleIsIdentity) {
  ExprP e = pair(num(1), num(2));
  EXPECT_TRUE(equal_terms(join(e, hole()), e));
  EXPECT_TRUE(equal_terms(join(hole(), e), e));
}

TEST(Join, IncompatibleTermsHaveNoJoin) {
  EXPECT_THROW(join(pair(num(1), hole()), pair(num(2), hole())), UndefinedJoin);
  EXPECT_FALSE(compatible(*pair(num(1), hole()), *pair(num(2), hole())));
}

TEST(Writes, PerTraceForm) {
  EXPECT_TRUE(writes(*Trace::ret(num(1))).empty());
  EXPECT_EQ(writes(*Trace::ref(4, num(1))).cells(), (std::vector<Cell>{{4, -1}}));
  EXPECT_EQ(writes(*Trace::arr_make(2, 3, num(3), num(0))).cells(),
            (std::vector<Cell>{{2, 0}, {2, 1}, {2, 2}}));
  EXPECT_TRUE(writes(*Trace::arr_get(Expr::var("a"), num(1), 2, 3, 1)).empty());
  EXPECT_EQ(writes(*Trace::arr_set(Expr::var("a"), num(1), 2, 3, 1, num(9))).cells(), (std::vector<Cell>{{2, 1}}));
  TraceP seq = Trace::let_s("x", Trace::ref(0, num(1)), Trace::assign(Expr::var("x"), 0, num(2)));
  EXPECT_EQ(writes(*seq).cells(), (std::vector<Cell>{{0, -1}}));
}

TEST(Outcome, PerTraceForm) {
  EXPECT_EQ(outcome(*Trace::raise(Expr::str("e"))), Outcome::Exn);
  EXPECT_EQ(outcome(*Trace::let_s("x", Trace::ret(num(1)), Trace::raise(Expr::str("e")))), Outcome::Exn);
  EXPECT_EQ(outcome(*Trace::let_s("x", Trace::ret(num(1)), Trace::ret(num(2)))), Outcome::Val);
  EXPECT_EQ(outcome(*Trace::let_f("x", Trace::raise(Expr::str("e")))), Outcome::Exn);
  EXPECT_EQ(outcome(*Trace::hole(LocationSet{}, Outcome::Exn)), Outcome::Exn);
  EXPECT_EQ(outcome(*Trace::div_fail(DivOp::Div, num(1), num(0))), Outcome::Exn);
}

TEST(Erase, EmptySetChangesNothing) {
  Store s;
  s.set(Cell{0, -1}, Value::integer(5));
  EXPECT_TRUE(equal_terms(erase(s, LocationSet{}), s));
}

TEST(Erase, ScalarCell) {
  Store s;
  s.set(Cell{0, -1}, Value::integer(5));
  EXPECT_TRUE(erase(s, LocationSet::of({Cell{0, -1}})).get(Cell{0, -1})->is_hole());
}

TEST(Erase, OneArrayElement) {
  Store s;
  s.set(Cell{0, 0}, Value::integer(1));
  s.set(Cell{0, 1}, Value::integer(2));
  Store e = erase(s, LocationSet::of({Cell{0, 1}}));
  EXPECT_TRUE(equal_terms(e.get(Cell{0, 0}), Value::integer(1)));
  EXPECT_TRUE(e.get(Cell{0, 1})->is_hole());
  EXPECT_FALSE(disjoint(s, LocationSet::of({Cell{0, 1}})));
  EXPECT_TRUE(disjoint(e, LocationSet::of({Cell{0, 1}})));
}

TEST(Enumerate, PairOfLiterals) {
  auto ps = enumerate_prefixes(pair(num(1), num(2)));
  EXPECT_TRUE(ps.front()->is_hole());
  EXPECT_TRUE(equal_terms(ps.back(), pair(num(1), num(2))));
  // The four prefixes usually listed for (1,2), plus (□,□): a pair of holes
  // is a prefix of (1,2) distinct from the hole itself.
  std::vector<ExprP> expected{hole(), pair(hole(), hole()), pair(num(1), hole()), pair(hole(), num(2)),
                              pair(num(1), num(2))};
  ASSERT_EQ(ps.size(), expected.size());
  for (const auto& want : expected) {
    int found = 0;
    for (const auto& p : ps) found += equal_terms(p, want);
    EXPECT_EQ(found, 1) << render_term(*want);
  }
}

TEST(Enumerate, HoleHasOnePrefix) {
  auto ps = enumerate_prefixes(hole());
  ASSERT_EQ(ps.size(), 1u);
  EXPECT_TRUE(ps[0]->is_hole());
}

// Independent count: a non-hole node contributes itself with any choice of
// prefix for each child, plus the hole.
uint64_t count_by_formula(const Expr& e) {
  if (e.is_hole()) return 1;
  uint64_t product = 1;
  if (e.e1) product *= count_by_formula(*e.e1);
  if (e.e2) product *= count_by_formula(*e.e2);
  return 1 + product;
}

TEST(Enumerate, NestedPairCount) {
  ExprP e = pair(pair(num(1), num(2)), num(3));
  // □, or (a, b) with a one of the 5 prefixes of (1,2) and b one of □, 3.
  std::vector<ExprP> listing{hole()};
  for (const auto& a : {hole(), pair(hole(), hole()), pair(num(1), hole()), pair(hole(), num(2)),
                        pair(num(1), num(2))}) {
    for (const auto& b : {hole(), num(3)}) listing.push_back(pair(a, b));
  }
  EXPECT_EQ(listing.size(), 11u);
  EXPECT_EQ(count_by_formula(*e), 11u);
  EXPECT_EQ(count_prefixes(*e), 11u);
  auto ps = enumerate_prefixes(e);
  ASSERT_EQ(ps.size(), listing.size());
  for (const auto& want : listing) {
    int found = 0;
    for (const auto& p : ps) found += equal_terms(p, want);
    EXPECT_EQ(found, 1) << render_term(*want);
  }
}

TEST(Enumerate, CapIsEnforced) {
  ExprP e = num(0);
  for (int i = 1; i < 20; ++i) e = pair(e, num(i));
  EXPECT_THROW(enumerate_prefixes(e), CapExceeded);
}

// ---------------------------------------------------------------------------
// lattice laws inside Prefix(t) for generated programs and their traces
// ---------------------------------------------------------------------------

template <class P>
void check_lattice_laws(const std::vector<P>& elems, const P& top, std::mt19937_64& rng) {
  ASSERT_FALSE(elems.empty());
  std::uniform_int_distribution<size_t> pick(0, elems.size() - 1);
  const P& bottom = elems.front();
  for (int round = 0; round < 40; ++round) {
    const P& a = elems[pick(rng)];
    const P& b = elems[pick(rng)];
    const P& c = elems[pick(rng)];
    ASSERT_TRUE(leq(*a, *top));
    ASSERT_TRUE(leq(*bottom, *a));
    ASSERT_TRUE(leq(*a, *a));
    if (leq(*a, *b) && leq(*b, *a)) ASSERT_TRUE(equal_terms(a, b));
    if (leq(*a, *b) && leq(*b, *c)) ASSERT_TRUE(leq(*a, *c));

    P m = meet(a, b);
    P j = join(a, b);
    ASSERT_TRUE(leq(*m, *a) && leq(*m, *b));
    ASSERT_TRUE(leq(*a, *j) && leq(*b, *j));
    ASSERT_TRUE(leq(*j, *top));
    // Greatest lower bound and least upper bound among all elements.
    for (const P& x : elems) {
      if (leq(*x, *a) && leq(*x, *b)) ASSERT_TRUE(leq(*x, *m));
      if (leq(*a, *x) && leq(*b, *x)) ASSERT_TRUE(leq(*j, *x));
    }
    ASSERT_TRUE(equal_terms(meet(a, b), meet(b, a)));
    ASSERT_TRUE(equal_terms(join(a, b), join(b, a)));
    ASSERT_TRUE(equal_terms(meet(a, a), a));
    ASSERT_TRUE(equal_terms(join(a, a), a));
    ASSERT_TRUE(equal_terms(meet(meet(a, b), c), meet(a, meet(b, c))));
    ASSERT_TRUE(equal_terms(join(join(a, b), c), join(a, join(b, c))));
    ASSERT_TRUE(equal_terms(meet(a, join(a, b)), a));
    ASSERT_TRUE(equal_terms(join(a, meet(a, b)), a));
  }
}

TEST(LatticeLaws, ProgramsAndTraces) {
  std::mt19937_64 rng(11);
  EnumerateLimits lim{16, 600};
  int programs = 0, traces = 0;
  for (uint64_t seed = 0; seed < 80; ++seed) {
    CompP m = generate_program(seed, 3);
    RunRecord r = eval_comp(Env{}, Store{}, m);
    if (count_prefixes(*m) <= 600 && hole_points(*m) <= 16) {
      auto ps = enumerate_prefixes(m, lim);
      ASSERT_EQ(ps.size(), count_prefixes(*m));
      check_lattice_laws(ps, m, rng);
      ++programs;
    }
    if (count_prefixes(*r.trace) <= 600 && hole_points(*r.trace) <= 16) {
      auto ts = enumerate_prefixes(r.trace, lim);
      ASSERT_EQ(ts.size(), count_prefixes(*r.trace));
      check_lattice_laws(ts, r.trace, rng);
      // Prefixes of a trace keep its annotations.
      for (const TraceP& t : ts) {
        ASSERT_EQ(t->writes, r.trace->writes);
        ASSERT_EQ(t->outcome, r.trace->outcome);
      }
      ++traces;
    }
  }
  EXPECT_GT(programs, 20);
  EXPECT_GT(traces, 20);
}

TEST(LatticeLaws, ValuesAndStores) {
  std::mt19937_64 rng(5);
  for (uint64_t seed = 0; seed < 80; ++seed) {
    RunRecord r = eval_comp(Env{}, Store{}, generate_program(seed, 4));
    if (count_prefixes(*r.result.value) <= 600 && hole_points(*r.result.value) <= 16) {
      check_lattice_laws(enumerate_prefixes(r.result.value, {16, 600}), r.result.value, rng);
    }
    if (count_prefixes(r.final_store) <= 600) {
      auto stores = enumerate_prefixes(r.final_store, {16, 600});
      ASSERT_EQ(stores.size(), count_prefixes(r.final_store));
      std::uniform_int_distribution<size_t> pick(0, stores.size() - 1);
      for (int k = 0; k < 20; ++k) {
        const Store& a = stores[pick(rng)];
        const Store& b = stores[pick(rng)];
        ASSERT_TRUE(leq(a, r.final_store));
        Store m = meet(a, b), j = join(a, b);
        ASSERT_TRUE(leq(m, a) && leq(m, b) && leq(a, j) && leq(b, j));
        ASSERT_TRUE(equal_terms(meet(a, join(a, b)), a));
      }
    }
  }
}

TEST(LatticeLaws, EraseIsIdempotent) {
  for (uint64_t seed = 0; seed < 200; ++seed) {
    RunRecord r = eval_comp(Env{}, Store{}, generate_program(seed, 5));
    const LocationSet& w = writes(*r.trace);
    Store once = erase(r.final_store, w);
    EXPECT_TRUE(equal_terms(erase(once, w), once));
    EXPECT_TRUE(disjoint(once, w));
    EXPECT_TRUE(leq(once, r.final_store));
  }
}

}  // namespace
}  // namespace itml
