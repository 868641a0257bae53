#include <gtest/gtest.h>

#include <fmt/format.h>

#include <random>
#include <set>

#include "itml/frontend.hpp"
#include "itml/lattice.hpp"
#include "itml/oracle.hpp"
#include "support.hpp"

namespace itml {
namespace {

using K = SNode::Kind;
using test::shaded_texts;
using Texts = std::vector<std::string>;

// ---------------------------------------------------------------------------
// parsing
// ---------------------------------------------------------------------------

TEST(Parse, ReturnUnit) {
  SurfaceProgram p = parse_program("return ()");
  EXPECT_EQ(p.root->kind, K::Return);
  EXPECT_TRUE(equal_terms(elaborate(p).program, Comp::ret(Expr::unit())));
}

TEST(Parse, ArrayLoopListing) {
  SurfaceProgram p = parse_program(test::read_text(test::program_path("array_loop.itml")));
  const SNode* n = p.root.get();
  std::vector<std::string> names;
  while (n->kind == K::Let) {
    names.push_back(n->name);
    n = n->kids[1].get();
  }
  EXPECT_EQ(names, (std::vector<std::string>{"x", "i", "s"}));
  EXPECT_EQ(n->kind, K::While);
  EXPECT_EQ(p.root->kids[0]->kind, K::ArrayLit);
}

TEST(Parse, UnfinishedPairReportsPosition) {
  try {
    parse_program("(1,");
    FAIL() << "expected a syntax error";
  } catch (const SyntaxError& e) {
    EXPECT_EQ(e.where.offset, 3u);
    EXPECT_EQ(e.where.line, 1u);
    EXPECT_EQ(e.where.column, 4u);
  }
}

TEST(Parse, ErrorsCarryLineAndColumn) {
  try {
    parse_program("let x = 1 in\nlet y = in y");
    FAIL() << "expected a syntax error";
  } catch (const SyntaxError& e) {
    EXPECT_EQ(e.where.line, 2u);
    EXPECT_EQ(e.where.column, 9u);
    EXPECT_NE(std::string(e.what()).find("line 2, column 9"), std::string::npos);
  }
  EXPECT_THROW(parse_program("let x = \"unterminated in x"), SyntaxError);
  EXPECT_THROW(parse_program("1 < 2 < 3"), SyntaxError);
}

TEST(Parse, IndexingNeedsAdjacentBracket) {
  SurfaceProgram a = parse_program("let a = [|1|] in a[0]");
  EXPECT_EQ(a.root->kids[1]->kind, K::Index);
  SurfaceProgram b = parse_program("let f = fun l -> return l in f [1, 2]");
  EXPECT_EQ(b.root->kids[1]->kind, K::App);
  EXPECT_EQ(b.root->kids[1]->kids[1]->kind, K::ListLit);
}

TEST(Parse, LiteralsAndComments) {
  auto l = test::load_source("-- leading comment\nlet x = -3 in\nlet y = 2.5e1 in -- trailing\nreturn (x, y, \"a\\n\", true)");
  ValueP expected = Value::pair(Value::integer(-3),
                                Value::pair(Value::floating(25.0), Value::pair(Value::str("a\n"), Value::boolean(true))));
  EXPECT_TRUE(equal_terms(l.run.result.value, expected)) << render_value(*l.run.result.value);
}

TEST(Parse, OperatorPrecedence) {
  auto l = test::load_source("return (1 + 2 * 3 - 4, not (1 < 2) || 2 <= 2 && true, 7 mod 4)");
  ValueP expected = Value::pair(Value::integer(3), Value::pair(Value::boolean(true), Value::integer(3)));
  EXPECT_TRUE(equal_terms(l.run.result.value, expected)) << render_value(*l.run.result.value);
}

// ---------------------------------------------------------------------------
// elaboration
// ---------------------------------------------------------------------------

TEST(Elaborate, AssignmentFromDereference) {
  auto l = test::load_source("let s = ref 41 in s := !s + 1");
  const Comp& body = *l.elaboration.program->m2;
  ASSERT_EQ(body.kind, Comp::Kind::Let);
  EXPECT_EQ(body.x[0], '$');
  EXPECT_EQ(body.m1->kind, Comp::Kind::Deref);
  EXPECT_TRUE(equal_terms(body.m1->e1, Expr::var("s")));
  ASSERT_EQ(body.m2->kind, Comp::Kind::Assign);
  EXPECT_TRUE(equal_terms(body.m2->e2, Expr::prim(PrimOp::Add, Expr::var(body.x), Expr::integer(1))));
  EXPECT_TRUE(equal_terms(l.run.final_store.get(Cell{0, -1}), Value::integer(42)));
}

TEST(Elaborate, SequenceIsAWildcardLet) {
  SurfaceProgram p = parse_program("let r = ref 0 in r := 1 ;; r := 2");
  CompP m = elaborate(p).program;
  ASSERT_EQ(m->m2->kind, Comp::Kind::Let);
  EXPECT_EQ(m->m2->x, "_");
  EXPECT_EQ(m->m2->m1->kind, Comp::Kind::Assign);
  EXPECT_EQ(m->m2->m2->kind, Comp::Kind::Assign);
}

TEST(Elaborate, WhileFalseDoesNothing) {
  auto l = test::load_source("let r = ref 0 in while false do r := 1");
  EXPECT_TRUE(equal_terms(l.run.result, Result{Outcome::Val, Value::unit()}));
  EXPECT_TRUE(equal_terms(l.run.final_store.get(Cell{0, -1}), Value::integer(0)));
}

TEST(Elaborate, UnboundVariable) {
  try {
    elaborate(parse_program("let x = 1 in y"));
    FAIL() << "expected an elaboration error";
  } catch (const ElaborationError& e) {
    EXPECT_EQ(e.where.column, 14u);
  }
}

TEST(Elaborate, AdministrativeNamesAreNotWritable) {
  EXPECT_THROW(parse_program("let $0 = 1 in $0"), SyntaxError);
}

TEST(Elaborate, MapPreludeOnlyWhenMapIsFree) {
  EXPECT_TRUE(elaborate(parse_program("map (fun x -> return x) [1]")).uses_prelude);
  EXPECT_FALSE(elaborate(parse_program("let map = fun f -> return f in map 1")).uses_prelude);
  auto l = test::load_source("map (fun x -> return x * 10) [1, 2, 3]");
  EXPECT_EQ(render_value(*l.run.result.value), "inr (10, inr (20, inr (30, inl ())))");
}

TEST(Elaborate, CurriedAndPairParameters) {
  auto l = test::load_source("let f = fun a (b, c) => return a + b * c in f 1 (2, 3)");
  EXPECT_TRUE(equal_terms(l.run.result.value, Value::integer(7)));
}

TEST(Elaborate, EffectsRunLeftToRight) {
  auto l = test::load_source(
      "let r = ref 0 in\n"
      "let next = fun u -> (r := !r + 1; !r) in\n"
      "return (next (), next () * 10, [| next (), next () |][1])");
  EXPECT_EQ(render_value(*l.run.result.value), "(1, (20, 4))");
}

// Every node of the elaborated program serves some surface span, and the
// spans of user-written nodes nest within their parent's.
void check_spans(const ElaborationMap& map, const Expr& e, MaybeSpan parent, int& orphans, int& unnested);
void check_spans(const ElaborationMap& map, const Comp& m, MaybeSpan parent, int& orphans, int& unnested) {
  MaybeSpan s = map.span_of(m);
  if (!s) ++orphans;
  if (m.span && parent && (m.span->begin < parent->begin || m.span->end > parent->end)) ++unnested;
  MaybeSpan next = m.span ? m.span : parent;
  for (const ExprP* e : {&m.e1, &m.e2, &m.e3}) {
    if (*e) check_spans(map, **e, next, orphans, unnested);
  }
  for (const CompP* c : {&m.m1, &m.m2}) {
    if (*c) check_spans(map, **c, next, orphans, unnested);
  }
}
void check_spans(const ElaborationMap& map, const Expr& e, MaybeSpan parent, int& orphans, int& unnested) {
  if (!map.span_of(e)) ++orphans;
  if (e.span && parent && (e.span->begin < parent->begin || e.span->end > parent->end)) ++unnested;
  MaybeSpan next = e.span ? e.span : parent;
  if (e.e1) check_spans(map, *e.e1, next, orphans, unnested);
  if (e.e2) check_spans(map, *e.e2, next, orphans, unnested);
  if (e.body) check_spans(map, *e.body, next, orphans, unnested);
}

TEST(Elaborate, EveryNodeHasASpan) {
  for (const char* name : {"array_loop.itml", "map_div.itml", "gauss.itml", "list_build.itml"}) {
    auto l = test::load_program(name);
    int orphans = 0, unnested = 0;
    check_spans(l.elaboration.map, *l.elaboration.program, std::nullopt, orphans, unnested);
    EXPECT_EQ(orphans, 0) << name;
    EXPECT_EQ(unnested, 0) << name;
  }
}

// Straight-line programs over integers and references, evaluated directly by
// the generator as it writes the text.
struct StraightLine {
  std::string text;
  int64_t result = 0;
  std::vector<int64_t> refs;
};

StraightLine straight_line_program(uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto below = [&](int n) { return int(std::uniform_int_distribution<int>(0, n - 1)(rng)); };
  std::vector<std::pair<std::string, int64_t>> vars;
  StraightLine out;

  std::function<std::pair<std::string, int64_t>(int)> expr = [&](int depth) -> std::pair<std::string, int64_t> {
    int choice = below(depth > 0 ? 6 : 3);
    if (choice == 1 && !vars.empty()) return vars[below(int(vars.size()))];
    if (choice == 2 && !out.refs.empty()) {
      int k = below(int(out.refs.size()));
      return {fmt::format("!r{}", k), out.refs[k]};
    }
    if (choice >= 3) {
      auto a = expr(depth - 1), b = expr(depth - 1);
      const char* op = choice == 3 ? "+" : choice == 4 ? "-" : "*";
      int64_t v = choice == 3 ? a.second + b.second : choice == 4 ? a.second - b.second : a.second * b.second;
      if (v > -1000000 && v < 1000000) return {fmt::format("({} {} {})", a.first, op, b.first), v};
    }
    int64_t n = below(21) - 10;
    return {std::to_string(n), n};
  };

  int statements = 3 + below(8);
  for (int k = 0; k < statements; ++k) {
    int kind = below(4);
    if (kind == 0 || out.refs.empty()) {
      auto e = expr(2);
      if (below(2) == 0) {
        std::string name = fmt::format("v{}", vars.size());
        out.text += fmt::format("let {} = {} in\n", name, e.first);
        vars.emplace_back(name, e.second);
      } else {
        out.text += fmt::format("let r{} = ref {} in\n", out.refs.size(), e.first);
        out.refs.push_back(e.second);
      }
    } else if (kind == 1 || kind == 2) {
      int r = below(int(out.refs.size()));
      auto e = expr(2);
      out.text += fmt::format("r{} := {};\n", r, e.first);
      out.refs[r] = e.second;
    } else {
      int r = below(int(out.refs.size()));
      auto a = expr(1), b = expr(1), t = expr(1), f = expr(1);
      out.text += fmt::format("if {} < {} then r{} := {} else r{} := {};\n", a.first, b.first, r, t.first, r, f.first);
      out.refs[r] = a.second < b.second ? t.second : f.second;
    }
  }
  auto e = expr(2);
  out.text += fmt::format("return {}", e.first);
  out.result = e.second;
  return out;
}

TEST(Elaborate, AgreesWithDirectEvaluationOnStraightLinePrograms) {
  for (uint64_t seed = 0; seed < 300; ++seed) {
    StraightLine p = straight_line_program(seed);
    auto l = test::load_source(p.text);
    ASSERT_TRUE(equal_terms(l.run.result, Result{Outcome::Val, Value::integer(p.result)})) << p.text;
    for (size_t k = 0; k < p.refs.size(); ++k) {
      ASSERT_TRUE(equal_terms(l.run.final_store.get(Cell{Location(k), -1}), Value::integer(p.refs[k]))) << p.text;
    }
  }
}

TEST(ElaborateAligned, HolesGiveAPrefixOfTheFullProgram) {
  std::string full = test::read_text(test::program_path("array_loop.itml"));
  SurfaceProgram f = parse_program(full);
  Elaboration e = elaborate(f);
  auto replace = [&](const std::string& from, const std::string& to) {
    std::string s = full;
    s.replace(s.find(from), from.size(), to);
    return s;
  };
  for (auto [from, to] : std::vector<std::pair<std::string, std::string>>{
           {"!s;", "_;"}, {"x[!i]", "_"}, {"[|0,1,2,3|]", "_"}, {"i := !i + 2", "_"}, {"1,2", "_,2"}}) {
    Elaboration p = elaborate_aligned(parse_program(replace(from, to)), f);
    EXPECT_TRUE(leq(*p.program, *e.program)) << to;
    EXPECT_FALSE(equal_terms(p.program, e.program)) << to;
  }
  EXPECT_TRUE(equal_terms(elaborate_aligned(f, f).program, e.program));
  EXPECT_THROW(elaborate_aligned(parse_program(replace("i + 2", "i + 3")), f), ShapeMismatch);
  EXPECT_THROW(elaborate_aligned(parse_program("return ()"), f), ShapeMismatch);
}

// ---------------------------------------------------------------------------
// core round trip
// ---------------------------------------------------------------------------

TEST(RoundTrip, GeneratedProgramsAndPrefixes) {
  std::mt19937_64 rng(17);
  for (uint64_t seed = 0; seed < 400; ++seed) {
    CompP m = generate_program(seed, 7);
    for (const CompP& t : {m, test::random_prefix(m, 0.1, rng), test::random_prefix(m, 0.3, rng)}) {
      std::string text = render_term(*t);
      CompP back = parse_core(text);
      ASSERT_TRUE(equal_terms(back, t)) << text << "\n---\n" << render_term(*back);
    }
  }
}

TEST(RoundTrip, ElaboratedExamples) {
  std::mt19937_64 rng(23);
  for (const char* name : {"array_loop.itml", "map_div.itml", "gauss.itml", "list_build.itml"}) {
    CompP m = test::load_program(name).elaboration.program;
    for (const CompP& t : {m, test::random_prefix(m, 0.05, rng)}) {
      std::string text = render_term(*t);
      ASSERT_TRUE(equal_terms(parse_core(text), t)) << name << "\n" << text;
    }
  }
}

TEST(RoundTrip, Literals) {
  for (const char* text : {"return -5", "return 1.0e-300", "return (inf, -inf)", "return \"q\\\"\\\\\"",
                           "return inl (inr ())", "return fst (snd (1, (2, 3)))", "return (not true, -(1))"}) {
    CompP m = parse_core(text);
    ASSERT_TRUE(equal_terms(parse_core(render_term(*m)), m)) << text;
  }
}

// ---------------------------------------------------------------------------
// criteria
// ---------------------------------------------------------------------------

TEST(Criterion, ReferenceByName) {
  auto l = test::load_program("array_loop.itml");
  Criterion c = parse_criterion("!s = 2", l.run);
  EXPECT_EQ(c.store.size(), 1u);
  EXPECT_TRUE(equal_terms(c.store.get(Cell{2, -1}), Value::integer(2)));
  EXPECT_EQ(c.result.outcome, Outcome::Val);
  EXPECT_TRUE(c.result.value->is_hole());
}

TEST(Criterion, ExceptionPatterns) {
  auto l = test::load_program("map_div.itml");
  Criterion any = parse_criterion("result = exn _", l.run);
  EXPECT_TRUE(any.store.empty());
  EXPECT_EQ(any.result.outcome, Outcome::Exn);
  EXPECT_TRUE(any.result.value->is_hole());
  Criterion full = parse_criterion("result = exn \"division by zero\"", l.run);
  EXPECT_TRUE(equal_terms(full.result.value, Value::str("division by zero")));
}

TEST(Criterion, EmptyTextDemandsNothing) {
  auto l = test::load_program("array_loop.itml");
  Criterion c = parse_criterion("", l.run);
  EXPECT_TRUE(c.store.empty());
  EXPECT_TRUE(c.result.value->is_hole());
  EXPECT_EQ(c.result.outcome, Outcome::Val);
}

TEST(Criterion, IndexedAndCombined) {
  auto l = test::load_program("array_loop.itml");
  Criterion c = parse_criterion("x[3] = 2, !i = _, x[0] = 0, result = val ()", l.run);
  EXPECT_TRUE(equal_terms(c.store.get(Cell{0, 3}), Value::integer(2)));
  EXPECT_TRUE(equal_terms(c.store.get(Cell{0, 0}), Value::integer(0)));
  EXPECT_TRUE(equal_terms(c.result.value, Value::unit()));
  auto g = test::load_program("gauss.itml");
  Criterion n = parse_criterion("as'[1][0] = 0.0", g.run);
  EXPECT_EQ(n.store.size(), 1u);
}

TEST(Criterion, Errors) {
  auto l = test::load_program("array_loop.itml");
  EXPECT_THROW(parse_criterion("!nope = 1", l.run), CriterionError);
  EXPECT_THROW(parse_criterion("x[4] = 1", l.run), CriterionError);
  EXPECT_THROW(parse_criterion("!s = 3", l.run), CriterionError);
  EXPECT_THROW(parse_criterion("result = exn _", l.run), CriterionError);
  EXPECT_THROW(parse_criterion("!x = 1", l.run), CriterionError);
  EXPECT_THROW(parse_criterion("!s = 2, !s = 3", l.run), CriterionError);
  EXPECT_THROW(parse_criterion("!s == 2", l.run), CriterionError);
  EXPECT_NO_THROW(parse_criterion("!s = 2, !s = _", l.run));
}

// ---------------------------------------------------------------------------
// shading
// ---------------------------------------------------------------------------

TEST(Shading, AllHoleSliceShadesEverything) {
  auto l = test::load_program("array_loop.itml");
  const std::string& src = l.surface.source;
  auto ranges = shaded_ranges(l.elaboration, *Comp::hole(), src);
  ASSERT_EQ(ranges.size(), 1u);
  EXPECT_EQ(ranges[0].begin, 0u);
  EXPECT_EQ(src.substr(ranges[0].end), std::string(src.substr(ranges[0].end).size(), '\n'));
  EXPECT_EQ(shaded_texts(l, "").size(), 1u);
}

TEST(Shading, FullSliceShadesNothing) {
  auto l = test::load_program("array_loop.itml");
  EXPECT_TRUE(shaded_ranges(l.elaboration, *l.elaboration.program, l.surface.source).empty());
}

TEST(Shading, ArrayLoopGoldens) {
  auto l = test::load_program("array_loop.itml");
  EXPECT_EQ(shaded_texts(l, "!s = 2"), (Texts{"1", "3", "x[!i+1] <- !s"}));
  EXPECT_EQ(shaded_texts(l, "!i = 4"), (Texts{"[|0,1,2,3|]", "ref 0", "s := !s + x[!i]", "x[!i+1] <- !s"}));
  EXPECT_EQ(shaded_texts(l, "x[3] = 2"), (Texts{"1", "3"}));
}

TEST(Shading, MapDivisionGolden) {
  auto l = test::load_program("map_div.itml");
  EXPECT_EQ(shaded_texts(l, "result = exn \"division by zero\""), (Texts{"ref 1", "a"}));
}

TEST(Shading, MarkersAndColour) {
  auto l = test::load_program("array_loop.itml");
  BackwardSlice s = bwd_comp(parse_criterion("!s = 2", l.run), l.run);
  std::string marked = render_slice(*s.program, l.elaboration, l.surface.source);
  EXPECT_NE(marked.find("[|0,⟦1⟧,2,⟦3⟧|]"), std::string::npos) << marked;
  EXPECT_NE(marked.find("⟦x[!i+1] <- !s⟧"), std::string::npos) << marked;
  std::string ansi = render_slice(*s.program, l.elaboration, l.surface.source, ShadeStyle::Ansi);
  EXPECT_NE(ansi.find("\x1b[2;37m1\x1b[0m"), std::string::npos);
}

std::set<uint32_t> shaded_bytes(const std::vector<ShadedRange>& ranges) {
  std::set<uint32_t> out;
  for (const ShadedRange& r : ranges) {
    for (uint32_t b = r.begin; b < r.end; ++b) out.insert(b);
  }
  return out;
}

TEST(Shading, SmallerSlicesShadeMore) {
  std::mt19937_64 rng(29);
  for (const char* name : {"array_loop.itml", "map_div.itml", "gauss.itml"}) {
    auto l = test::load_program(name);
    const std::string& src = l.surface.source;
    for (int k = 0; k < 40; ++k) {
      CompP s2 = test::random_prefix(l.elaboration.program, 0.05, rng);
      CompP s1 = test::random_prefix(s2, 0.05, rng);
      auto b1 = shaded_bytes(shaded_ranges(l.elaboration, *s1, src));
      auto b2 = shaded_bytes(shaded_ranges(l.elaboration, *s2, src));
      ASSERT_TRUE(std::includes(b1.begin(), b1.end(), b2.begin(), b2.end())) << name;
    }
    // The same holds along criteria chains.
    for (int k = 0; k < 20; ++k) {
      Criterion c2 = test::random_criterion(l.run, 0.3, rng);
      Criterion c1{Result{c2.result.outcome, test::random_prefix(c2.result.value, 0.3, rng)},
                   test::random_prefix(c2.store, 0.3, rng)};
      auto b1 = shaded_bytes(shaded_ranges(l.elaboration, *bwd_comp(c1, l.run).program, src));
      auto b2 = shaded_bytes(shaded_ranges(l.elaboration, *bwd_comp(c2, l.run).program, src));
      ASSERT_TRUE(std::includes(b1.begin(), b1.end(), b2.begin(), b2.end())) << name;
    }
  }
}

TEST(Shading, RangesAreSortedDisjointAndTrimmed) {
  std::mt19937_64 rng(31);
  auto l = test::load_program("gauss.itml");
  const std::string& src = l.surface.source;
  for (int k = 0; k < 30; ++k) {
    auto ranges = shaded_ranges(l.elaboration, *test::random_prefix(l.elaboration.program, 0.05, rng), src);
    for (size_t i = 0; i < ranges.size(); ++i) {
      ASSERT_LT(ranges[i].begin, ranges[i].end);
      ASSERT_FALSE(std::isspace(static_cast<unsigned char>(src[ranges[i].begin])));
      ASSERT_FALSE(std::isspace(static_cast<unsigned char>(src[ranges[i].end - 1])));
      if (i > 0) ASSERT_LT(ranges[i - 1].end, ranges[i].begin);
    }
  }
}

}  // namespace
}  // namespace itml
