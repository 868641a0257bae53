#pragma once

// Abstract syntax of the core language: expressions, computations, values,
// traces, environments and stores. Every category has an in-band hole.
// Nodes are immutable once built and shared through shared_ptr.

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace itml {

// ---------------------------------------------------------------------------
// errors
// ---------------------------------------------------------------------------

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Evaluation reached a state with no applicable rule.
class StuckError : public Error {
 public:
  using Error::Error;
};

// A partial term is not a prefix of the term it was supposed to approximate.
class ShapeMismatch : public Error {
 public:
  using Error::Error;
};

// Two terms have no common upper bound.
class UndefinedJoin : public Error {
 public:
  using Error::Error;
};

class CapExceeded : public Error {
 public:
  using Error::Error;
};

// ---------------------------------------------------------------------------
// basic pieces
// ---------------------------------------------------------------------------

struct SourceSpan {
  uint32_t begin = 0;
  uint32_t end = 0;
  bool operator==(const SourceSpan&) const = default;
  auto operator<=>(const SourceSpan&) const = default;
};
using MaybeSpan = std::optional<SourceSpan>;

using Location = uint32_t;

// A store key: a scalar location (index < 0) or one element of an array.
struct Cell {
  Location loc = 0;
  int64_t index = -1;

  bool is_element() const { return index >= 0; }
  bool operator==(const Cell&) const = default;
  auto operator<=>(const Cell&) const = default;
};

struct CellHash {
  size_t operator()(const Cell& c) const noexcept {
    return std::hash<uint64_t>()((uint64_t(c.loc) << 32) ^ uint64_t(c.index + 1));
  }
};

enum class Outcome : uint8_t { Val, Exn };

enum class PrimOp : uint8_t { Add, Sub, Mul, Lt, Le, Gt, Ge, Eq, Ne, And, Or, Not, Neg };
enum class DivOp : uint8_t { Div, Mod };
enum class ArrOp : uint8_t { Make, Get, Set };

bool is_unary(PrimOp op);
std::string_view op_symbol(PrimOp op);
std::string_view op_symbol(DivOp op);
std::string_view outcome_name(Outcome k);

struct Expr;
struct Comp;
struct Value;
struct Trace;
using ExprP = std::shared_ptr<const Expr>;
using CompP = std::shared_ptr<const Comp>;
using ValueP = std::shared_ptr<const Value>;
using TraceP = std::shared_ptr<const Trace>;

// ---------------------------------------------------------------------------
// expressions and computations
// ---------------------------------------------------------------------------

struct Expr {
  enum class Kind : uint8_t { Hole, Var, Unit, Bool, Int, Float, Str, Pair, Fst, Snd, Inl, Inr, Fun, Prim };

  Kind kind = Kind::Hole;
  PrimOp op = PrimOp::Add;
  bool b = false;
  int64_t i = 0;
  double f = 0.0;
  std::string name;   // variable, string literal, or function name
  std::string param;  // function parameter
  ExprP e1, e2;
  CompP body;
  MaybeSpan span;

  bool is_hole() const { return kind == Kind::Hole; }

  static const ExprP& hole();
  static ExprP hole_at(MaybeSpan span);
  static ExprP var(std::string x, MaybeSpan span = {});
  static ExprP unit(MaybeSpan span = {});
  static ExprP boolean(bool v, MaybeSpan span = {});
  static ExprP integer(int64_t v, MaybeSpan span = {});
  static ExprP floating(double v, MaybeSpan span = {});
  static ExprP str(std::string s, MaybeSpan span = {});
  static ExprP pair(ExprP a, ExprP b, MaybeSpan span = {});
  static ExprP fst(ExprP a, MaybeSpan span = {});
  static ExprP snd(ExprP a, MaybeSpan span = {});
  static ExprP inl(ExprP a, MaybeSpan span = {});
  static ExprP inr(ExprP a, MaybeSpan span = {});
  static ExprP fun(std::string f, std::string x, CompP body, MaybeSpan span = {});
  static ExprP prim(PrimOp op, ExprP a, ExprP b = nullptr, MaybeSpan span = {});
};

struct Comp {
  enum class Kind : uint8_t {
    Hole, Ret, Let, App, Case, If, Raise, Try, Ref, Assign, Deref, ArrMake, ArrGet, ArrSet, Div
  };

  Kind kind = Kind::Hole;
  DivOp div = DivOp::Div;
  std::string x, y;  // binders: let x, case x/y, try x
  ExprP e1, e2, e3;
  CompP m1, m2;
  MaybeSpan span;

  bool is_hole() const { return kind == Kind::Hole; }

  static const CompP& hole();
  static CompP hole_at(MaybeSpan span);
  static CompP ret(ExprP e, MaybeSpan span = {});
  static CompP let(std::string x, CompP m1, CompP m2, MaybeSpan span = {});
  static CompP app(ExprP e1, ExprP e2, MaybeSpan span = {});
  static CompP case_of(ExprP e, std::string x, CompP m1, std::string y, CompP m2, MaybeSpan span = {});
  static CompP if_then(ExprP e, CompP m1, CompP m2, MaybeSpan span = {});
  static CompP raise(ExprP e, MaybeSpan span = {});
  static CompP try_with(CompP m1, std::string x, CompP m2, MaybeSpan span = {});
  static CompP ref(ExprP e, MaybeSpan span = {});
  static CompP assign(ExprP e1, ExprP e2, MaybeSpan span = {});
  static CompP deref(ExprP e, MaybeSpan span = {});
  static CompP arr_make(ExprP n, ExprP init, MaybeSpan span = {});
  static CompP arr_get(ExprP a, ExprP i, MaybeSpan span = {});
  static CompP arr_set(ExprP a, ExprP i, ExprP v, MaybeSpan span = {});
  static CompP divide(DivOp op, ExprP a, ExprP b, MaybeSpan span = {});
};

// ---------------------------------------------------------------------------
// environments, values, stores
// ---------------------------------------------------------------------------

// Finitely supported map from names to partial values. Hole entries are never
// stored, so looking up an absent name yields hole and maps compare pointwise.
class Env {
 public:
  using Map = std::map<std::string, ValueP, std::less<>>;

  Env() = default;

  const ValueP& get(std::string_view x) const;
  void set(const std::string& x, ValueP v);
  void remove(std::string_view x);
  Env with(const std::string& x, ValueP v) const;
  Env without(std::string_view x) const;

  bool empty() const { return m_.empty(); }
  size_t size() const { return m_.size(); }
  const Map& entries() const { return m_; }

 private:
  Map m_;
};

struct Value {
  enum class Kind : uint8_t { Hole, Unit, Bool, Int, Float, Str, Pair, Inl, Inr, Closure, Loc, Arr };

  Kind kind = Kind::Hole;
  bool b = false;
  int64_t i = 0;  // integer payload, or array length
  double f = 0.0;
  std::string s;  // string payload, or closure function name
  std::string x;  // closure parameter
  ValueP v1, v2;
  Env env;
  CompP body;
  Location loc = 0;

  bool is_hole() const { return kind == Kind::Hole; }

  static const ValueP& hole();
  static const ValueP& unit();
  static ValueP boolean(bool v);
  static ValueP integer(int64_t v);
  static ValueP floating(double v);
  static ValueP str(std::string v);
  static ValueP pair(ValueP a, ValueP b);
  static ValueP inl(ValueP a);
  static ValueP inr(ValueP a);
  static ValueP closure(Env env, std::string f, std::string x, CompP body);
  static ValueP location(Location l);
  static ValueP array(Location l, int64_t n);
};

struct Result {
  Outcome outcome = Outcome::Val;
  ValueP value = Value::hole();
};

class Store {
 public:
  using Map = std::map<Cell, ValueP>;

  const ValueP& get(Cell c) const;
  void set(Cell c, ValueP v);
  void remove(Cell c);
  // Drops every element of array ℓ (and a scalar at ℓ, if any).
  void remove_location(Location l);

  bool empty() const { return m_.empty(); }
  size_t size() const { return m_.size(); }
  const Map& entries() const { return m_; }

 private:
  Map m_;
};

// ---------------------------------------------------------------------------
// write sets
// ---------------------------------------------------------------------------

// Append-only record of the store cells written during one run, in order.
// A subtrace of a run performs a contiguous stretch of these writes, which is
// what lets trace nodes describe their write set as a range.
class WriteLog {
 public:
  uint32_t size() const { return uint32_t(events_.size()); }
  void push(Cell c) { events_.push_back(c); }
  const Cell& operator[](uint32_t k) const { return events_[k]; }
  bool contains(Cell c, uint32_t begin, uint32_t end) const;

 private:
  std::vector<Cell> events_;
  mutable std::once_flag indexed_;
  mutable std::unordered_map<Cell, std::vector<uint32_t>, CellHash> index_;
};

class LocationSet {
 public:
  LocationSet() = default;

  static LocationSet of(std::vector<Cell> cells);
  static LocationSet range(std::shared_ptr<const WriteLog> log, uint32_t begin, uint32_t end);
  static LocationSet unite(const LocationSet& a, const LocationSet& b);

  bool empty() const;
  bool contains(Cell c) const;
  // Upper bound on the number of distinct cells; cheap.
  size_t size_bound() const;
  // Sorted, duplicate-free listing.
  std::vector<Cell> cells() const;

  friend bool operator==(const LocationSet& a, const LocationSet& b);

 private:
  std::shared_ptr<const WriteLog> log_;
  uint32_t begin_ = 0, end_ = 0;
  std::shared_ptr<const std::vector<Cell>> explicit_;
};

// ---------------------------------------------------------------------------
// traces
// ---------------------------------------------------------------------------

struct Trace {
  enum class Kind : uint8_t {
    Hole, Ret, LetS, LetF, App, CaseL, CaseR, IfT, IfF, Raise, TryS, TryF,
    Ref, Assign, Deref, ArrMake, ArrGet, ArrSet, ArrFail, DivOk, DivFail
  };

  Kind kind = Kind::Hole;
  ArrOp arr = ArrOp::Make;
  DivOp div = DivOp::Div;
  // Binders. App: x = function name, y = parameter.
  std::string x, y;
  ExprP e1, e2, e3;
  TraceP t1, t2;
  Location loc = 0;
  int64_t n = 0;    // array length
  int64_t idx = 0;  // array index
  // Full value bound by let_S / caught by try_F in the recorded run. Not part
  // of the term: ignored by equality and the prefix order.
  ValueP bound;
  LocationSet writes;
  Outcome outcome = Outcome::Val;
  MaybeSpan span;

  bool is_hole() const { return kind == Kind::Hole; }

  static TraceP hole(LocationSet writes, Outcome k);
  static TraceP ret(ExprP e);
  static TraceP let_s(std::string x, TraceP t1, TraceP t2);
  static TraceP let_f(std::string x, TraceP t1);
  static TraceP app(ExprP e1, ExprP e2, std::string f, std::string x, TraceP body);
  static TraceP case_inl(ExprP e, std::string x, TraceP t, std::string y);
  static TraceP case_inr(ExprP e, std::string x, std::string y, TraceP t);
  static TraceP if_true(ExprP e, TraceP t);
  static TraceP if_false(ExprP e, TraceP t);
  static TraceP raise(ExprP e);
  static TraceP try_s(std::string x, TraceP t1);
  static TraceP try_f(TraceP t1, std::string x, TraceP t2);
  static TraceP ref(Location l, ExprP e);
  static TraceP assign(ExprP e1, Location l, ExprP e2);
  static TraceP deref(Location l, ExprP e);
  static TraceP arr_make(Location l, int64_t n, ExprP e1, ExprP e2);
  static TraceP arr_get(ExprP e1, ExprP e2, Location l, int64_t n, int64_t i);
  static TraceP arr_set(ExprP e1, ExprP e2, Location l, int64_t n, int64_t i, ExprP e3);
  static TraceP arr_fail(ArrOp op, ExprP e1, ExprP e2, ExprP e3, Location l, int64_t n, int64_t i);
  static TraceP div_ok(DivOp op, ExprP e1, ExprP e2);
  static TraceP div_fail(DivOp op, ExprP e1, ExprP e2);
};

// Copy of a trace node with new children, keeping the cached annotations.
// Used when rebuilding partial traces whose write set is known to be equal.
std::shared_ptr<Trace> clone_node(const Trace& t);

// ---------------------------------------------------------------------------
// structural equality (spans and hidden annotations ignored)
// ---------------------------------------------------------------------------

bool equal_terms(const Expr& a, const Expr& b);
bool equal_terms(const Comp& a, const Comp& b);
bool equal_terms(const Value& a, const Value& b);
bool equal_terms(const Trace& a, const Trace& b);
bool equal_terms(const Env& a, const Env& b);
bool equal_terms(const Store& a, const Store& b);
bool equal_terms(const Result& a, const Result& b);

inline bool equal_terms(const ExprP& a, const ExprP& b) { return a == b || equal_terms(*a, *b); }
inline bool equal_terms(const CompP& a, const CompP& b) { return a == b || equal_terms(*a, *b); }
inline bool equal_terms(const ValueP& a, const ValueP& b) { return a == b || equal_terms(*a, *b); }
inline bool equal_terms(const TraceP& a, const TraceP& b) { return a == b || equal_terms(*a, *b); }

// Bitwise float comparison, so that equality stays an equivalence relation.
bool same_float(double a, double b);

// ---------------------------------------------------------------------------
// rendering
// ---------------------------------------------------------------------------

enum class RenderMode { Plain, Shaded };

// Plain mode prints parseable surface syntax with holes as `_`. Shaded mode
// prints holes as a marked `⟦_⟧`; shading of real source text is done by the
// frontend, which knows the spans.
std::string render_term(const Expr& e, RenderMode mode = RenderMode::Plain);
std::string render_term(const Comp& m, RenderMode mode = RenderMode::Plain);
std::string render_value(const Value& v);
std::string render_result(const Result& r);
std::string render_cell(Cell c);
std::string format_float(double v);
std::string quote_string(std::string_view s);

// Count of nodes, used for slice statistics.
size_t node_count(const Comp& m);
size_t node_count(const Trace& t);

}  // namespace itml
