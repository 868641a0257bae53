#pragma once

// Prefix order, meets and joins for every partial category, trace
// annotations, store erasure, and exhaustive prefix enumeration.

#include <cstdint>
#include <vector>

#include "itml/syntax.hpp"

namespace itml {

// a ⊑ b: equal except that some subterms of b are holes in a.
bool leq(const Expr& a, const Expr& b);
bool leq(const Comp& a, const Comp& b);
bool leq(const Value& a, const Value& b);
bool leq(const Result& a, const Result& b);
bool leq(const Env& a, const Env& b);
bool leq(const Store& a, const Store& b);
bool leq(const Trace& a, const Trace& b);

// Greatest lower bounds. Total on Expr, Comp, Value, Env and Store. Traces and
// results must be prefixes of a common term; otherwise ShapeMismatch.
ExprP meet(const ExprP& a, const ExprP& b);
CompP meet(const CompP& a, const CompP& b);
ValueP meet(const ValueP& a, const ValueP& b);
Result meet(const Result& a, const Result& b);
Env meet(const Env& a, const Env& b);
Store meet(const Store& a, const Store& b);
TraceP meet(const TraceP& a, const TraceP& b);

// Least upper bounds; UndefinedJoin when no upper bound exists.
ExprP join(const ExprP& a, const ExprP& b);
CompP join(const CompP& a, const CompP& b);
ValueP join(const ValueP& a, const ValueP& b);
Result join(const Result& a, const Result& b);
Env join(const Env& a, const Env& b);
Store join(const Store& a, const Store& b);
TraceP join(const TraceP& a, const TraceP& b);

// True when a ⊔ b exists.
bool compatible(const Expr& a, const Expr& b);

inline const LocationSet& writes(const Trace& t) { return t.writes; }
inline Outcome outcome(const Trace& t) { return t.outcome; }

// µ ◁ L: every cell named in L becomes hole.
Store erase(Store mu, const LocationSet& cells);
// True when µ ◁ L = µ, i.e. µ has no non-hole cell in L.
bool disjoint(const Store& mu, const LocationSet& cells);

struct EnumerateLimits {
  // Maximum number of non-hole nodes in the reference term.
  uint64_t max_points = 16;
  // Maximum number of prefixes produced.
  uint64_t max_count = UINT64_MAX;
};

// Number of prefixes, saturating at UINT64_MAX.
uint64_t count_prefixes(const Expr& e);
uint64_t count_prefixes(const Comp& m);
uint64_t count_prefixes(const Value& v);
uint64_t count_prefixes(const Env& r);
uint64_t count_prefixes(const Store& s);
uint64_t count_prefixes(const Trace& t);

// Non-hole node count: the number of places where a hole could be inserted.
uint64_t hole_points(const Expr& e);
uint64_t hole_points(const Comp& m);
uint64_t hole_points(const Value& v);
uint64_t hole_points(const Trace& t);

// Every element of Prefix(t) exactly once, bottom first and t last.
std::vector<ExprP> enumerate_prefixes(const ExprP& e, const EnumerateLimits& lim = {});
std::vector<CompP> enumerate_prefixes(const CompP& m, const EnumerateLimits& lim = {});
std::vector<ValueP> enumerate_prefixes(const ValueP& v, const EnumerateLimits& lim = {});
std::vector<TraceP> enumerate_prefixes(const TraceP& t, const EnumerateLimits& lim = {});
std::vector<Env> enumerate_prefixes(const Env& r, const EnumerateLimits& lim = {});
std::vector<Store> enumerate_prefixes(const Store& s, const EnumerateLimits& lim = {});

uint64_t saturating_mul(uint64_t a, uint64_t b);

}  // namespace itml
