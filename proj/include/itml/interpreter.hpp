#pragma once

// Traced big-step evaluation. eval_comp runs a computation and records the
// trace that the slicer consumes, together with everything needed to replay
// or slice the run later.

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

#include "itml/syntax.hpp"

namespace itml {

struct RunRecord {
  Env env;
  Store initial_store;
  CompP program;
  TraceP trace;
  Store final_store;
  Result result;
  // Locations in the order they were allocated.
  std::vector<Location> allocations;
  // Every cell write performed by the run; trace write sets point into it.
  std::shared_ptr<const WriteLog> log;
};

struct EvalConfig {
  // Maximum number of nested function applications.
  uint64_t max_depth = 100000;
};

// Default configuration, honouring the ITML_STEP_LIMIT environment variable.
EvalConfig default_eval_config();

ValueP eval_expr(const Env& env, const Expr& e);
RunRecord eval_comp(const Env& env, const Store& store, const CompP& program,
                    const EvalConfig& config = default_eval_config());

// Replays the record's trace through forward slicing on its full inputs and
// checks that the recorded final store and result come back exactly.
bool replay_check(const RunRecord& r);

// Structural equality of everything in two records.
bool equal_records(const RunRecord& a, const RunRecord& b);

// Primitive operator semantics on complete values; throws StuckError on type
// errors. Shared by evaluation and forward slicing.
ValueP apply_prim(PrimOp op, const Value& a, const Value* b);

// Division result, or nullptr for a zero divisor.
ValueP apply_div(DivOp op, const Value& a, const Value& b);

// True when v contains no hole anywhere (closure environments included).
bool is_complete(const Value& v);

inline constexpr std::string_view kDivisionByZero = "division by zero";
inline constexpr std::string_view kIndexOutOfBounds = "index out of bounds";
inline constexpr std::string_view kInvalidLength = "invalid array length";

// ---------------------------------------------------------------------------
// trace text format
// ---------------------------------------------------------------------------

// S-expression dump of a trace, one node per line, children indented.
std::string dump_trace(const Trace& t);
// Single-line s-expression forms used inside the dump.
std::string dump_expr(const Expr& e);
std::string dump_comp(const Comp& m);

// Inverse of dump_trace. Write sets are rebuilt from the node contents, so a
// parsed trace compares equal to the original. Throws Error on bad input.
TraceP parse_trace(std::string_view text);
ExprP parse_expr_sexp(std::string_view text);
CompP parse_comp_sexp(std::string_view text);

// ---------------------------------------------------------------------------
// deep recursion support
// ---------------------------------------------------------------------------

// Runs fn on a thread with a large stack and rethrows anything it throws.
// Evaluation, slicing and destruction of long traces are all recursive.
void run_with_large_stack(const std::function<void()>& fn, size_t stack_bytes = size_t(1) << 30);

template <class F>
auto with_large_stack(F&& fn) -> decltype(fn()) {
  using R = decltype(fn());
  if constexpr (std::is_void_v<R>) {
    run_with_large_stack([&] { fn(); });
  } else {
    std::optional<R> out;
    run_with_large_stack([&] { out.emplace(fn()); });
    return std::move(*out);
  }
}

}  // namespace itml
