#pragma once

// Forward and backward slicing. Forward slicing pushes a partial input
// (environment, store, program, trace) to the partial output it determines;
// backward slicing pulls a partial output (the criterion) back to the least
// partial input that still determines it.

#include <string>
#include <utility>

#include "itml/interpreter.hpp"
#include "itml/syntax.hpp"

namespace itml {

// What part of a run's output is of interest.
struct Criterion {
  Result result;
  Store store;
};

struct BackwardSlice {
  Env env;
  Store store;
  CompP program;
  TraceP trace;
};

struct ForwardResult {
  Store store;
  Result result;
};

// Deliberate slicer bugs, switched on only to show that the oracle notices.
enum class Fault {
  None,
  // Backward: slice the bound computation of a let without the demand the
  // body placed on its variable.
  ForgetLetDemand,
  // Forward: a newly allocated reference is recorded as holding a hole.
  RefStoresHole,
};

struct SliceConfig {
  Fault fault = Fault::None;
};

ValueP fwd_expr(const Env& env, const ExprP& e);

// full_env is the environment the expression was evaluated in; primitive
// operations consult it to demand their operands in full.
std::pair<Env, ExprP> bwd_expr(const Env& full_env, const ValueP& demand, const ExprP& e);

ForwardResult fwd_comp(const Env& env, const Store& store, const CompP& program, const TraceP& trace,
                       const SliceConfig& config = {});

// Slices a trace recorded under full_env. The trace must carry the values
// bound by let and try (traces produced by eval_comp do).
BackwardSlice bwd_comp(const Criterion& c, const Env& full_env, const TraceP& trace, const SliceConfig& config = {});
BackwardSlice bwd_comp(const Criterion& c, const RunRecord& r, const SliceConfig& config = {});

// Throws ShapeMismatch unless the criterion is a prefix of the run's output.
void validate_criterion(const Criterion& c, const RunRecord& r);

// The criterion asking for nothing: holes everywhere, with the run's outcome.
Criterion empty_criterion(const RunRecord& r);
// The criterion asking for the whole output.
Criterion full_criterion(const RunRecord& r);

}  // namespace itml
