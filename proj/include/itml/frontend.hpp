#pragma once

// Surface language: parsing, elaboration into the stratified core, slicing
// criteria, and shaded rendering of slices over the original source text.
//
// Elaboration let-binds every effectful operand to an administrative
// variable. Administrative names start with `$` and are derived from the
// tree path of the surface node they serve, so a program with some subterms
// replaced by `_` elaborates to a prefix of the original program's core
// whenever the holes sit in pure positions.

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "itml/interpreter.hpp"
#include "itml/slicer.hpp"
#include "itml/syntax.hpp"

namespace itml {

// Line and column are 1-based; column counts bytes.
struct TextPosition {
  uint32_t offset = 0;
  uint32_t line = 1;
  uint32_t column = 1;
};

TextPosition position_of(std::string_view source, uint32_t offset);

class SyntaxError : public Error {
 public:
  SyntaxError(const std::string& message, TextPosition where);
  TextPosition where;
};

class ElaborationError : public Error {
 public:
  ElaborationError(const std::string& message, TextPosition where);
  TextPosition where;
};

// Bad criterion text, unknown name, index out of range, or a demand that is
// not a prefix of the run's output.
class CriterionError : public Error {
 public:
  using Error::Error;
};

// ---------------------------------------------------------------------------
// surface syntax
// ---------------------------------------------------------------------------

struct SNode;
using SNodeP = std::shared_ptr<const SNode>;

// A function parameter: a name (possibly `_`) or a pair pattern `(a, b)`.
struct Param {
  bool is_pair = false;
  std::string first, second;
  bool operator==(const Param&) const = default;
};

struct SNode {
  enum class Kind : uint8_t {
    Hole, Var, Unit, Bool, Int, Float, Str,
    Pair, Fst, Snd, Inl, Inr, Unary, Binary, ListLit,
    Fun, Return,
    App, Let, Seq, If, While, Case, Try, Raise,
    Ref, Deref, Assign, Index, SetIndex, ArrayLit, ArrayMake, Div
  };

  Kind kind = Kind::Hole;
  PrimOp op = PrimOp::Add;  // Unary, Binary
  DivOp div = DivOp::Div;
  bool b = false;
  int64_t i = 0;
  double f = 0.0;
  // Var and Str payload; binder of Let, Case (left), Try; function name.
  std::string name;
  std::string name2;  // Case right binder
  std::vector<Param> params;
  // Children in source order:
  //   Pair a b | Fst/Snd/Inl/Inr/Unary/Return/Raise/Ref/Deref a | Binary a b
  //   ListLit/ArrayLit/Seq elements | Fun body | App f a | Let rhs body
  //   If cond then [else] | While cond body | Case e left right | Try m handler
  //   Assign target value | Index a i | SetIndex a i v | ArrayMake n init
  //   Div a b
  std::vector<SNodeP> kids;
  SourceSpan span;
  // No effects anywhere outside function bodies.
  bool pure = true;
};

struct ParseOptions {
  // Accept administrative `$` names, as printed for elaborated core terms.
  bool core_names = false;
};

struct SurfaceProgram {
  std::string source;
  SNodeP root;
};

SurfaceProgram parse_program(std::string text, const ParseOptions& options = {});

// ---------------------------------------------------------------------------
// elaboration
// ---------------------------------------------------------------------------

// Which surface span each core node serves. Nodes written by the user carry
// their span directly; administrative nodes (operand bindings, loop
// plumbing, the list prelude) are recorded here and are never shaded on
// their own.
struct ElaborationMap {
  std::unordered_map<const void*, SourceSpan> administrative;

  bool is_administrative(const void* node) const { return administrative.count(node) != 0; }
  // The span served by a node of the elaborated program, if any.
  MaybeSpan span_of(const Expr& e) const;
  MaybeSpan span_of(const Comp& m) const;
};

struct Elaboration {
  CompP program;
  ElaborationMap map;
  // True when `map` was free and the list prelude was bound around the
  // program.
  bool uses_prelude = false;
};

struct ElaborateOptions {
  // Bind `map` over lists when the program uses it without defining it.
  bool prelude = true;
  // Report unbound variables.
  bool check_scope = true;
};

Elaboration elaborate(const SurfaceProgram& p, const ElaborateOptions& options = {});

// Elaborates a copy of `full` in which the subterms that are `_` in
// `partial` are holes. The result is always a prefix of elaborate(full).
// Throws ShapeMismatch when partial is not full with some subterms holed.
Elaboration elaborate_aligned(const SurfaceProgram& partial, const SurfaceProgram& full,
                              const ElaborateOptions& options = {});

// Parses a core term as printed by render_term, with no prelude and no
// administrative lets beyond those spelled out in the text.
CompP parse_core(std::string text);

// ---------------------------------------------------------------------------
// criteria
// ---------------------------------------------------------------------------

// Comma-separated items:
//   result = val <pat> | result = exn <pat> | !x = <pat> | x[i][j]... = <pat>
// where <pat> is a partial value written with `_` holes. Names resolve to
// the values bound by the run's top-level let chain.
Criterion parse_criterion(std::string_view text, const RunRecord& r);

// Values bound by the outermost chain of lets in a run, innermost last.
std::vector<std::pair<std::string, ValueP>> top_level_bindings(const RunRecord& r);

// ---------------------------------------------------------------------------
// shaded rendering
// ---------------------------------------------------------------------------

struct ShadedRange {
  uint32_t begin = 0;
  uint32_t end = 0;
  bool operator==(const ShadedRange&) const = default;
};

// Byte ranges of `source` whose core nodes are all holes in `slice`, where
// `full` is the elaborated program and `slice` a prefix of it. Ranges are
// maximal, disjoint, sorted and trimmed of surrounding whitespace.
std::vector<ShadedRange> shaded_ranges(const Elaboration& full, const Comp& slice, std::string_view source);

enum class ShadeStyle { Markers, Ansi };

// The source text with shaded ranges wrapped in ⟦ ⟧ markers (or ANSI dim).
std::string render_slice(const Comp& slice, const Elaboration& full, std::string_view source,
                         ShadeStyle style = ShadeStyle::Markers);

std::string apply_shading(std::string_view source, const std::vector<ShadedRange>& ranges,
                          ShadeStyle style = ShadeStyle::Markers);

}  // namespace itml
