#pragma once

// Helpers shared by the unit suites.

#include <random>
#include <string>
#include <vector>

#include "itml/frontend.hpp"
#include "itml/interpreter.hpp"
#include "itml/lattice.hpp"
#include "itml/slicer.hpp"

namespace itml::test {

struct Loaded {
  SurfaceProgram surface;
  Elaboration elaboration;
  RunRecord run;
};

std::string program_path(const std::string& name);
std::string read_text(const std::string& path);

Loaded load_source(std::string source);
Loaded load_program(const std::string& name);

// Texts of the shaded ranges of a backward slice, with runs of whitespace
// collapsed to one space.
std::vector<std::string> shaded_texts(const Loaded& l, const std::string& criterion);
std::string collapse_space(std::string_view s);

// A random prefix of m: each node is replaced by a hole with probability p.
CompP random_prefix(const CompP& m, double p, std::mt19937_64& rng);
ExprP random_prefix(const ExprP& e, double p, std::mt19937_64& rng);
// A random prefix of a trace; holes carry the annotations of what they replace.
TraceP random_prefix(const TraceP& t, double p, std::mt19937_64& rng);
ValueP random_prefix(const ValueP& v, double p, std::mt19937_64& rng);
Store random_prefix(const Store& s, double p, std::mt19937_64& rng);

// A random criterion below the run's full output.
Criterion random_criterion(const RunRecord& r, double p, std::mt19937_64& rng);

}  // namespace itml::test
