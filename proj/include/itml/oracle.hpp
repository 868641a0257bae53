#pragma once

// Brute-force checking of the slicer on tiny programs. Every prefix of the
// program and trace is enumerated, so the least input that forward slicing
// maps above a criterion can be computed directly and compared with what
// backward slicing returns.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "itml/interpreter.hpp"
#include "itml/slicer.hpp"

namespace itml {

// Random well-typed, terminating program. Budget 0 gives `return ()`.
CompP generate_program(uint64_t seed, int budget);

struct OracleLimits {
  // Cap on |Prefix(program)| * |Prefix(trace)|.
  uint64_t max_inputs = 4096;
  // Cap on the number of criteria (prefixes of the final result and store).
  uint64_t max_outputs = 4096;
};

// One point of the input lattice. Environment and input store are empty in
// oracle runs, so a program prefix and a trace prefix determine it.
struct OracleInput {
  CompP program;
  TraceP trace;
};

// Least input X with c ⊑ fwd(X), by enumeration. Throws CapExceeded.
OracleInput brute_force_bwd(const RunRecord& r, const Criterion& c, const OracleLimits& limits = {},
                            const SliceConfig& config = {});

struct CheckReport {
  bool pass = true;
  uint64_t checked = 0;
  std::string counterexample;
};

// bwd_comp(c) equals brute_force_bwd(c).
CheckReport check_minimality(const RunRecord& r, const Criterion& c, const OracleLimits& limits = {},
                             const SliceConfig& config = {});

// fwd(X) ⊒ Y ⇔ X ⊒ bwd(Y) for every input prefix X and criterion Y. Also
// checks that every forward image is a prefix of the run's actual output.
CheckReport check_adjunction(const RunRecord& r, const OracleLimits& limits = {}, const SliceConfig& config = {});

// Minimality for every criterion in the output lattice.
CheckReport check_all_minimality(const RunRecord& r, const OracleLimits& limits = {}, const SliceConfig& config = {});

// Sampled fwd(X ⊓ X') = fwd(X) ⊓ fwd(X') and bwd(Y ⊔ Y') = bwd(Y) ⊔ bwd(Y').
CheckReport check_meet_preservation(const RunRecord& r, uint64_t samples, uint64_t seed,
                                    const OracleLimits& limits = {}, const SliceConfig& config = {});
CheckReport check_join_preservation(const RunRecord& r, uint64_t samples, uint64_t seed,
                                    const OracleLimits& limits = {}, const SliceConfig& config = {});

struct CorpusEntry {
  uint64_t seed = 0;
  int budget = 0;
  CompP program;
  RunRecord run;
};

// Programs for seeds first..first+count-1. When a program's lattices exceed
// the limits the same seed is retried with a smaller budget.
std::vector<CorpusEntry> build_corpus(uint64_t first_seed, uint64_t count, int budget,
                                      const OracleLimits& limits = {});

struct OracleSummary {
  uint64_t programs = 0;
  uint64_t adjunction_pairs = 0;
  uint64_t minimality_criteria = 0;
  uint64_t meet_samples = 0;
  uint64_t join_samples = 0;
  uint64_t failures = 0;
  std::vector<std::string> counterexamples;
};

struct OracleOptions {
  uint64_t first_seed = 0;
  uint64_t seeds = 200;
  int budget = 4;
  uint64_t preservation_samples = 64;
  unsigned threads = 0;  // 0: hardware concurrency
  OracleLimits limits;
  SliceConfig config;
};

// Runs every check on every corpus program, in parallel across programs.
OracleSummary run_oracle(const OracleOptions& options);

}  // namespace itml
