#include "itml/oracle.hpp"

#include <fmt/format.h>

#include <atomic>
#include <mutex>
#include <random>
#include <thread>

#include "itml/lattice.hpp"

namespace itml {

namespace {

std::string render_store(const Store& s) {
  std::string out = "{";
  for (const auto& [c, v] : s.entries()) {
    if (out.size() > 1) out += ", ";
    out += render_cell(c) + "=" + render_value(*v);
  }
  return out + "}";
}

std::string render_criterion(const Criterion& c) {
  return fmt::format("result {} store {}", render_result(c.result), render_store(c.store));
}

std::string describe_input(const OracleInput& x) {
  return fmt::format("program {}\ntrace\n{}", dump_comp(*x.program), dump_trace(*x.trace));
}

// Both lattices of one run, with the forward image of every input.
struct Lattices {
  std::vector<OracleInput> inputs;
  std::vector<ForwardResult> images;
  std::vector<Criterion> outputs;
};

EnumerateLimits unbounded_points(uint64_t max_count) {
  EnumerateLimits l;
  l.max_points = UINT64_MAX;
  l.max_count = max_count;
  return l;
}

uint64_t input_count(const RunRecord& r) {
  return saturating_mul(count_prefixes(*r.program), count_prefixes(*r.trace));
}

uint64_t output_count(const RunRecord& r) {
  return saturating_mul(count_prefixes(*r.result.value), count_prefixes(r.final_store));
}

std::vector<OracleInput> input_lattice(const RunRecord& r, const OracleLimits& limits) {
  if (!r.env.empty() || !r.initial_store.empty()) throw Error("oracle runs start from an empty environment and store");
  uint64_t n = input_count(r);
  if (n > limits.max_inputs) {
    throw CapExceeded(fmt::format("input lattice has {} elements, cap is {}", n, limits.max_inputs));
  }
  auto programs = enumerate_prefixes(r.program, unbounded_points(limits.max_inputs));
  auto traces = enumerate_prefixes(r.trace, unbounded_points(limits.max_inputs));
  std::vector<OracleInput> out;
  out.reserve(programs.size() * traces.size());
  for (const auto& m : programs) {
    for (const auto& t : traces) out.push_back(OracleInput{m, t});
  }
  return out;
}

std::vector<Criterion> output_lattice(const RunRecord& r, const OracleLimits& limits) {
  uint64_t n = output_count(r);
  if (n > limits.max_outputs) {
    throw CapExceeded(fmt::format("output lattice has {} elements, cap is {}", n, limits.max_outputs));
  }
  auto values = enumerate_prefixes(r.result.value, unbounded_points(limits.max_outputs));
  auto stores = enumerate_prefixes(r.final_store, unbounded_points(limits.max_outputs));
  std::vector<Criterion> out;
  out.reserve(values.size() * stores.size());
  for (const auto& v : values) {
    for (const auto& s : stores) out.push_back(Criterion{Result{r.result.outcome, v}, s});
  }
  return out;
}

Lattices build_lattices(const RunRecord& r, const OracleLimits& limits, const SliceConfig& config,
                        bool with_outputs = true) {
  Lattices l;
  l.inputs = input_lattice(r, limits);
  l.images.reserve(l.inputs.size());
  for (const auto& x : l.inputs) l.images.push_back(fwd_comp(Env{}, Store{}, x.program, x.trace, config));
  if (with_outputs) l.outputs = output_lattice(r, limits);
  return l;
}

bool covers(const ForwardResult& image, const Criterion& c) {
  return image.result.outcome == c.result.outcome && leq(*c.result.value, *image.result.value) &&
         leq(c.store, image.store);
}

// X ⊒ bwd(Y), with X's environment and store empty.
bool above(const OracleInput& x, const BackwardSlice& s) {
  return s.env.empty() && s.store.empty() && leq(*s.program, *x.program) && leq(*s.trace, *x.trace);
}

bool same_slice(const BackwardSlice& a, const BackwardSlice& b) {
  return equal_terms(a.env, b.env) && equal_terms(a.store, b.store) && equal_terms(a.program, b.program) &&
         equal_terms(a.trace, b.trace);
}

std::optional<OracleInput> least_covering(const Lattices& l, const Criterion& c) {
  std::optional<OracleInput> least;
  for (size_t k = 0; k < l.inputs.size(); ++k) {
    if (!covers(l.images[k], c)) continue;
    if (!least) {
      least = l.inputs[k];
    } else {
      least->program = meet(least->program, l.inputs[k].program);
      least->trace = meet(least->trace, l.inputs[k].trace);
    }
  }
  return least;
}

std::string minimality_failure(const RunRecord& r, const Criterion& c, const BackwardSlice& got,
                               const std::optional<OracleInput>& want) {
  std::string expected = want ? describe_input(*want) : std::string("no input covers the criterion\n");
  return fmt::format(
      "minimality failure\nrun program {}\nrun trace\n{}criterion {}\nbackward slice env {} store {}\n{}"
      "least covering input\n{}",
      dump_comp(*r.program), dump_trace(*r.trace), render_criterion(c), got.env.size(), render_store(got.store),
      describe_input(OracleInput{got.program, got.trace}), expected);
}

bool matches(const BackwardSlice& got, const std::optional<OracleInput>& want) {
  return want && got.env.empty() && got.store.empty() && equal_terms(got.program, want->program) &&
         equal_terms(got.trace, want->trace);
}

// Adjunction and minimality in one pass over the criteria.
void check_lattices(const RunRecord& r, const Lattices& l, const SliceConfig& config, CheckReport* adjunction,
                    CheckReport* minimality) {
  if (adjunction) {
    // Forward slicing may only lose information, never invent it.
    Criterion top = full_criterion(r);
    for (size_t k = 0; k < l.inputs.size() && adjunction->pass; ++k) {
      const ForwardResult& image = l.images[k];
      bool sound = image.result.outcome == top.result.outcome && leq(*image.result.value, *top.result.value) &&
                   leq(image.store, top.store);
      if (!sound) {
        adjunction->pass = false;
        adjunction->counterexample = fmt::format(
            "forward image is not a prefix of the run's output\nrun program {}\ninput X\n{}forward image {} {}",
            dump_comp(*r.program), describe_input(l.inputs[k]), render_result(image.result),
            render_store(image.store));
      }
    }
  }
  for (const Criterion& c : l.outputs) {
    BackwardSlice s = bwd_comp(c, r, config);
    std::optional<OracleInput> least;
    for (size_t k = 0; k < l.inputs.size(); ++k) {
      bool fwd_side = covers(l.images[k], c);
      if (adjunction) {
        ++adjunction->checked;
        if (adjunction->pass && fwd_side != above(l.inputs[k], s)) {
          adjunction->pass = false;
          adjunction->counterexample = fmt::format(
              "adjunction failure: fwd(X) {} Y but X {} bwd(Y)\nrun program {}\nrun trace\n{}criterion {}\n"
              "input X\n{}forward image {} {}\nbackward slice\n{}",
              fwd_side ? "covers" : "does not cover", fwd_side ? "is not above" : "is above", dump_comp(*r.program),
              dump_trace(*r.trace), render_criterion(c), describe_input(l.inputs[k]),
              render_result(l.images[k].result), render_store(l.images[k].store),
              describe_input(OracleInput{s.program, s.trace}));
        }
      }
      if (minimality && fwd_side) {
        if (!least) {
          least = l.inputs[k];
        } else {
          least->program = meet(least->program, l.inputs[k].program);
          least->trace = meet(least->trace, l.inputs[k].trace);
        }
      }
    }
    if (minimality) {
      ++minimality->checked;
      if (minimality->pass && !matches(s, least)) {
        minimality->pass = false;
        minimality->counterexample = minimality_failure(r, c, s, least);
      }
    }
  }
}

}  // namespace

OracleInput brute_force_bwd(const RunRecord& r, const Criterion& c, const OracleLimits& limits,
                            const SliceConfig& config) {
  validate_criterion(c, r);
  Lattices l = build_lattices(r, limits, config, false);
  std::optional<OracleInput> least = least_covering(l, c);
  if (!least) throw Error("no input prefix covers the criterion");
  return *least;
}

CheckReport check_minimality(const RunRecord& r, const Criterion& c, const OracleLimits& limits,
                             const SliceConfig& config) {
  Lattices l = build_lattices(r, limits, config, false);
  BackwardSlice s = bwd_comp(c, r, config);
  std::optional<OracleInput> least = least_covering(l, c);
  CheckReport report;
  report.checked = 1;
  if (!matches(s, least)) {
    report.pass = false;
    report.counterexample = minimality_failure(r, c, s, least);
  }
  return report;
}

CheckReport check_adjunction(const RunRecord& r, const OracleLimits& limits, const SliceConfig& config) {
  Lattices l = build_lattices(r, limits, config);
  CheckReport report;
  check_lattices(r, l, config, &report, nullptr);
  return report;
}

CheckReport check_all_minimality(const RunRecord& r, const OracleLimits& limits, const SliceConfig& config) {
  Lattices l = build_lattices(r, limits, config);
  CheckReport report;
  check_lattices(r, l, config, nullptr, &report);
  return report;
}

CheckReport check_meet_preservation(const RunRecord& r, uint64_t samples, uint64_t seed, const OracleLimits& limits,
                                    const SliceConfig& config) {
  Lattices l = build_lattices(r, limits, config, false);
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<size_t> pick(0, l.inputs.size() - 1);
  CheckReport report;
  for (uint64_t k = 0; k < samples && report.pass; ++k) {
    size_t a = pick(rng), b = pick(rng);
    OracleInput both{meet(l.inputs[a].program, l.inputs[b].program), meet(l.inputs[a].trace, l.inputs[b].trace)};
    ForwardResult lhs = fwd_comp(Env{}, Store{}, both.program, both.trace, config);
    Store store = meet(l.images[a].store, l.images[b].store);
    Result result = meet(l.images[a].result, l.images[b].result);
    ++report.checked;
    if (!equal_terms(lhs.store, store) || !equal_terms(lhs.result, result)) {
      report.pass = false;
      report.counterexample = fmt::format(
          "meet preservation failure\nrun program {}\nX\n{}X'\n{}fwd(X meet X') = {} {}\nfwd(X) meet fwd(X') = {} {}",
          dump_comp(*r.program), describe_input(l.inputs[a]), describe_input(l.inputs[b]), render_result(lhs.result),
          render_store(lhs.store), render_result(result), render_store(store));
    }
  }
  return report;
}

CheckReport check_join_preservation(const RunRecord& r, uint64_t samples, uint64_t seed, const OracleLimits& limits,
                                    const SliceConfig& config) {
  std::vector<Criterion> outputs = output_lattice(r, limits);
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<size_t> pick(0, outputs.size() - 1);
  CheckReport report;
  for (uint64_t k = 0; k < samples && report.pass; ++k) {
    const Criterion& y1 = outputs[pick(rng)];
    const Criterion& y2 = outputs[pick(rng)];
    Criterion both{join(y1.result, y2.result), join(y1.store, y2.store)};
    BackwardSlice lhs = bwd_comp(both, r, config);
    BackwardSlice s1 = bwd_comp(y1, r, config);
    BackwardSlice s2 = bwd_comp(y2, r, config);
    BackwardSlice rhs{join(s1.env, s2.env), join(s1.store, s2.store), join(s1.program, s2.program),
                      join(s1.trace, s2.trace)};
    ++report.checked;
    if (!same_slice(lhs, rhs)) {
      report.pass = false;
      report.counterexample = fmt::format(
          "join preservation failure\nrun program {}\nY {}\nY' {}\nbwd(Y join Y')\n{}bwd(Y) join bwd(Y')\n{}",
          dump_comp(*r.program), render_criterion(y1), render_criterion(y2),
          describe_input(OracleInput{lhs.program, lhs.trace}), describe_input(OracleInput{rhs.program, rhs.trace}));
    }
  }
  return report;
}

std::vector<CorpusEntry> build_corpus(uint64_t first_seed, uint64_t count, int budget, const OracleLimits& limits) {
  std::vector<CorpusEntry> corpus;
  corpus.reserve(count);
  for (uint64_t seed = first_seed; seed < first_seed + count; ++seed) {
    for (int b = budget; b >= 0; --b) {
      CompP program = generate_program(seed, b);
      RunRecord run = eval_comp(Env{}, Store{}, program);
      if (input_count(run) <= limits.max_inputs && output_count(run) <= limits.max_outputs) {
        corpus.push_back(CorpusEntry{seed, b, program, std::move(run)});
        break;
      }
    }
  }
  return corpus;
}

OracleSummary run_oracle(const OracleOptions& options) {
  std::vector<CorpusEntry> corpus = build_corpus(options.first_seed, options.seeds, options.budget, options.limits);
  OracleSummary summary;
  summary.programs = corpus.size();
  std::mutex lock;
  std::atomic<size_t> next{0};

  auto worker = [&] {
    for (size_t k = next++; k < corpus.size(); k = next++) {
      const CorpusEntry& entry = corpus[k];
      CheckReport adjunction, minimality, meets, joins;
      std::string crash;
      try {
        Lattices l = build_lattices(entry.run, options.limits, options.config);
        check_lattices(entry.run, l, options.config, &adjunction, &minimality);
        meets = check_meet_preservation(entry.run, options.preservation_samples, entry.seed, options.limits,
                                        options.config);
        joins = check_join_preservation(entry.run, options.preservation_samples, entry.seed + 1, options.limits,
                                        options.config);
      } catch (const std::exception& e) {
        crash = fmt::format("seed {}: {}\nprogram {}", entry.seed, e.what(), dump_comp(*entry.program));
      }
      std::lock_guard<std::mutex> guard(lock);
      summary.adjunction_pairs += adjunction.checked;
      summary.minimality_criteria += minimality.checked;
      summary.meet_samples += meets.checked;
      summary.join_samples += joins.checked;
      for (const CheckReport* rep : {&adjunction, &minimality, &meets, &joins}) {
        if (!rep->pass) {
          ++summary.failures;
          summary.counterexamples.push_back(fmt::format("seed {} budget {}: {}", entry.seed, entry.budget,
                                                        rep->counterexample));
        }
      }
      if (!crash.empty()) {
        ++summary.failures;
        summary.counterexamples.push_back(crash);
      }
    }
  };

  unsigned threads = options.threads ? options.threads : std::max(1u, std::thread::hardware_concurrency());
  std::vector<std::thread> pool;
  for (unsigned k = 1; k < threads; ++k) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  return summary;
}

}  // namespace itml
