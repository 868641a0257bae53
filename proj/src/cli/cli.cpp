// Batch subcommands and the interactive loop.

#include "itml/cli.hpp"

#include <fmt/format.h>

#include <fstream>
#include <iostream>
#include <sstream>
#include <unordered_set>

#include "CLI11.hpp"
#include "json.hpp"
#include "itml/lattice.hpp"

namespace itml::cli {

using nlohmann::json;

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point since) {
  return std::chrono::duration<double, std::milli>(Clock::now() - since).count();
}

// Maps library errors to exit codes. CriterionError and ShapeMismatch must be
// caught before their base class.
template <class F>
int guarded(std::ostream& err, F&& fn) {
  try {
    return fn();
  } catch (const CriterionError& e) {
    err << "itml: " << e.what() << "\n";
    return kValidationFailure;
  } catch (const ShapeMismatch& e) {
    err << "itml: shape mismatch: " << e.what() << "\n";
    return kShapeMismatch;
  } catch (const Error& e) {
    err << "itml: " << e.what() << "\n";
    return kInputError;
  } catch (const std::exception& e) {
    err << "itml: internal error: " << e.what() << "\n";
    return kInputError;
  }
}

template <class F>
int guarded_on_large_stack(std::ostream& err, F&& fn) {
  return with_large_stack([&] { return guarded(err, fn); });
}

SurfaceProgram parse_named(std::string source, const std::string& name) {
  try {
    return parse_program(std::move(source));
  } catch (const SyntaxError& e) {
    throw Error(fmt::format("{}: {}", name, e.what()));
  }
}

// Array contents are read back from the store, so nested arrays print as
// nested lists.
std::string render_stored(const ValueP& v, const Store& store, int depth = 0) {
  if (v->kind != Value::Kind::Arr || depth > 8) return render_value(*v);
  std::string out = "[";
  for (int64_t k = 0; k < v->i; ++k) {
    if (k) out += ",";
    out += render_stored(store.get(Cell{v->loc, k}), store, depth + 1);
  }
  return out + "]";
}

std::string render_store_cells(const Store& store) {
  std::string out;
  for (const auto& [cell, v] : store.entries()) {
    if (!out.empty()) out += " ";
    out += fmt::format("{}={}", render_cell(cell), render_value(*v));
  }
  return out;
}

json store_json(const Store& store) {
  json out = json::object();
  for (const auto& [cell, v] : store.entries()) out[render_cell(cell)] = render_value(*v);
  return out;
}

json ranges_json(const std::vector<ShadedRange>& ranges, std::string_view source) {
  json out = json::array();
  for (const ShadedRange& r : ranges) {
    TextPosition p = position_of(source, r.begin);
    out.push_back({{"begin", r.begin},
                   {"end", r.end},
                   {"line", p.line},
                   {"column", p.column},
                   {"text", std::string(source.substr(r.begin, r.end - r.begin))}});
  }
  return out;
}

Fault parse_fault(const std::string& name) {
  if (name == "none") return Fault::None;
  if (name == "forget-let-demand") return Fault::ForgetLetDemand;
  if (name == "ref-stores-hole") return Fault::RefStoresHole;
  throw Error(fmt::format("unknown fault '{}'", name));
}

// ---------------------------------------------------------------------------
// command bodies, shared by batch mode and the interactive loop
// ---------------------------------------------------------------------------

int run_body(const Loaded& l, std::ostream& out) {
  out << run_summary(l.run.result, l.run, l.run.final_store) << "\n";
  return kSuccess;
}

int trace_body(const Loaded& l, const std::optional<std::string>& out_path, std::ostream& out) {
  std::string dump = dump_trace(*l.run.trace);
  if (!out_path) {
    out << dump;
    if (!dump.empty() && dump.back() != '\n') out << "\n";
    return kSuccess;
  }
  std::ofstream file(*out_path, std::ios::binary);
  if (!file) throw IoError(fmt::format("cannot write '{}'", *out_path));
  file << dump;
  if (!dump.empty() && dump.back() != '\n') file << "\n";
  file.close();
  if (!file) throw IoError(fmt::format("cannot write '{}'", *out_path));
  out << fmt::format("wrote {} trace nodes to {}\n", node_count(*l.run.trace), *out_path);
  return kSuccess;
}

int slice_body(const Loaded& l, const std::string& criterion, const SliceOptions& options, std::ostream& out) {
  SliceOutcome s = slice_loaded(l, criterion);
  const std::string& source = l.surface.source;
  size_t trace_nodes = node_count(*l.run.trace);
  size_t slice_trace_nodes = node_count(*s.slice.trace);
  size_t program_nodes = node_count(*l.run.program);
  size_t slice_program_nodes = node_count(*s.slice.program);
  uint64_t shaded_bytes = 0;
  for (const ShadedRange& r : s.shaded) shaded_bytes += r.end - r.begin;

  if (options.format == Format::Json) {
    json doc{{"file", l.name},
             {"criterion", criterion},
             {"result", render_result(l.run.result)},
             {"shaded", ranges_json(s.shaded, source)},
             {"stats",
              {{"trace_nodes", trace_nodes},
               {"slice_trace_nodes", slice_trace_nodes},
               {"program_nodes", program_nodes},
               {"slice_program_nodes", slice_program_nodes},
               {"shaded_bytes", shaded_bytes},
               {"milliseconds", s.milliseconds}}}};
    out << doc.dump(2) << "\n";
    return kSuccess;
  }
  std::string text = apply_shading(source, s.shaded, options.color ? ShadeStyle::Ansi : ShadeStyle::Markers);
  out << text;
  if (text.empty() || text.back() != '\n') out << "\n";
  out << fmt::format("-- slice: trace {}/{} nodes, program {}/{} nodes, {} shaded ranges, {:.1f} ms\n",
                     slice_trace_nodes, trace_nodes, slice_program_nodes, program_nodes, s.shaded.size(),
                     s.milliseconds);
  return kSuccess;
}

int fwd_body(const std::string& partial_file, const Loaded* full, const std::optional<std::string>& trace_file,
             Format format, std::ostream& out) {
  SurfaceProgram partial = parse_named(read_file(partial_file), partial_file);
  Elaboration e = full ? elaborate_aligned(partial, full->surface) : elaborate(partial);
  TraceP trace;
  if (trace_file) {
    try {
      trace = parse_trace(read_file(*trace_file));
    } catch (const IoError&) {
      throw;
    } catch (const Error& ex) {
      throw Error(fmt::format("{}: {}", *trace_file, ex.what()));
    }
  } else if (full) {
    trace = full->run.trace;
  } else {
    throw Error("fwd needs a trace file or the unholed source (--source)");
  }
  ForwardResult r = fwd_comp(Env{}, Store{}, e.program, trace);
  std::string summary = full ? run_summary(r.result, full->run, r.store) : render_result(r.result);
  if (format == Format::Json) {
    json doc{{"file", partial_file},
             {"result", render_result(r.result)},
             {"summary", summary},
             {"store", store_json(r.store)}};
    out << doc.dump(2) << "\n";
    return kSuccess;
  }
  out << summary << "\n";
  if (!full) {
    std::string cells = render_store_cells(r.store);
    if (!cells.empty()) out << cells << "\n";
  }
  return kSuccess;
}

int oracle_body(const OracleCommandOptions& options, std::ostream& out) {
  auto start = Clock::now();
  OracleSummary s = run_oracle(options.oracle);
  double ms = elapsed_ms(start);
  bool pass = s.failures == 0;
  if (options.format == Format::Json) {
    json doc{{"seeds", options.oracle.seeds},
             {"first_seed", options.oracle.first_seed},
             {"budget", options.oracle.budget},
             {"programs", s.programs},
             {"adjunction_pairs", s.adjunction_pairs},
             {"minimality_criteria", s.minimality_criteria},
             {"meet_samples", s.meet_samples},
             {"join_samples", s.join_samples},
             {"failures", s.failures},
             {"counterexamples", s.counterexamples},
             {"milliseconds", ms},
             {"pass", pass}};
    out << doc.dump(2) << "\n";
  } else {
    out << fmt::format("programs             {}\n", s.programs);
    out << fmt::format("adjunction pairs     {}\n", s.adjunction_pairs);
    out << fmt::format("minimality criteria  {}\n", s.minimality_criteria);
    out << fmt::format("meet samples         {}\n", s.meet_samples);
    out << fmt::format("join samples         {}\n", s.join_samples);
    out << fmt::format("failures             {}\n", s.failures);
    for (const std::string& c : s.counterexamples) out << "\ncounterexample: " << c << "\n";
    out << fmt::format("{} ({:.0f} ms)\n", pass ? "PASS" : "FAIL", ms);
  }
  return pass ? kSuccess : kValidationFailure;
}

std::string trim(std::string_view s) {
  size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  size_t e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

constexpr std::string_view kReplHelp =
    ":load <file>       load, elaborate and run a program\n"
    ":run               print the loaded program's result and store\n"
    ":trace [<file>]    dump the loaded program's trace\n"
    ":slice <criterion> shade the loaded program with respect to a criterion\n"
    ":fwd <file>        forward-slice a copy of the loaded program with holes\n"
    ":quit              leave\n"
    "Any other line is loaded and run as a program.\n";

}  // namespace

// ---------------------------------------------------------------------------
// loading
// ---------------------------------------------------------------------------

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(fmt::format("cannot read '{}'", path));
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError(fmt::format("cannot read '{}'", path));
  return ss.str();
}

Loaded load_text(std::string source, const std::string& name) {
  Loaded l;
  l.name = name;
  l.surface = parse_named(std::move(source), name);
  try {
    l.elaboration = elaborate(l.surface);
  } catch (const ElaborationError& e) {
    throw Error(fmt::format("{}: {}", name, e.what()));
  }
  try {
    l.run = eval_comp(Env{}, Store{}, l.elaboration.program);
  } catch (const StuckError& e) {
    throw Error(fmt::format("{}: runtime error: {}", name, e.what()));
  }
  return l;
}

Loaded load_file(const std::string& path) { return load_text(read_file(path), path); }

std::string run_summary(const Result& result, const RunRecord& names, const Store& store) {
  std::string out = render_result(result);
  auto bindings = top_level_bindings(names);
  std::unordered_set<std::string> seen;
  bool first = true;
  // Innermost first; a shadowed binding is not reachable by name.
  for (auto it = bindings.rbegin(); it != bindings.rend(); ++it) {
    const auto& [x, v] = *it;
    if (!seen.insert(x).second || x.empty() || x[0] == '$') continue;
    std::string item;
    if (v->kind == Value::Kind::Loc) {
      item = fmt::format("!{}={}", x, render_stored(store.get(Cell{v->loc, -1}), store));
    } else if (v->kind == Value::Kind::Arr) {
      item = fmt::format("{}={}", x, render_stored(v, store));
    } else {
      continue;
    }
    out += (first ? "; " : " ") + item;
    first = false;
  }
  return out;
}

SliceOutcome slice_loaded(const Loaded& l, const std::string& criterion_text) {
  SliceOutcome s;
  auto start = Clock::now();
  s.criterion = parse_criterion(criterion_text, l.run);
  s.slice = bwd_comp(s.criterion, l.run);
  s.shaded = shaded_ranges(l.elaboration, *s.slice.program, l.surface.source);
  s.milliseconds = elapsed_ms(start);
  return s;
}

// ---------------------------------------------------------------------------
// batch commands
// ---------------------------------------------------------------------------

int cmd_run(const std::string& file, std::ostream& out, std::ostream& err) {
  return guarded_on_large_stack(err, [&] { return run_body(load_file(file), out); });
}

int cmd_trace(const std::string& file, const std::optional<std::string>& out_path, std::ostream& out,
              std::ostream& err) {
  return guarded_on_large_stack(err, [&] { return trace_body(load_file(file), out_path, out); });
}

int cmd_slice(const std::string& file, const std::string& criterion, const SliceOptions& options, std::ostream& out,
              std::ostream& err) {
  return guarded_on_large_stack(err, [&] { return slice_body(load_file(file), criterion, options, out); });
}

int cmd_fwd(const std::string& partial_file, const FwdOptions& options, std::ostream& out, std::ostream& err) {
  return guarded_on_large_stack(err, [&] {
    std::optional<Loaded> full;
    if (options.source) full = load_file(*options.source);
    return fwd_body(partial_file, full ? &*full : nullptr, options.trace, options.format, out);
  });
}

int cmd_oracle(const OracleCommandOptions& options, std::ostream& out, std::ostream& err) {
  return guarded_on_large_stack(err, [&] { return oracle_body(options, out); });
}

int cmd_repl(std::istream& in, std::ostream& out, std::ostream& err, bool prompt) {
  return with_large_stack([&] {
    std::optional<Loaded> loaded;
    auto need_program = [&]() -> const Loaded& {
      if (!loaded) throw Error("no program loaded (use :load <file> or type a program)");
      return *loaded;
    };
    std::string line;
    for (;;) {
      if (prompt) out << "itml> " << std::flush;
      if (!std::getline(in, line)) break;
      std::string text = trim(line);
      if (text.empty()) continue;
      if (text[0] != ':') {
        guarded(err, [&] {
          loaded = load_text(text, "<input>");
          return run_body(*loaded, out);
        });
        continue;
      }
      size_t gap = text.find_first_of(" \t");
      std::string command = text.substr(0, gap);
      std::string arg = gap == std::string::npos ? std::string() : trim(text.substr(gap));
      if (command == ":quit" || command == ":q") break;
      if (command == ":help") {
        out << kReplHelp;
      } else if (command == ":load") {
        guarded(err, [&] {
          if (arg.empty()) throw Error(":load needs a file name");
          loaded = load_file(arg);
          return run_body(*loaded, out);
        });
      } else if (command == ":run") {
        guarded(err, [&] { return run_body(need_program(), out); });
      } else if (command == ":trace") {
        guarded(err, [&] {
          return trace_body(need_program(), arg.empty() ? std::nullopt : std::optional<std::string>(arg), out);
        });
      } else if (command == ":slice") {
        guarded(err, [&] { return slice_body(need_program(), arg, SliceOptions{}, out); });
      } else if (command == ":fwd") {
        guarded(err, [&] {
          if (arg.empty()) throw Error(":fwd needs a file name");
          return fwd_body(arg, &need_program(), std::nullopt, Format::Text, out);
        });
      } else {
        err << fmt::format("itml: unknown command '{}' (try :help)\n", command);
      }
    }
    return int(kSuccess);
  });
}

// ---------------------------------------------------------------------------
// argument parsing
// ---------------------------------------------------------------------------

int run_cli(int argc, const char* const* argv, std::istream& in, std::ostream& out, std::ostream& err) {
  CLI::App app{"Traced interpreter and dynamic slicer for iTML", "itml"};
  app.require_subcommand(1);
  const std::vector<std::string> formats{"text", "json"};

  std::string file;
  auto* run = app.add_subcommand("run", "Run a program and print its result and store");
  run->add_option("file", file, "Program file")->required();

  std::optional<std::string> trace_out;
  auto* trace = app.add_subcommand("trace", "Run a program and dump its trace");
  trace->add_option("file", file, "Program file")->required();
  trace->add_option("-o,--output", trace_out, "Write the dump here instead of standard output");

  std::string criterion;
  std::string slice_format = "text";
  bool color = false;
  auto* slice = app.add_subcommand("slice", "Backward-slice a run and shade the source");
  slice->add_option("file", file, "Program file")->required();
  slice->add_option("criterion", criterion, "Slicing criterion, e.g. '!s = 2' (empty: nothing)");
  slice->add_option("--format", slice_format, "Output format")->check(CLI::IsMember(formats));
  slice->add_flag("--color", color, "Dim the sliced-away text with ANSI codes instead of markers");

  FwdOptions fwd_options;
  std::string fwd_format = "text";
  auto* fwd = app.add_subcommand("fwd", "Forward-slice a program with holes against a trace");
  fwd->add_option("file", file, "Program with `_` holes")->required();
  fwd->add_option("trace", fwd_options.trace, "Trace dump produced by `itml trace`");
  fwd->add_option("--source", fwd_options.source, "The program without holes");
  fwd->add_option("--format", fwd_format, "Output format")->check(CLI::IsMember(formats));

  OracleCommandOptions oracle_options;
  std::string oracle_format = "text";
  std::string fault = "none";
  auto* oracle = app.add_subcommand("oracle", "Check the slicer against brute force on generated programs");
  oracle->add_option("--seeds", oracle_options.oracle.seeds, "Number of generated programs");
  oracle->add_option("--first-seed", oracle_options.oracle.first_seed, "First generator seed");
  oracle->add_option("--budget", oracle_options.oracle.budget, "Generator size budget");
  oracle->add_option("--samples", oracle_options.oracle.preservation_samples,
                     "Meet and join samples per program");
  oracle->add_option("--threads", oracle_options.oracle.threads, "Worker threads (0: all cores)");
  oracle->add_option("--max-inputs", oracle_options.oracle.limits.max_inputs, "Input lattice cap");
  oracle->add_option("--max-outputs", oracle_options.oracle.limits.max_outputs, "Output lattice cap");
  oracle->add_option("--fault", fault, "Inject a slicer fault")
      ->check(CLI::IsMember({"none", "forget-let-demand", "ref-stores-hole"}));
  oracle->add_option("--format", oracle_format, "Output format")->check(CLI::IsMember(formats));

  bool no_prompt = false;
  auto* repl = app.add_subcommand("repl", "Interactive loop");
  repl->add_flag("--no-prompt", no_prompt, "Do not print a prompt");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? int(kSuccess) : int(kInputError);
  }

  if (run->parsed()) return cmd_run(file, out, err);
  if (trace->parsed()) return cmd_trace(file, trace_out, out, err);
  if (slice->parsed()) {
    SliceOptions options{slice_format == "json" ? Format::Json : Format::Text, color};
    return cmd_slice(file, criterion, options, out, err);
  }
  if (fwd->parsed()) {
    fwd_options.format = fwd_format == "json" ? Format::Json : Format::Text;
    return cmd_fwd(file, fwd_options, out, err);
  }
  if (oracle->parsed()) {
    oracle_options.format = oracle_format == "json" ? Format::Json : Format::Text;
    oracle_options.oracle.config.fault = parse_fault(fault);
    return cmd_oracle(oracle_options, out, err);
  }
  if (repl->parsed()) return cmd_repl(in, out, err, !no_prompt);
  return kInputError;
}

}  // namespace itml::cli
