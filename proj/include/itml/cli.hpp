#pragma once

// Command-line driver: batch subcommands and an interactive loop sharing the
// same implementation. Every command writes to caller-supplied streams and
// returns a process exit code, so the driver can be exercised in-process.

#include <chrono>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "itml/frontend.hpp"
#include "itml/oracle.hpp"

namespace itml::cli {

// Stable exit-code contract.
enum ExitCode : int {
  kSuccess = 0,
  kValidationFailure = 1,  // bad criterion, or an oracle check failed
  kInputError = 2,         // I/O, syntax, elaboration or runtime error
  kShapeMismatch = 3,      // partial input is not a prefix of the run
};

class IoError : public Error {
 public:
  using Error::Error;
};

enum class Format { Text, Json };

// A parsed, elaborated and evaluated program.
struct Loaded {
  std::string name;
  SurfaceProgram surface;
  Elaboration elaboration;
  RunRecord run;
};

std::string read_file(const std::string& path);
Loaded load_text(std::string source, const std::string& name);
Loaded load_file(const std::string& path);

// Final result followed by the references and arrays bound at top level,
// innermost binding first: `val (); !s=2 !i=4 x=[0,0,2,2]`. Cells missing
// from the store print as `_`.
std::string run_summary(const Result& result, const RunRecord& names, const Store& store);

struct SliceOutcome {
  Criterion criterion;
  BackwardSlice slice;
  std::vector<ShadedRange> shaded;
  double milliseconds = 0.0;
};

SliceOutcome slice_loaded(const Loaded& l, const std::string& criterion_text);

struct SliceOptions {
  Format format = Format::Text;
  bool color = false;
};

struct FwdOptions {
  Format format = Format::Text;
  // Unholed program the partial file was cut from; used to align holes in
  // effectful positions and to name store cells.
  std::optional<std::string> source;
  // Trace dump to replay; defaults to the trace of running `source`.
  std::optional<std::string> trace;
};

struct OracleCommandOptions {
  OracleOptions oracle;
  Format format = Format::Text;
};

// Each command catches library errors and maps them to exit codes,
// reporting on err.
int cmd_run(const std::string& file, std::ostream& out, std::ostream& err);
int cmd_trace(const std::string& file, const std::optional<std::string>& out_path, std::ostream& out,
              std::ostream& err);
int cmd_slice(const std::string& file, const std::string& criterion, const SliceOptions& options, std::ostream& out,
              std::ostream& err);
int cmd_fwd(const std::string& partial_file, const FwdOptions& options, std::ostream& out, std::ostream& err);
int cmd_oracle(const OracleCommandOptions& options, std::ostream& out, std::ostream& err);
int cmd_repl(std::istream& in, std::ostream& out, std::ostream& err, bool prompt = true);

// Full argument parsing and dispatch, as used by the `itml` executable.
int run_cli(int argc, const char* const* argv, std::istream& in, std::ostream& out, std::ostream& err);

}  // namespace itml::cli
