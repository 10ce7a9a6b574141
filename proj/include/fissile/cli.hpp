#pragma once

#include <iosfwd>
#include <optional>
#include <string>

#include "fissile/bench.hpp"
#include "fissile/verify.hpp"

namespace fissile::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitVerifyFailed = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitIo = 3;

enum class Subcommand { kBench, kAtomic, kVerify };

struct CliInvocation {
  Subcommand subcommand = Subcommand::kBench;
  bench::BenchConfig config;
  std::string out;        // CSV path; empty writes CSV to stdout
  std::string wait_log;   // optional wait-sample dump of the last run
  std::string trace_out = "verify_counterexample.txt";
};

struct ParseResult {
  std::optional<CliInvocation> invocation;
  int exit_code = kExitOk;  // meaningful when invocation is empty
  std::string message;      // usage/help text or error
};

/// Flags may also come from a key=value file given with --config; command
/// line values win.
ParseResult parse_args(int argc, const char* const* argv);

/// Writes the CSV to `path` (stdout when empty) and the summary to `out`.
/// Returns kExitIo if the file cannot be written.
int emit_report(const bench::BenchReport& report, const std::string& path, std::ostream& out,
                std::ostream& err);

/// Prints the verification summary; on failure writes counterexample traces
/// to `trace_out` and returns kExitVerifyFailed.
int finish_verification(const bench::VerifyReport& report, const std::string& trace_out,
                        std::ostream& out, std::ostream& err);

/// Full front end: parse, run, report. Returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace fissile::cli
