#include "fissile/cli.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "fissile/report.hpp"
#include "fissile/verify.hpp"

namespace fissile::cli {

ParseResult parse_args(int argc, const char* const* argv) {
  CliInvocation inv;
  bench::BenchConfig& c = inv.config;
  std::string lock_name = "fissile";

  CLI::App app{"Fissile lock family benchmark and verification harness", "fissile"};
  app.set_config("--config", "", "key=value file supplying any of the flags below");
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.require_subcommand(1);

  auto* bench_cmd = app.add_subcommand("bench", "central-lock MutexBench run")->fallthrough();
  auto* atomic_cmd = app.add_subcommand("atomic", "hashed lock-array atomic-record run")->fallthrough();
  auto* verify_cmd = app.add_subcommand("verify", "correctness verification suite")->fallthrough();

  std::vector<std::string> kinds;
  for (LockKind k : kAllLockKinds) kinds.emplace_back(to_string(k));

  app.add_option("--lock", lock_name, "lock kind")->check(CLI::IsMember(kinds))->capture_default_str();
  app.add_option("--threads", c.threads, "normal threads")->check(CLI::Range(1u, 4096u))->capture_default_str();
  app.add_option("--duration", c.duration_seconds, "seconds per run")
      ->check(CLI::PositiveNumber)->capture_default_str();
  app.add_option("--cs-steps", c.cs_prng_steps, "shared PRNG steps inside the critical section")
      ->capture_default_str();
  app.add_option("--ncs-max", c.ncs_max_steps, "non-critical section length bound, 0 = empty")
      ->capture_default_str();
  app.add_option("--fifo-threads", c.fifo_threads, "additional FIFO-designated threads")
      ->check(CLI::Range(0u, 4096u))->capture_default_str();
  app.add_option("--fifo-ncs-max", c.fifo_ncs_max_steps, "FIFO threads' non-critical section bound")
      ->capture_default_str();
  app.add_option("--grace", c.grace_period, "alpha grace period in spin iterations")->capture_default_str();
  app.add_option("--flush-denominator", c.flush_denominator, "CNA flush probability is 1/N")
      ->check(CLI::PositiveNumber)->capture_default_str();
  app.add_option("--nodes", c.nodes, "synthetic NUMA node count (0 = query the OS)")->capture_default_str();
  app.add_flag("--synthetic-topology", c.synthetic_topology, "force a synthetic topology (2 nodes unless --nodes)");
  app.add_option("--seed", c.seed, "base seed")->capture_default_str();
  app.add_option("--runs", c.runs, "independent runs, odd")
      ->check(CLI::PositiveNumber)
      ->check(CLI::Validator(
          [](std::string& v) -> std::string {
            unsigned n = 0;
            if (!CLI::detail::lexical_cast(v, n)) return "runs must be an unsigned integer";
            return n % 2 == 1 ? std::string{} : "runs must be odd";
          },
          "ODD"))
      ->capture_default_str();
  app.add_option("--out", inv.out, "CSV output path (default stdout)");
  app.add_option("--wait-log", inv.wait_log, "dump the last run's wait samples as CSV");
  app.add_flag("--per-thread-log", c.per_thread_log, "log waits to per-thread buffers");
  app.add_option("--lock-array-size", c.lock_array_size, "atomic workload lock array size")
      ->check(CLI::PositiveNumber)->capture_default_str();
  app.add_option("--atomic-store-every", c.atomic_store_every,
                 "atomic workload: thread 0 republishes every N iterations (0 = loads only)")
      ->capture_default_str();
  app.add_option("--verify-iterations", c.verify_iterations, "guarded increments per thread")
      ->check(CLI::PositiveNumber)->capture_default_str();
  app.add_option("--episodes", c.verify_episodes, "impatience episodes to observe")->capture_default_str();
  app.add_option("--trace-out", inv.trace_out, "counterexample trace path for failed verification")
      ->capture_default_str();

  ParseResult result;
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    result.message = app.help();
    result.exit_code = kExitOk;
    return result;
  } catch (const CLI::CallForAllHelp&) {
    result.message = app.help("", CLI::AppFormatMode::All);
    result.exit_code = kExitOk;
    return result;
  } catch (const CLI::ParseError& e) {
    result.message = std::string("error: ") + e.what() + "\n\n" + app.help();
    result.exit_code = kExitUsage;
    return result;
  }

  inv.config.lock = *parse_lock_kind(lock_name);
  inv.subcommand = bench_cmd->parsed()    ? Subcommand::kBench
                   : atomic_cmd->parsed() ? Subcommand::kAtomic
                                          : Subcommand::kVerify;
  (void)verify_cmd;
  try {
    inv.config.validate();
  } catch (const std::invalid_argument& e) {
    result.message = std::string("error: ") + e.what() + "\n\n" + app.help();
    result.exit_code = kExitUsage;
    return result;
  }
  result.invocation = std::move(inv);
  return result;
}

int emit_report(const bench::BenchReport& report, const std::string& path, std::ostream& out,
                std::ostream& err) {
  if (path.empty()) {
    bench::write_csv(out, report);
  } else {
    std::ofstream file(path);
    if (!file) {
      err << "error: cannot write " << path << '\n';
      return kExitIo;
    }
    bench::write_csv(file, report);
    file.flush();
    if (!file) {
      err << "error: write to " << path << " failed\n";
      return kExitIo;
    }
  }
  bench::write_summary(out, report);
  return kExitOk;
}

int finish_verification(const bench::VerifyReport& report, const std::string& trace_out,
                        std::ostream& out, std::ostream& err) {
  bench::write_summary(out, report);
  if (report.passed()) return kExitOk;
  std::ofstream trace(trace_out);
  if (!trace) {
    err << "error: cannot write " << trace_out << '\n';
    return kExitIo;
  }
  bench::write_counterexamples(trace, report);
  err << "counterexample traces written to " << trace_out << '\n';
  return kExitVerifyFailed;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  ParseResult parsed = parse_args(argc, argv);
  if (!parsed.invocation) {
    (parsed.exit_code == kExitOk ? out : err) << parsed.message;
    return parsed.exit_code;
  }
  const CliInvocation& inv = *parsed.invocation;

  try {
    if (inv.subcommand == Subcommand::kVerify) {
      return finish_verification(bench::run_verification(inv.config), inv.trace_out, out, err);
    }

    bench::BenchConfig config = inv.config;
    config.keep_wait_log = !inv.wait_log.empty();
    bench::BenchReport report = inv.subcommand == Subcommand::kAtomic
                                    ? bench::run_atomic_workload(config)
                                    : bench::run_mutexbench(config);
    int rc = emit_report(report, inv.out, out, err);
    if (rc != kExitOk || inv.wait_log.empty()) return rc;
    std::ofstream log(inv.wait_log);
    if (!log) {
      err << "error: cannot write " << inv.wait_log << '\n';
      return kExitIo;
    }
    bench::write_wait_log(log, report.runs.back().wait_log);
    return log ? kExitOk : kExitIo;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  }
}

}  // namespace fissile::cli
