#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "fissile/cli.hpp"

using namespace fissile;
using namespace fissile::cli;

namespace {

ParseResult parse(std::vector<std::string> args) {
  args.insert(args.begin(), "fissile");
  std::vector<const char*> argv;
  for (auto& a : args) argv.push_back(a.c_str());
  return parse_args(static_cast<int>(argv.size()), argv.data());
}

int run_cli(std::vector<std::string> args, std::string* out = nullptr, std::string* err = nullptr) {
  args.insert(args.begin(), "fissile");
  std::vector<const char*> argv;
  for (auto& a : args) argv.push_back(a.c_str());
  std::ostringstream o, e;
  int rc = run(static_cast<int>(argv.size()), argv.data(), o, e);
  if (out) *out = o.str();
  if (err) *err = e.str();
  return rc;
}

std::filesystem::path temp_path(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("fissile_cli_test_" + name);
}

}  // namespace

TEST_CASE("bench flags populate the config") {
  auto r = parse({"bench", "--lock", "cna", "--threads", "8", "--duration", "2.5", "--cs-steps", "4",
                  "--ncs-max", "100", "--grace", "10", "--flush-denominator", "64", "--nodes", "2",
                  "--seed", "9", "--runs", "5", "--out", "x.csv"});
  REQUIRE(r.invocation);
  const auto& inv = *r.invocation;
  CHECK(inv.subcommand == Subcommand::kBench);
  CHECK(inv.config.lock == LockKind::kCna);
  CHECK(inv.config.threads == 8);
  CHECK(inv.config.duration_seconds == 2.5);
  CHECK(inv.config.cs_prng_steps == 4);
  CHECK(inv.config.ncs_max_steps == 100);
  CHECK(inv.config.grace_period == 10);
  CHECK(inv.config.flush_denominator == 64);
  CHECK(inv.config.nodes == 2);
  CHECK(inv.config.seed == 9);
  CHECK(inv.config.runs == 5);
  CHECK(inv.out == "x.csv");
}

TEST_CASE("defaults") {
  auto r = parse({"bench"});
  REQUIRE(r.invocation);
  CHECK(r.invocation->config.lock == LockKind::kFissile);
  CHECK(r.invocation->config.runs == 7);
  CHECK(r.invocation->config.duration_seconds == 10.0);
  CHECK(r.invocation->config.grace_period == 50);
  CHECK(r.invocation->config.flush_denominator == 256);
}

TEST_CASE("subcommands") {
  auto a = parse({"atomic", "--lock-array-size", "1"});
  REQUIRE(a.invocation);
  CHECK(a.invocation->subcommand == Subcommand::kAtomic);
  CHECK(a.invocation->config.lock_array_size == 1);
  auto v = parse({"verify", "--lock", "fissile-fifo", "--fifo-threads", "2", "--episodes", "10"});
  REQUIRE(v.invocation);
  CHECK(v.invocation->subcommand == Subcommand::kVerify);
  CHECK(v.invocation->config.fifo_threads == 2);
  CHECK(v.invocation->config.verify_episodes == 10);
}

TEST_CASE("usage errors exit with 2") {
  CHECK(run_cli({"bench", "--lock", "bogus"}) == kExitUsage);
  CHECK(run_cli({"bench", "--runs", "4"}) == kExitUsage);
  CHECK(run_cli({"bench", "--runs", "abc"}) == kExitUsage);
  CHECK(run_cli({"bench", "--runs", "99999999999999999999999"}) == kExitUsage);
  CHECK(run_cli({"bench", "--duration", "-1"}) == kExitUsage);
  CHECK(run_cli({"bench", "--threads", "0"}) == kExitUsage);
  CHECK(run_cli({"bench", "--no-such-flag"}) == kExitUsage);
  CHECK(run_cli({}) == kExitUsage);
  std::string err;
  CHECK(run_cli({"bench", "--lock", "bogus"}, nullptr, &err) == kExitUsage);
  CHECK(err.find("error") != std::string::npos);
}

TEST_CASE("help exits with 0") {
  std::string out;
  CHECK(run_cli({"--help"}, &out) == kExitOk);
  CHECK(out.find("--lock") != std::string::npos);
}

TEST_CASE("config file supplies flags and the command line wins") {
  auto path = temp_path("config.ini");
  {
    std::ofstream f(path);
    f << "lock=mcs\nthreads=6\nseed=3\nfifo-threads=1\nncs-max=100\n";
  }
  auto r = parse({"bench", "--config", path.string(), "--threads", "2"});
  REQUIRE(r.invocation);
  CHECK(r.invocation->config.lock == LockKind::kMcs);
  CHECK(r.invocation->config.threads == 2);
  CHECK(r.invocation->config.seed == 3);
  CHECK(r.invocation->config.fifo_threads == 1);
  CHECK(r.invocation->config.ncs_max_steps == 100);

  {
    std::ofstream f(path);
    f << "threads=2\nnot_a_flag=1\n";
  }
  CHECK_FALSE(parse({"bench", "--config", path.string()}).invocation);
  std::filesystem::remove(path);
}

TEST_CASE("unwritable output exits with 3") {
  CHECK(run_cli({"bench", "--lock", "tts", "--duration", "0.05", "--runs", "1", "--out",
                 "/nonexistent-dir/out.csv"}) == kExitIo);
}

TEST_CASE("bench writes the csv and a wait log") {
  auto csv = temp_path("out.csv");
  auto log = temp_path("waits.csv");
  std::string out;
  int rc = run_cli({"bench", "--lock", "fissile", "--threads", "2", "--duration", "0.05", "--runs",
                    "1", "--nodes", "2", "--out", csv.string(), "--wait-log", log.string()},
                   &out);
  CHECK(rc == kExitOk);
  CHECK(out.find("median throughput") != std::string::npos);
  std::ifstream c(csv), w(log);
  std::string header;
  std::getline(c, header);
  CHECK(header.rfind("run,workload,lock", 0) == 0);
  std::getline(w, header);
  CHECK(header == "thread,fifo,wait");
  std::filesystem::remove(csv);
  std::filesystem::remove(log);
}

TEST_CASE("verify passes for every lock kind") {
  for (LockKind k : kAllLockKinds) {
    CAPTURE(to_string(k));
    std::string out;
    std::vector<std::string> args{"verify", "--lock", std::string(to_string(k)), "--threads", "3",
                                  "--verify-iterations", "2000", "--episodes", "20"};
    if (k == LockKind::kFissileFifo) {
      args.push_back("--fifo-threads");
      args.push_back("1");
    }
    CHECK(run_cli(args, &out) == kExitOk);
    CHECK(out.find("verification passed") != std::string::npos);
  }
}

TEST_CASE("failed verification exits with 1 and writes the trace") {
  bench::VerifyReport report;
  bench::CheckResult bad;
  bad.name = "bounded-bypass";
  bad.passed = false;
  bad.detail = "2 acquisitions overtook impatient alpha thread 1";
  TraceEvent e;
  e.kind = TraceKind::kImpatientSet;
  e.value = 2;
  bad.counterexample.push_back(e);
  report.checks.push_back(bad);

  auto path = temp_path("trace.txt");
  std::ostringstream out, err;
  CHECK(finish_verification(report, path.string(), out, err) == kExitVerifyFailed);
  CHECK(out.str().find("verification FAILED") != std::string::npos);
  std::ifstream f(path);
  std::string first;
  std::getline(f, first);
  CHECK(first.find("bounded-bypass") != std::string::npos);
  std::string second;
  std::getline(f, second);
  CHECK(second.find(std::string(to_string(TraceKind::kImpatientSet))) != std::string::npos);
  std::filesystem::remove(path);

  CHECK(finish_verification(report, "/nonexistent-dir/t.txt", out, err) == kExitIo);
  bench::VerifyReport ok;
  CHECK(finish_verification(ok, path.string(), out, err) == kExitOk);
}
