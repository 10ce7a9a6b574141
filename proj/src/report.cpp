#include "fissile/report.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

#include "fissile/trace_check.hpp"

namespace fissile::bench {

const std::vector<std::string>& csv_columns() {
  static const std::vector<std::string> cols = {
      "run",           "workload",       "lock",          "threads",
      "fifo_threads",  "elapsed_s",      "acquisitions",  "throughput",
      "normal_throughput", "fifo_throughput", "spread",   "migration",
      "rstddev_ratio", "theil_t",        "fifo_rstddev_ratio", "fifo_worst",
      "fifo_avg",      "fifo_median",    "wait_samples",  "torn_reads"};
  return cols;
}

const std::vector<std::string>& wall_clock_columns() {
  static const std::vector<std::string> cols = {"elapsed_s", "acquisitions", "throughput",
                                                "normal_throughput", "fifo_throughput",
                                                "wait_samples"};
  return cols;
}

namespace {

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string ratio(double v, const char* sentinel) { return std::isinf(v) ? sentinel : num(v); }

void row(std::ostream& os, const std::string& label, const BenchReport& r, const RunMetrics& m) {
  const BenchConfig& c = r.config;
  os << label << ',' << r.workload << ',' << to_string(c.lock) << ',' << c.threads << ','
     << c.fifo_threads << ',' << num(m.elapsed_seconds) << ',' << m.acquisitions << ','
     << num(m.throughput) << ',' << num(m.normal_throughput) << ',' << num(m.fifo_throughput) << ','
     << ratio(m.spread, "unbounded") << ',' << ratio(m.migration, "no-migration") << ','
     << num(m.rstddev) << ',' << num(m.theil_t) << ',' << num(m.fifo_waits.rstddev) << ','
     << m.fifo_waits.worst << ',' << num(m.fifo_waits.average) << ',' << num(m.fifo_waits.median)
     << ',' << m.wait_samples << ',' << m.torn_reads << '\n';
}

}  // namespace

void write_csv(std::ostream& os, const BenchReport& report) {
  const auto& cols = csv_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << cols[i];
  os << '\n';
  for (std::size_t i = 0; i < report.runs.size(); ++i) row(os, std::to_string(i), report, report.runs[i]);
  row(os, "median", report, report.median);
}

void write_summary(std::ostream& os, const BenchReport& r) {
  const RunMetrics& m = r.median;
  os << r.workload << ": lock=" << to_string(r.config.lock) << " threads=" << r.config.threads
     << " fifo_threads=" << r.config.fifo_threads << " runs=" << r.config.runs
     << " duration=" << r.config.duration_seconds << "s\n";
  os << "  median throughput      " << num(m.throughput / 1e6) << " M acq/s (normal "
     << num(m.normal_throughput / 1e6) << ", fifo " << num(m.fifo_throughput / 1e6) << ")\n";
  os << "  spread                 " << ratio(m.spread, "unbounded") << '\n';
  os << "  migration (acq/migr.)  " << ratio(m.migration, "no-migration") << '\n';
  os << "  rstddev (ratio)        " << num(m.rstddev) << '\n';
  os << "  theil-t (normalized)   " << num(m.theil_t) << '\n';
  if (r.config.fifo_threads > 0) {
    os << "  fifo waits             rstddev " << num(m.fifo_waits.rstddev) << ", worst "
       << m.fifo_waits.worst << ", avg " << num(m.fifo_waits.average) << ", median "
       << num(m.fifo_waits.median) << '\n';
  }
  for (const auto& w : r.warnings) os << "  warning: " << w << '\n';
}

void write_summary(std::ostream& os, const VerifyReport& r) {
  os << "verify: lock=" << to_string(r.lock) << '\n';
  for (const auto& c : r.checks) {
    const char* status = !c.applicable ? "SKIP" : c.passed ? "PASS" : "FAIL";
    os << "  [" << status << "] " << c.name << ": " << c.detail << '\n';
  }
  for (const auto& w : r.warnings) os << "  warning: " << w << '\n';
  os << (r.passed() ? "verification passed\n" : "verification FAILED\n");
}

void write_counterexamples(std::ostream& os, const VerifyReport& r) {
  for (const auto& c : r.checks) {
    if (c.passed) continue;
    os << "# " << c.name << ": " << c.detail << '\n';
    os << format_trace(c.counterexample);
  }
}

void write_wait_log(std::ostream& os, const std::vector<metrics::WaitSample>& samples) {
  os << "thread,fifo,wait\n";
  for (const auto& s : samples) os << s.thread << ',' << (s.fifo ? 1 : 0) << ',' << s.wait << '\n';
}

}  // namespace fissile::bench
