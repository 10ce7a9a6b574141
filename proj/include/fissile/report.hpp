#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "fissile/bench.hpp"
#include "fissile/verify.hpp"

namespace fissile::bench {

/// CSV column names in output order.
const std::vector<std::string>& csv_columns();

/// Columns whose values depend on wall-clock timing; everything else is a
/// function of the configuration and the interleaving.
const std::vector<std::string>& wall_clock_columns();

/// Header, one row per run, then one row with run = "median".
void write_csv(std::ostream& os, const BenchReport& report);

void write_summary(std::ostream& os, const BenchReport& report);
void write_summary(std::ostream& os, const VerifyReport& report);

/// Counterexample traces of failed checks, one block per check.
void write_counterexamples(std::ostream& os, const VerifyReport& report);

/// Wait-sample log dump: header then one "thread,fifo,wait" row per sample.
void write_wait_log(std::ostream& os, const std::vector<metrics::WaitSample>& samples);

}  // namespace fissile::bench
