#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fissile/bench.hpp"
#include "fissile/trace.hpp"

namespace fissile::bench {

struct CheckResult {
  std::string name;
  bool applicable = true;
  bool passed = true;
  std::string detail;
  std::vector<TraceEvent> counterexample;
};

struct VerifyReport {
  LockKind lock = LockKind::kFissile;
  std::vector<CheckResult> checks;
  std::vector<std::string> warnings;

  bool passed() const noexcept {
    for (const auto& c : checks)
      if (!c.passed) return false;
    return true;
  }
};

/// Guarded-counter exclusion for any lock kind; for Fissile kinds also alpha
/// uniqueness, bounded bypass, FIFO non-bypass (fissile-fifo), queue-element
/// lifetime poisoning and inner-chain conservation, all from traced runs.
/// CNA gets the chain-conservation check too.
VerifyReport run_verification(const BenchConfig& config);

/// `threads` x `iterations` unguarded increments under the lock; returns the
/// final count.
std::uint64_t guarded_counter(LockKind kind, const LockParams& params, unsigned threads,
                              std::uint64_t iterations, unsigned fifo_threads = 0);

struct TracedRun {
  std::vector<TraceEvent> events;
  unsigned max_concurrent_alphas = 0;
  std::uint64_t audit_violations = 0;
  std::uint64_t acquisitions = 0;
  bool overflowed = false;
  bool quiescent = true;
};

/// Traced contention run on one lock: each thread performs `iterations`
/// acquisitions with a critical section of `cs_spins` spin hints, long enough
/// to push Fissile alphas past their grace period. Threads with index >=
/// `threads` are FIFO-designated. Synthetic topology with `nodes` nodes.
TracedRun traced_run(LockKind kind, const LockParams& params, unsigned threads,
                     unsigned fifo_threads, std::uint64_t iterations, unsigned cs_spins,
                     unsigned nodes, std::uint64_t seed, bool audit_elements);

}  // namespace fissile::bench
