#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fissile/lock_kind.hpp"
#include "fissile/metrics.hpp"
#include "fissile/topology.hpp"
#include "fissile/trace.hpp"

namespace fissile::bench {

struct BenchConfig {
  LockKind lock = LockKind::kFissile;
  // Normal threads. FIFO-designated threads are added on top of these.
  unsigned threads = 1;
  double duration_seconds = 10.0;
  unsigned cs_prng_steps = 2;
  // 0 means an empty non-critical section, else uniform in [0, ncs_max_steps).
  unsigned ncs_max_steps = 0;
  unsigned fifo_threads = 0;
  unsigned fifo_ncs_max_steps = 2000;
  unsigned grace_period = 50;
  std::uint64_t flush_denominator = 256;
  // 0 queries the OS; a positive count selects the synthetic topology.
  unsigned nodes = 0;
  bool synthetic_topology = false;
  std::uint64_t seed = 1;
  unsigned runs = 7;
  // Append wait samples to per-thread buffers instead of the global log.
  bool per_thread_log = false;
  // Keep each run's wait samples in RunMetrics::wait_log.
  bool keep_wait_log = false;

  // Atomic-record workload.
  unsigned lock_array_size = 64;
  unsigned ncs_max_steps_atomic = 200;
  // Thread 0 republishes the record every N iterations (0: read-only).
  unsigned atomic_store_every = 0;

  // Verification.
  std::uint64_t verify_iterations = 100000;
  std::size_t verify_episodes = 1000;

  unsigned total_threads() const noexcept { return threads + fifo_threads; }
  LockParams lock_params() const { return {grace_period, {1, flush_denominator}}; }
  TopologyMap topology() const;
  /// Throws std::invalid_argument describing the first bad field.
  void validate() const;
};

struct RunMetrics {
  double elapsed_seconds = 0;
  std::uint64_t acquisitions = 0;
  std::uint64_t normal_acquisitions = 0;
  std::uint64_t fifo_acquisitions = 0;
  double throughput = 0;         // acquisitions per second, all threads
  double normal_throughput = 0;
  double fifo_throughput = 0;
  double spread = 0;             // over normal threads
  double migration = 0;          // acquisitions per NUMA migration
  double rstddev = 0;            // ratio, over all wait samples
  double theil_t = 0;
  metrics::WaitStats fifo_waits;
  std::uint64_t torn_reads = 0;  // atomic workload only
  std::uint64_t final_clock = 0;
  std::uint64_t wait_samples = 0;
  std::vector<std::uint64_t> per_thread_iterations;
  std::vector<metrics::WaitSample> wait_log;
};

struct BenchReport {
  std::string workload;  // "mutexbench" or "atomic"
  BenchConfig config;
  std::vector<RunMetrics> runs;
  RunMetrics median;
  std::vector<std::string> warnings;
};

/// Central-lock loop: read clock, acquire, advance a shared PRNG, log the wait
/// and tally migration, release, then a random-length non-critical section.
BenchReport run_mutexbench(const BenchConfig& config);

/// Lock-guarded read of a shared five-int record, guard picked by hashing the
/// record's address into a lock array.
BenchReport run_atomic_workload(const BenchConfig& config);

/// Elementwise median over runs. Wall-clock-independent fields of identical
/// inputs come back bit-identical.
RunMetrics aggregate_runs(const std::vector<RunMetrics>& runs);

/// Median single-thread acquire+release latency in nanoseconds: `cycles`
/// iterations split into batches of `batch`, median of batch means.
double uncontended_latency_ns(LockKind kind, const LockParams& params, std::uint64_t cycles,
                              std::uint64_t batch = 1000);

}  // namespace fissile::bench
