#include "fissile/bench.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <chrono>
#include <cmath>
#include <deque>
#include <functional>
#include <latch>
#include <random>
#include <stdexcept>
#include <system_error>
#include <thread>

#include "fissile/spin.hpp"

namespace fissile::bench {

TopologyMap BenchConfig::topology() const {
  TopologyMap base = nodes > 0             ? TopologyMap::synthetic(nodes)
                     : synthetic_topology ? TopologyMap::synthetic(2)
                                          : TopologyMap::os_query();
  return TopologyMap::from_environment(base);
}

void BenchConfig::validate() const {
  if (threads == 0) throw std::invalid_argument("threads must be at least 1");
  if (!(duration_seconds > 0)) throw std::invalid_argument("duration must be positive");
  if (runs == 0 || runs % 2 == 0) throw std::invalid_argument("runs must be odd");
  if (flush_denominator == 0) throw std::invalid_argument("flush denominator must be positive");
  if (lock_array_size == 0) throw std::invalid_argument("lock array size must be positive");
}

namespace {

using Clock = std::chrono::steady_clock;

std::uint64_t thread_seed(std::uint64_t seed, unsigned run, unsigned thread) {
  return seed * 1000003ULL + run * 7919ULL + thread;
}

// Shared state touched only inside the critical section, apart from the
// clock, which is also read before acquiring.
struct SharedCs {
  metrics::LockClock clock;
  alignas(kCacheSector) std::mt19937 cs_rng;
  metrics::MigrationTally tally;
  // deque: appending inside the critical section never copies the log.
  std::deque<metrics::WaitSample> log;
};

struct alignas(kCacheSector) Record {
  std::array<std::uint32_t, 5> fields{};
};

struct WorkerResult {
  std::uint64_t iterations = 0;
  std::uint64_t torn_reads = 0;
  std::vector<metrics::WaitSample> local_log;
  std::uint64_t sink = 0;
};

enum class Workload { kMutexBench, kAtomic };

template <Lockable L>
RunMetrics run_once(Workload workload, const BenchConfig& cfg, const TopologyMap& topo,
                    unsigned run) {
  const unsigned nthreads = cfg.total_threads();
  const unsigned lock_count = workload == Workload::kAtomic ? cfg.lock_array_size : 1;
  std::vector<std::unique_ptr<L>> locks;
  for (unsigned i = 0; i < lock_count; ++i) locks.push_back(make_lock<L>(cfg.lock, cfg.lock_params()));

  SharedCs shared;
  shared.cs_rng.seed(static_cast<std::mt19937::result_type>(thread_seed(cfg.seed, run, 0xffff)));
  Record record;
  L& guard = *locks[std::hash<const void*>{}(&record) % lock_count];

  std::atomic<bool> stop{false};
  std::latch ready(nthreads + 1);
  std::vector<WorkerResult> results(nthreads);

  auto worker = [&](unsigned idx) {
    const bool fifo = idx >= cfg.threads;
    ThreadContext ctx(idx, thread_seed(cfg.seed, run, idx));
    ctx.fifo = fifo;
    std::mt19937 local(static_cast<std::mt19937::result_type>(thread_seed(cfg.seed, run, idx) ^ 0x5bd1e995));
    const unsigned ncs_max = workload == Workload::kAtomic ? cfg.ncs_max_steps_atomic
                             : fifo                        ? cfg.fifo_ncs_max_steps
                                                           : cfg.ncs_max_steps;
    WorkerResult& out = results[idx];
    if (cfg.per_thread_log) out.local_log.reserve(std::size_t{1} << 16);
    ready.arrive_and_wait();

    while (!stop.load(std::memory_order_relaxed)) {
      ctx.numa_id = topo.resolve_node(ctx);
      std::uint64_t pre = shared.clock.read();
      guard.acquire(ctx);

      if (workload == Workload::kAtomic) {
        if (cfg.atomic_store_every != 0 && idx == 0 && out.iterations % cfg.atomic_store_every == 0) {
          std::uint32_t version = record.fields[0] + 1;
          record.fields.fill(version);
        }
        Record copy = record;
        if (std::any_of(copy.fields.begin(), copy.fields.end(),
                        [&](std::uint32_t f) { return f != copy.fields[0]; }))
          ++out.torn_reads;
        out.sink += copy.fields[4];
      } else {
        shared.cs_rng.discard(cfg.cs_prng_steps);
      }
      metrics::WaitSample sample = metrics::clock_observe_then_advance(shared.clock, pre, idx, fifo);
      if (cfg.per_thread_log) {
        out.local_log.push_back(sample);
      } else {
        shared.log.push_back(sample);
      }
      shared.tally.record(ctx.numa_id);

      guard.release(ctx);
      ++out.iterations;

      if (ncs_max != 0) {
        unsigned steps = std::uniform_int_distribution<unsigned>(0, ncs_max - 1)(local);
        local.discard(steps);
      }
    }
    out.sink += local();
  };

  std::vector<std::thread> threads;
  threads.reserve(nthreads);
  try {
    for (unsigned i = 0; i < nthreads; ++i) threads.emplace_back(worker, i);
  } catch (const std::system_error& e) {
    stop.store(true);
    for (unsigned i = static_cast<unsigned>(threads.size()); i <= nthreads; ++i) ready.count_down();
    for (auto& t : threads) t.join();
    throw std::runtime_error(std::string("thread spawn failed: ") + e.what());
  }

  ready.arrive_and_wait();
  auto start = Clock::now();
  std::this_thread::sleep_for(std::chrono::duration<double>(cfg.duration_seconds));
  stop.store(true, std::memory_order_release);
  for (auto& t : threads) t.join();
  double elapsed = std::chrono::duration<double>(Clock::now() - start).count();

  RunMetrics m;
  m.elapsed_seconds = elapsed;
  std::vector<std::uint64_t> normal_counts;
  std::vector<std::uint64_t> all_waits;
  std::vector<std::uint64_t> fifo_waits;
  auto absorb = [&](const metrics::WaitSample& s) {
    all_waits.push_back(s.wait);
    if (s.fifo) fifo_waits.push_back(s.wait);
  };
  if (cfg.per_thread_log) {
    for (const auto& r : results)
      for (const auto& s : r.local_log) absorb(s);
  } else {
    all_waits.reserve(shared.log.size());
    for (const auto& s : shared.log) absorb(s);
  }
  for (unsigned i = 0; i < nthreads; ++i) {
    const auto& r = results[i];
    m.per_thread_iterations.push_back(r.iterations);
    m.torn_reads += r.torn_reads;
    if (i < cfg.threads) {
      m.normal_acquisitions += r.iterations;
      normal_counts.push_back(r.iterations);
    } else {
      m.fifo_acquisitions += r.iterations;
    }
  }
  m.acquisitions = m.normal_acquisitions + m.fifo_acquisitions;
  m.throughput = static_cast<double>(m.acquisitions) / elapsed;
  m.normal_throughput = static_cast<double>(m.normal_acquisitions) / elapsed;
  m.fifo_throughput = static_cast<double>(m.fifo_acquisitions) / elapsed;
  m.spread = metrics::spread(normal_counts);
  m.migration = shared.tally.acquisitions == 0 ? metrics::kUnbounded
                                               : metrics::migration_reciprocal(shared.tally);
  m.rstddev = metrics::rstddev(std::span<const std::uint64_t>(all_waits));
  m.theil_t = metrics::theil_t(std::span<const std::uint64_t>(all_waits));
  m.fifo_waits = metrics::wait_stats(fifo_waits);
  m.final_clock = shared.clock.read();
  m.wait_samples = all_waits.size();
  if (cfg.keep_wait_log) {
    if (cfg.per_thread_log) {
      for (auto& r : results)
        m.wait_log.insert(m.wait_log.end(), r.local_log.begin(), r.local_log.end());
    } else {
      m.wait_log.assign(shared.log.begin(), shared.log.end());
    }
  }
  return m;
}

BenchReport run_workload(Workload workload, const BenchConfig& cfg) {
  cfg.validate();
  BenchReport report;
  report.workload = workload == Workload::kAtomic ? "atomic" : "mutexbench";
  report.config = cfg;

  TopologyMap topo = cfg.topology();
  if (topo.warning()) report.warnings.push_back(*topo.warning());
  if (configure_spin_policy(cfg.total_threads()))
    report.warnings.push_back("threads exceed hardware concurrency; waiters yield while spinning");

  for (unsigned run = 0; run < cfg.runs; ++run) {
    RunMetrics m = visit_lock_kind(cfg.lock, [&]<typename L>(std::type_identity<L>) {
      return run_once<L>(workload, cfg, topo, run);
    });
    if (std::isinf(m.spread))
      report.warnings.push_back("run " + std::to_string(run) +
                                ": a thread completed no iterations (spread unbounded)");
    if (m.torn_reads != 0)
      report.warnings.push_back("run " + std::to_string(run) + ": torn record reads observed");
    report.runs.push_back(std::move(m));
  }
  report.median = aggregate_runs(report.runs);
  return report;
}

}  // namespace

BenchReport run_mutexbench(const BenchConfig& config) {
  return run_workload(Workload::kMutexBench, config);
}

BenchReport run_atomic_workload(const BenchConfig& config) {
  return run_workload(Workload::kAtomic, config);
}

RunMetrics aggregate_runs(const std::vector<RunMetrics>& runs) {
  RunMetrics out;
  if (runs.empty()) return out;
  auto med = [&](auto field) {
    std::vector<double> v;
    v.reserve(runs.size());
    for (const auto& r : runs) v.push_back(static_cast<double>(field(r)));
    return metrics::median(std::move(v));
  };
  auto med_u = [&](auto field) { return static_cast<std::uint64_t>(med(field)); };
  out.elapsed_seconds = med([](const RunMetrics& r) { return r.elapsed_seconds; });
  out.acquisitions = med_u([](const RunMetrics& r) { return r.acquisitions; });
  out.normal_acquisitions = med_u([](const RunMetrics& r) { return r.normal_acquisitions; });
  out.fifo_acquisitions = med_u([](const RunMetrics& r) { return r.fifo_acquisitions; });
  out.throughput = med([](const RunMetrics& r) { return r.throughput; });
  out.normal_throughput = med([](const RunMetrics& r) { return r.normal_throughput; });
  out.fifo_throughput = med([](const RunMetrics& r) { return r.fifo_throughput; });
  out.spread = med([](const RunMetrics& r) { return r.spread; });
  out.migration = med([](const RunMetrics& r) { return r.migration; });
  out.rstddev = med([](const RunMetrics& r) { return r.rstddev; });
  out.theil_t = med([](const RunMetrics& r) { return r.theil_t; });
  out.fifo_waits.rstddev = med([](const RunMetrics& r) { return r.fifo_waits.rstddev; });
  out.fifo_waits.worst = med_u([](const RunMetrics& r) { return r.fifo_waits.worst; });
  out.fifo_waits.average = med([](const RunMetrics& r) { return r.fifo_waits.average; });
  out.fifo_waits.median = med([](const RunMetrics& r) { return r.fifo_waits.median; });
  out.fifo_waits.count = med_u([](const RunMetrics& r) { return r.fifo_waits.count; });
  out.torn_reads = med_u([](const RunMetrics& r) { return r.torn_reads; });
  out.final_clock = med_u([](const RunMetrics& r) { return r.final_clock; });
  out.wait_samples = med_u([](const RunMetrics& r) { return r.wait_samples; });
  return out;
}

namespace {

template <Lockable L>
double latency_for(LockKind kind, const LockParams& params, std::uint64_t cycles,
                   std::uint64_t batch) {
  auto lock = make_lock<L>(kind, params);
  ThreadContext ctx(0, 1);
  // Warm up caches and branch predictors.
  for (std::uint64_t i = 0; i < batch * 10; ++i) {
    lock->acquire(ctx);
    lock->release(ctx);
  }
  std::uint64_t batches = std::max<std::uint64_t>(1, cycles / batch);
  std::vector<double> per_batch;
  per_batch.reserve(batches);
  for (std::uint64_t b = 0; b < batches; ++b) {
    auto t0 = Clock::now();
    for (std::uint64_t i = 0; i < batch; ++i) {
      lock->acquire(ctx);
      std::atomic_signal_fence(std::memory_order_seq_cst);
      lock->release(ctx);
    }
    auto t1 = Clock::now();
    per_batch.push_back(std::chrono::duration<double, std::nano>(t1 - t0).count() /
                        static_cast<double>(batch));
  }
  return metrics::median(std::move(per_batch));
}

}  // namespace

double uncontended_latency_ns(LockKind kind, const LockParams& params, std::uint64_t cycles,
                              std::uint64_t batch) {
  configure_spin_policy(1);
  return visit_lock_kind(kind, [&]<typename L>(std::type_identity<L>) {
    return latency_for<L>(kind, params, cycles, batch);
  });
}

}  // namespace fissile::bench
