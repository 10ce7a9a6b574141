#include "fissile/verify.hpp"

#include <algorithm>
#include <latch>
#include <thread>

#include "fissile/spin.hpp"
#include "fissile/topology.hpp"
#include "fissile/trace_check.hpp"

namespace fissile::bench {

namespace {

template <Lockable L>
std::uint64_t counter_for(LockKind kind, const LockParams& params, unsigned threads,
                          std::uint64_t iterations, unsigned fifo_threads) {
  auto lock = make_lock<L>(kind, params);
  std::uint64_t counter = 0;
  unsigned total = threads + fifo_threads;
  std::latch start(total);
  std::vector<std::thread> pool;
  pool.reserve(total);
  for (unsigned t = 0; t < total; ++t) {
    pool.emplace_back([&, t] {
      ThreadContext ctx(t, 0x5eed);
      ctx.fifo = t >= threads;
      ctx.numa_id = static_cast<int>(t % 2);
      start.arrive_and_wait();
      for (std::uint64_t i = 0; i < iterations; ++i) {
        LockGuard guard(*lock, ctx);
        // Plain read-modify-write: lost updates show up as a short count.
        counter = counter + 1;
      }
    });
  }
  for (auto& th : pool) th.join();
  return counter;
}

template <Lockable L>
TracedRun traced_for(LockKind kind, const LockParams& params, unsigned threads,
                     unsigned fifo_threads, std::uint64_t iterations, unsigned cs_spins,
                     unsigned nodes, std::uint64_t seed, bool audit) {
  auto lock = make_lock<L>(kind, params);
  unsigned total = threads + fifo_threads;
  TraceRecorder recorder(static_cast<std::size_t>(iterations) * total * 12 + 1024);
  if constexpr (requires { lock->set_trace(&recorder); }) lock->set_trace(&recorder);
  TopologyMap topo = TopologyMap::synthetic(std::max(1u, nodes));

  std::vector<std::unique_ptr<ThreadContext>> contexts;
  for (unsigned t = 0; t < total; ++t) {
    contexts.push_back(std::make_unique<ThreadContext>(t, seed));
    contexts.back()->fifo = t >= threads;
    if (audit) contexts.back()->enable_element_audit(16);
  }

  std::latch start(total);
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < total; ++t) {
    pool.emplace_back([&, t] {
      ThreadContext& ctx = *contexts[t];
      start.arrive_and_wait();
      for (std::uint64_t i = 0; i < iterations; ++i) {
        ctx.numa_id = topo.resolve_node(ctx);
        lock->acquire(ctx);
        spin_for(cs_spins);
        lock->release(ctx);
        // FIFO threads are low duty cycle.
        if (ctx.fifo) spin_for(cs_spins * 4);
      }
    });
  }
  for (auto& th : pool) th.join();

  TracedRun run;
  run.events = recorder.events();
  run.overflowed = recorder.overflowed();
  run.acquisitions = iterations * total;
  if constexpr (std::is_same_v<L, FissileLock>) {
    run.max_concurrent_alphas = lock->max_concurrent_alphas();
    run.quiescent = lock->inner_quiescent();
  } else if constexpr (requires { lock->quiescent(); }) {
    run.quiescent = lock->quiescent();
  }
  for (auto& ctx : contexts) {
    run.audit_violations += ctx->audit_violations;
    for (const QueueElement& e : ctx->audit_ring)
      if (e.trace_id != 0 && !poison_intact(e)) ++run.audit_violations;
  }
  return run;
}

CheckResult named(std::string name) {
  CheckResult c;
  c.name = std::move(name);
  return c;
}

CheckResult not_applicable(std::string name) {
  CheckResult c;
  c.name = std::move(name);
  c.applicable = false;
  c.detail = "not applicable to this lock kind";
  return c;
}

template <typename Report>
void take_first_violation(CheckResult& c, const Report& r) {
  if (r.violations.empty()) return;
  c.passed = false;
  c.detail = r.violations.front().rule + ": " + r.violations.front().detail + " (" +
             std::to_string(r.violations.size()) + " violations)";
  c.counterexample = r.violations.front().window;
}

}  // namespace

std::uint64_t guarded_counter(LockKind kind, const LockParams& params, unsigned threads,
                              std::uint64_t iterations, unsigned fifo_threads) {
  configure_spin_policy(threads + fifo_threads);
  return visit_lock_kind(kind, [&]<typename L>(std::type_identity<L>) {
    return counter_for<L>(kind, params, threads, iterations, fifo_threads);
  });
}

TracedRun traced_run(LockKind kind, const LockParams& params, unsigned threads,
                     unsigned fifo_threads, std::uint64_t iterations, unsigned cs_spins,
                     unsigned nodes, std::uint64_t seed, bool audit_elements) {
  configure_spin_policy(threads + fifo_threads);
  return visit_lock_kind(kind, [&]<typename L>(std::type_identity<L>) {
    return traced_for<L>(kind, params, threads, fifo_threads, iterations, cs_spins, nodes, seed,
                         audit_elements);
  });
}

VerifyReport run_verification(const BenchConfig& cfg) {
  cfg.validate();
  VerifyReport report;
  report.lock = cfg.lock;
  const LockParams params = cfg.lock_params();
  const bool fissile_kind = is_fissile(cfg.lock);
  const bool queue_kind = cfg.lock == LockKind::kCna || fissile_kind;
  const unsigned fifo_threads =
      cfg.lock == LockKind::kFissileFifo ? std::max(cfg.fifo_threads, 2u) : 0u;
  const unsigned trace_threads = std::max(cfg.threads, 2u);
  const unsigned nodes = cfg.nodes > 0 ? cfg.nodes : 2;

  {
    CheckResult c;
    c.name = "exclusion";
    std::uint64_t expected = static_cast<std::uint64_t>(cfg.total_threads()) * cfg.verify_iterations;
    std::uint64_t got =
        guarded_counter(cfg.lock, params, cfg.threads, cfg.verify_iterations, cfg.fifo_threads);
    c.passed = got == expected;
    c.detail = std::to_string(got) + " of " + std::to_string(expected) + " increments";
    report.checks.push_back(std::move(c));
  }

  if (!queue_kind) {
    for (const char* name : {"alpha-uniqueness", "bounded-bypass", "fifo-order", "element-lifetime",
                             "chain-conservation"})
      report.checks.push_back(not_applicable(name));
    return report;
  }

  // Traced rounds until enough impatience episodes have been observed.
  CheckResult alpha = named("alpha-uniqueness");
  CheckResult bypass = named("bounded-bypass");
  CheckResult fifo = named("fifo-order");
  CheckResult lifetime = named("element-lifetime");
  CheckResult chain = named("chain-conservation");
  std::size_t episodes = 0;
  std::size_t raced = 0;
  std::size_t handoffs = 0;
  std::size_t max_intervening = 0;
  std::size_t fifo_elements = 0;
  std::size_t culls = 0;
  unsigned max_alphas = 0;
  std::uint64_t audit_violations = 0;
  constexpr std::uint64_t kRoundIterations = 2000;
  constexpr unsigned kMaxRounds = 64;
  const std::size_t target = fissile_kind ? cfg.verify_episodes : 0;

  for (unsigned round = 0; round < kMaxRounds; ++round) {
    TracedRun run = traced_run(cfg.lock, params, trace_threads, fifo_threads, kRoundIterations, 200,
                               nodes, cfg.seed + round, fissile_kind);
    if (run.overflowed) report.warnings.push_back("trace buffer overflowed in round " + std::to_string(round));
    max_alphas = std::max(max_alphas, run.max_concurrent_alphas);
    audit_violations += run.audit_violations;

    ChainReport cr = check_chain_conservation(run.events);
    culls += cr.culls;
    if (chain.passed) take_first_violation(chain, cr);
    if (!run.quiescent && chain.passed) {
      chain.passed = false;
      chain.detail = "queue tail not empty after all threads released";
    }

    if (fissile_kind) {
      BypassReport br = check_bounded_bypass(run.events);
      episodes += br.episodes;
      raced += br.raced_episodes;
      handoffs += br.handoff_releases;
      max_intervening = std::max(max_intervening, br.max_intervening);
      if (bypass.passed) take_first_violation(bypass, br);
    }
    if (fifo_threads > 0) {
      FifoReport fr = check_fifo_order(run.events);
      fifo_elements += fr.fifo_elements;
      if (fifo.passed) take_first_violation(fifo, fr);
    }
    if (episodes >= target) break;
  }

  chain.detail = chain.passed ? std::to_string(culls) + " culls, all elements granted exactly once"
                              : chain.detail;
  if (!fissile_kind) {
    report.checks.push_back(not_applicable("alpha-uniqueness"));
    report.checks.push_back(not_applicable("bounded-bypass"));
    report.checks.push_back(not_applicable("fifo-order"));
    report.checks.push_back(not_applicable("element-lifetime"));
    report.checks.push_back(std::move(chain));
    return report;
  }

  alpha.passed = max_alphas <= 1;
  alpha.detail = "max concurrent outer spinners " + std::to_string(max_alphas);
  if (bypass.passed) {
    bypass.passed = episodes >= target;
    bypass.detail = std::to_string(episodes) + " impatience episodes (" + std::to_string(raced) +
                    " raced), " + std::to_string(handoffs) + " handoff releases, max " +
                    std::to_string(max_intervening) + " intervening acquisitions";
    if (!bypass.passed) bypass.detail += "; fewer episodes than the target of " + std::to_string(target);
  }
  if (fifo_threads == 0) {
    fifo = not_applicable("fifo-order");
  } else if (fifo.passed) {
    fifo.detail = std::to_string(fifo_elements) + " FIFO elements, no later arrival granted first";
  }
  lifetime.passed = audit_violations == 0;
  lifetime.detail = std::to_string(audit_violations) + " writes to queue elements after release";

  report.checks.push_back(std::move(alpha));
  report.checks.push_back(std::move(bypass));
  report.checks.push_back(std::move(fifo));
  report.checks.push_back(std::move(lifetime));
  report.checks.push_back(std::move(chain));
  return report;
}

}  // namespace fissile::bench
