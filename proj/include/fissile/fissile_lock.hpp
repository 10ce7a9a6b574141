#pragma once

#include <algorithm>
#include <atomic>
#include <cassert>
#include <cstdint>

#include "fissile/cna_lock.hpp"
#include "fissile/lock_core.hpp"
#include "fissile/queue_element.hpp"
#include "fissile/spin.hpp"
#include "fissile/thread_context.hpp"
#include "fissile/trace.hpp"

namespace fissile {

/// TS fast path over a CNA slow path.
///
/// Owning `outer_` is owning the lock. Arrivals try the outer word once and
/// otherwise queue on `inner_`; the inner owner (the alpha) is the only thread
/// that spins on the outer word. An alpha that outlasts the grace period adds
/// 2 to `impatient_`; every release stores the current `impatient_` into the
/// outer word, so a value >= 2 there is a handoff reserved for the alpha.
///
/// With `fifo` enabled, contexts flagged fifo skip the fast path, hold +2 on
/// `impatient_` for the whole slow path and are never culled by the inner lock.
class FissileLock {
 public:
  struct Options {
    unsigned grace_period = 50;
    FlushProbability flush{};
    bool fifo = false;
  };

  FissileLock() : FissileLock(Options{}) {}
  explicit FissileLock(Options opts) : inner_(opts.flush), opts_(opts) {}

  void acquire(ThreadContext& ctx) {
    if (opts_.fifo && ctx.fifo) {
      acquire_fifo(ctx);
      return;
    }
    if (outer_.try_acquire()) {
      if (trace_) [[unlikely]] trace_->emit(ctx.index, TraceKind::kFastPathWin);
      return;
    }
    if (trace_) [[unlikely]] trace_->emit(ctx.index, TraceKind::kDivert, outer_.load());
    slow_path(ctx, false);
  }

  void acquire_fifo(ThreadContext& ctx) {
    std::uint32_t now = impatient_.fetch_add(2, std::memory_order_seq_cst) + 2;
    if (trace_) [[unlikely]] trace_->emit(ctx.index, TraceKind::kImpatientSet, now, 0, true);
    slow_path(ctx, true);
  }

  void release(ThreadContext& ctx) noexcept {
    if (trace_) [[unlikely]] {
      TraceEvent ev;
      ev.stamp = trace_->now();
      ev.thread = ctx.index;
      ev.kind = TraceKind::kRelease;
      std::uint32_t v = impatient_.load(std::memory_order_seq_cst);
      ev.value = v;
      trace_->record(ev);
      outer_.release(v);
      return;
    }
    outer_.release(impatient_.load(std::memory_order_seq_cst));
  }

  std::uint32_t outer_value() const noexcept { return outer_.load(std::memory_order_acquire); }
  std::uint32_t impatient_value() const noexcept {
    return impatient_.load(std::memory_order_acquire);
  }
  const Options& options() const noexcept { return opts_; }
  bool inner_quiescent() const noexcept { return inner_.quiescent(); }

  void set_trace(TraceSink* sink) noexcept {
    trace_ = sink;
    inner_.set_trace(sink);
  }

  /// Highest number of threads seen spinning on the outer word at once.
  /// Tracked only while a trace sink is attached.
  unsigned max_concurrent_alphas() const noexcept {
    return max_alphas_.load(std::memory_order_relaxed);
  }

 private:
  void slow_path(ThreadContext& ctx, bool fifo) {
    QueueElement stack_elem;
    QueueElement* elem = &stack_elem;
    if (!ctx.audit_ring.empty()) [[unlikely]] {
      elem = &ctx.audit_ring[ctx.audit_next];
      ctx.audit_next = (ctx.audit_next + 1) % ctx.audit_ring.size();
      // A poisoned slot that changed was written after its acquire returned.
      if (elem->trace_id != 0 && !poison_intact(*elem)) ++ctx.audit_violations;
    }
    elem->reset(ctx.numa_id, fifo);

    inner_.acquire(*elem, ctx);
    if (trace_) [[unlikely]] enter_alpha();
    alpha_wait(ctx, fifo);
    if (trace_) [[unlikely]] alphas_.fetch_sub(1, std::memory_order_relaxed);
    inner_.release(*elem, ctx);

    if (!ctx.audit_ring.empty()) [[unlikely]] {
      poison(*elem);
      elem->trace_id = 1;
    }
  }

  // Returns once the caller owns the outer word.
  void alpha_wait(ThreadContext& ctx, bool fifo) {
    bool impatient = fifo;
    if (!fifo) {
      for (unsigned i = 0; i < opts_.grace_period; ++i) {
        if (take_outer(ctx)) return;
        spin_hint();
      }
      std::uint32_t now = impatient_.fetch_add(2, std::memory_order_seq_cst) + 2;
      if (trace_) [[unlikely]] trace_->emit(ctx.index, TraceKind::kImpatientSet, now);
      impatient = true;
    }
    SpinWait wait;
    while (!take_outer(ctx)) wait.pause();
    if (impatient) impatient_.fetch_sub(2, std::memory_order_seq_cst);
  }

  // Impolite swap. Observing 0 is an ordinary win; observing >= 2 takes the
  // handoff, and the swap has already restored the word to 1.
  bool take_outer(ThreadContext& ctx) noexcept {
    std::uint32_t seen = outer_.exchange_locked();
    assert(opts_.fifo ? (seen == 1 || seen % 2 == 0) : seen <= 2);
    if (seen == TriStateWord::kLocked) return false;
    if (trace_) [[unlikely]]
      trace_->emit(ctx.index,
                   seen == TriStateWord::kUnlocked ? TraceKind::kOuterWin : TraceKind::kHandoffTaken,
                   seen);
    return true;
  }

  void enter_alpha() noexcept {
    unsigned n = alphas_.fetch_add(1, std::memory_order_relaxed) + 1;
    unsigned prev = max_alphas_.load(std::memory_order_relaxed);
    while (n > prev && !max_alphas_.compare_exchange_weak(prev, n, std::memory_order_relaxed)) {
    }
  }

  TriStateWord outer_;
  alignas(kCacheSector) std::atomic<std::uint32_t> impatient_{0};
  CnaLock inner_;
  Options opts_;
  TraceSink* trace_ = nullptr;
  std::atomic<unsigned> alphas_{0};
  std::atomic<unsigned> max_alphas_{0};
};

}  // namespace fissile
