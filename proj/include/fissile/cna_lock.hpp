#pragma once

#include <atomic>
#include <cstdint>
#include <random>
#include <stdexcept>

#include "fissile/queue_element.hpp"
#include "fissile/spin.hpp"
#include "fissile/thread_context.hpp"
#include "fissile/trace.hpp"

namespace fissile {

/// Flush probability numerator/denominator, 0 < p <= 1.
struct FlushProbability {
  std::uint64_t numerator = 1;
  std::uint64_t denominator = 256;

  void validate() const {
    if (numerator == 0 || denominator == 0 || numerator > denominator)
      throw std::invalid_argument("flush probability must lie in (0, 1]");
  }
};

template <std::uniform_random_bit_generator Rng>
bool bernoulli_trial(FlushProbability p, Rng& rng) {
  if (p.numerator >= p.denominator) return true;
  return std::uniform_int_distribution<std::uint64_t>(0, p.denominator - 1)(rng) < p.numerator;
}

/// Compact NUMA-aware MCS lock, reorganized at acquire time.
///
/// Remote waiters are parked on a secondary chain that lives only in the
/// owner's queue element and is handed along with ownership. Once per
/// acquisition the new owner either flushes the secondary back to the front
/// of the primary (with probability p) or culls at most one remote waiter:
/// its immediate successor, provided that successor is not the chain tail and
/// is not FIFO-flagged.
class CnaLock {
 public:
  explicit CnaLock(FlushProbability p = {}) : flush_(p) { flush_.validate(); }

  /// Enqueue, wait, inherit the secondary chain, then reorganize once.
  void acquire(QueueElement& elem, ThreadContext& ctx) {
    if (trace_) [[unlikely]] {
      elem.trace_id = next_id_.fetch_add(1, std::memory_order_relaxed);
      trace_->emit(ctx.index, TraceKind::kQueueArrive, elem.trace_id);
    }
    QueueElement* pred = tail_.exchange(&elem, std::memory_order_acq_rel);
    if (trace_) [[unlikely]]
      trace_->emit(ctx.index, TraceKind::kQueueEnqueued, elem.trace_id,
                   pred ? pred->trace_id : 0, elem.fifo);
    if (pred != nullptr) {
      pred->next.store(&elem, std::memory_order_release);
      SpinWait wait;
      while (elem.granted.load(std::memory_order_acquire) == 0) wait.pause();
    }
    if (trace_) [[unlikely]] trace_->emit(ctx.index, TraceKind::kQueueGranted, elem.trace_id);
    reorganize(elem, ctx);
  }

  void reorganize(QueueElement& owner, ThreadContext& ctx) {
    reorganize(owner, bernoulli_trial(flush_, ctx.rng), ctx.index);
  }

  /// One reorganization step with the flush decision supplied. Returns true if
  /// the secondary chain was flushed.
  bool reorganize(QueueElement& owner, bool flush_now, std::uint32_t thread = 0) {
    if (flush_now && owner.has_secondary()) {
      flush(owner, thread);
      return true;
    }
    cull_one(owner, thread);
    return false;
  }

  void release(QueueElement& elem, ThreadContext& ctx) { release(elem, ctx.index); }

  void release(QueueElement& elem, std::uint32_t thread = 0) {
    QueueElement* succ = elem.next.load(std::memory_order_acquire);
    if (succ != nullptr) {
      grant(*succ, elem.sec_head, elem.sec_tail, elem.preferred_node());
      return;
    }
    if (trace_) [[unlikely]] trace_->emit(thread, TraceKind::kQueueNoSuccessor, elem.trace_id);
    if (elem.has_secondary()) {
      QueueElement* head = elem.sec_head;
      QueueElement* sec_tail = elem.sec_tail;
      if (trace_) [[unlikely]] trace_->emit(thread, TraceKind::kReprovision, head->trace_id);
      QueueElement* expected = &elem;
      if (!tail_.compare_exchange_strong(expected, sec_tail, std::memory_order_acq_rel,
                                         std::memory_order_relaxed)) {
        succ = wait_for_next(elem);
        sec_tail->next.store(succ, std::memory_order_relaxed);
      }
      grant(*head, nullptr, nullptr, head->numa_id);
      return;
    }
    QueueElement* expected = &elem;
    if (tail_.compare_exchange_strong(expected, nullptr, std::memory_order_release,
                                      std::memory_order_relaxed))
      return;
    succ = wait_for_next(elem);
    grant(*succ, nullptr, nullptr, elem.preferred_node());
  }

  void acquire(ThreadContext& ctx) {
    QueueElement& elem = ctx.push_queue_element();
    elem.reset(ctx.numa_id, false);
    acquire(elem, ctx);
    holder_ = &elem;
  }

  void release(ThreadContext& ctx) {
    QueueElement* elem = holder_;
    release(*elem, ctx.index);
    ctx.pop_queue_element();
  }

  bool quiescent() const noexcept { return tail_.load(std::memory_order_acquire) == nullptr; }
  FlushProbability flush_probability() const noexcept { return flush_; }
  void set_trace(TraceSink* sink) noexcept { trace_ = sink; }

  // Direct tail access for single-threaded chain tests.
  std::atomic<QueueElement*>& tail_for_testing() noexcept { return tail_; }

 private:
  static QueueElement* wait_for_next(QueueElement& elem) noexcept {
    QueueElement* succ;
    SpinWait wait;
    while ((succ = elem.next.load(std::memory_order_acquire)) == nullptr) wait.pause();
    return succ;
  }

  // Carriage fields are plain writes published by the releasing store.
  static void grant(QueueElement& succ, QueueElement* sec_head, QueueElement* sec_tail,
                    int preferred) noexcept {
    succ.sec_head = sec_head;
    succ.sec_tail = sec_tail;
    succ.carried_node = preferred;
    succ.granted.store(1, std::memory_order_release);
  }

  void flush(QueueElement& owner, std::uint32_t thread) {
    QueueElement* head = owner.sec_head;
    QueueElement* sec_tail = owner.sec_tail;
    if (trace_) [[unlikely]] {
      std::int64_t n = 1;
      for (QueueElement* e = head; e != sec_tail; e = e->next.load(std::memory_order_relaxed)) ++n;
      trace_->emit(thread, TraceKind::kFlush, n);
    }
    // sec_tail->next is already none.
    QueueElement* succ = owner.next.load(std::memory_order_acquire);
    if (succ == nullptr) {
      // Owner may still be the tail: swing the tail to the end of the
      // secondary, or wait for the arrival that beat us to link in.
      QueueElement* expected = &owner;
      if (!tail_.compare_exchange_strong(expected, sec_tail, std::memory_order_acq_rel,
                                         std::memory_order_relaxed))
        succ = wait_for_next(owner);
    }
    if (succ != nullptr) sec_tail->next.store(succ, std::memory_order_relaxed);
    owner.next.store(head, std::memory_order_relaxed);
    owner.sec_head = nullptr;
    owner.sec_tail = nullptr;
  }

  void cull_one(QueueElement& owner, std::uint32_t thread) {
    QueueElement* cand = owner.next.load(std::memory_order_acquire);
    if (cand == nullptr || cand->fifo || cand->numa_id == owner.preferred_node()) return;
    QueueElement* after = cand->next.load(std::memory_order_acquire);
    // No successor: the candidate may be the tail.
    if (after == nullptr) return;
    if (trace_) [[unlikely]]
      trace_->emit(thread, TraceKind::kCull, cand->trace_id,
                   tail_.load(std::memory_order_acquire) == cand ? 1 : 0, cand->fifo,
                   cand->numa_id == owner.preferred_node() ? 1 : 0);
    owner.next.store(after, std::memory_order_relaxed);
    cand->next.store(nullptr, std::memory_order_relaxed);
    if (owner.sec_tail == nullptr) {
      owner.sec_head = cand;
    } else {
      owner.sec_tail->next.store(cand, std::memory_order_relaxed);
    }
    owner.sec_tail = cand;
  }

  alignas(kCacheSector) std::atomic<QueueElement*> tail_{nullptr};
  QueueElement* holder_ = nullptr;
  FlushProbability flush_;
  TraceSink* trace_ = nullptr;
  std::atomic<std::uint64_t> next_id_{1};
};

}  // namespace fissile
