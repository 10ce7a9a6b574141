#pragma once

#include <atomic>

#include "fissile/queue_element.hpp"
#include "fissile/spin.hpp"
#include "fissile/thread_context.hpp"
#include "fissile/trace.hpp"

namespace fissile {

/// Classic MCS queue lock.
///
/// The element-passing form (acquire(elem)/release(elem)) is the textbook
/// algorithm. The context form keeps the holder's element in a slot next to
/// the tail.
class McsLock {
 public:
  void acquire(QueueElement& elem, ThreadContext& ctx) noexcept {
    elem.next.store(nullptr, std::memory_order_relaxed);
    elem.granted.store(0, std::memory_order_relaxed);
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
  }

  void release(QueueElement& elem, ThreadContext& ctx) noexcept {
    QueueElement* succ = elem.next.load(std::memory_order_acquire);
    if (succ == nullptr) {
      if (trace_) [[unlikely]] trace_->emit(ctx.index, TraceKind::kQueueNoSuccessor, elem.trace_id);
      QueueElement* expected = &elem;
      if (tail_.compare_exchange_strong(expected, nullptr, std::memory_order_release,
                                        std::memory_order_relaxed))
        return;
      SpinWait wait;
      while ((succ = elem.next.load(std::memory_order_acquire)) == nullptr) wait.pause();
    }
    succ->granted.store(1, std::memory_order_release);
  }

  void acquire(ThreadContext& ctx) noexcept {
    QueueElement& elem = ctx.push_queue_element();
    elem.reset(ctx.numa_id, false);
    acquire(elem, ctx);
    holder_ = &elem;
  }

  void release(ThreadContext& ctx) noexcept {
    QueueElement* elem = holder_;
    release(*elem, ctx);
    ctx.pop_queue_element();
  }

  bool quiescent() const noexcept { return tail_.load(std::memory_order_acquire) == nullptr; }

  void set_trace(TraceSink* sink) noexcept { trace_ = sink; }

 private:
  alignas(kCacheSector) std::atomic<QueueElement*> tail_{nullptr};
  // Written and read only by the current holder.
  QueueElement* holder_ = nullptr;
  TraceSink* trace_ = nullptr;
  std::atomic<std::uint64_t> next_id_{1};
};

}  // namespace fissile
