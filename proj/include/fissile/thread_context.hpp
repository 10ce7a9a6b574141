#pragma once

#include <array>
#include <cassert>
#include <cstdint>
#include <random>
#include <vector>

#include "fissile/queue_element.hpp"

namespace fissile {

/// Per-thread state handed to every acquire/release. Never shared.
struct ThreadContext {
  static constexpr unsigned kMaxHeldQueueLocks = 4;

  explicit ThreadContext(unsigned thread_index = 0, std::uint64_t seed = 0)
      : index(thread_index), rng(seed * 0x9e3779b97f4a7c15ULL + thread_index + 1) {}

  ThreadContext(const ThreadContext&) = delete;
  ThreadContext& operator=(const ThreadContext&) = delete;

  unsigned index;
  // Refreshed by the caller before each acquisition in os-query topology mode.
  int numa_id = 0;
  // Honoured only by a FIFO-enabled FissileLock.
  bool fifo = false;
  std::mt19937_64 rng;

  // Elements for the standalone MCS/CNA locks, which need one per held lock
  // from acquire until release. Released in LIFO order.
  QueueElement& push_queue_element() noexcept {
    assert(queue_depth < kMaxHeldQueueLocks);
    return queue_elements[queue_depth++];
  }
  void pop_queue_element() noexcept {
    assert(queue_depth > 0);
    --queue_depth;
  }

  // Lifetime audit: when non-empty, the Fissile slow path takes its element
  // from this ring instead of the stack and poisons it on the way out.
  void enable_element_audit(std::size_t ring_size) { audit_ring = std::vector<QueueElement>(ring_size); }

  std::array<QueueElement, kMaxHeldQueueLocks> queue_elements{};
  unsigned queue_depth = 0;
  std::vector<QueueElement> audit_ring;
  std::size_t audit_next = 0;
  std::uint64_t audit_violations = 0;
};

}  // namespace fissile
