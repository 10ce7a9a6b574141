#pragma once

#include <atomic>
#include <cstdint>

#include "fissile/spin.hpp"

namespace fissile {

/// MCS / CNA chain element.
///
/// `next` and `granted` are the only fields touched by other threads while
/// the element waits. The secondary-chain carriage (sec_head, sec_tail,
/// carried_node) is written by the grantor before the releasing store to
/// `granted` and read by the new owner after its acquiring load, so it needs
/// no atomicity of its own.
struct alignas(kCacheSector) QueueElement {
  std::atomic<QueueElement*> next{nullptr};
  std::atomic<std::uint32_t> granted{0};
  int numa_id = 0;
  bool fifo = false;

  QueueElement* sec_head = nullptr;
  QueueElement* sec_tail = nullptr;
  // Preferred node of the grantor. A FIFO owner culls against this instead
  // of its own node.
  int carried_node = 0;

  std::uint64_t trace_id = 0;

  void reset(int numa, bool is_fifo) noexcept {
    next.store(nullptr, std::memory_order_relaxed);
    granted.store(0, std::memory_order_relaxed);
    numa_id = numa;
    fifo = is_fifo;
    sec_head = nullptr;
    sec_tail = nullptr;
    carried_node = numa;
    trace_id = 0;
  }

  bool has_secondary() const noexcept { return sec_head != nullptr; }

  /// Node this owner treats as preferred when culling.
  int preferred_node() const noexcept { return fifo ? carried_node : numa_id; }
};

// Poison pattern written over an element when its lifetime ends in audit mode.
inline constexpr std::uint32_t kPoisonGranted = 0xdeadbeefU;
inline QueueElement* poison_link() noexcept {
  return reinterpret_cast<QueueElement*>(static_cast<std::uintptr_t>(0xdeadbeefdeadbeefULL));
}

inline void poison(QueueElement& e) noexcept {
  e.next.store(poison_link(), std::memory_order_relaxed);
  e.granted.store(kPoisonGranted, std::memory_order_relaxed);
}

inline bool poison_intact(const QueueElement& e) noexcept {
  return e.next.load(std::memory_order_relaxed) == poison_link() &&
         e.granted.load(std::memory_order_relaxed) == kPoisonGranted;
}

}  // namespace fissile
