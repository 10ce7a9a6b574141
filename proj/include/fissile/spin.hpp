#pragma once

#include <atomic>
#include <cstddef>
#include <thread>

#if defined(__x86_64__) || defined(__i386__)
#include <immintrin.h>
#endif

namespace fissile {

// Lock words and queue elements are padded to this size (two 64-byte lines).
inline constexpr std::size_t kCacheSector = 128;

/// One processor spin-wait hint (PAUSE on x86, YIELD on ARM).
inline void spin_hint() noexcept {
#if defined(__x86_64__) || defined(__i386__)
  _mm_pause();
#elif defined(__aarch64__) || defined(__arm__)
  asm volatile("yield" ::: "memory");
#else
  std::atomic_signal_fence(std::memory_order_seq_cst);
#endif
}

/// Number of consecutive spin hints after which a waiter calls
/// std::this_thread::yield(). 0 disables yielding (pure spinning).
/// Defaults to 0 on multi-core hosts and to a short interval on one CPU.
unsigned spin_yield_interval() noexcept;
void set_spin_yield_interval(unsigned interval) noexcept;

/// Turns yielding on when `threads` exceeds the hardware concurrency and off
/// otherwise. Returns true if the run is oversubscribed.
bool configure_spin_policy(unsigned threads) noexcept;

namespace detail {
extern std::atomic<unsigned> g_spin_yield_interval;
}

/// Per-wait spin helper. Construct one per busy-wait episode.
class SpinWait {
 public:
  SpinWait() noexcept
      : interval_(detail::g_spin_yield_interval.load(std::memory_order_relaxed)) {}

  void pause() noexcept {
    spin_hint();
    if (interval_ != 0 && ++count_ >= interval_) {
      count_ = 0;
      std::this_thread::yield();
    }
  }

 private:
  unsigned interval_;
  unsigned count_ = 0;
};

/// Spins `iterations` times through a SpinWait.
inline void spin_for(unsigned iterations) noexcept {
  SpinWait w;
  for (unsigned i = 0; i < iterations; ++i) w.pause();
}

}  // namespace fissile
