#pragma once

#include <algorithm>
#include <atomic>
#include <cassert>
#include <concepts>
#include <cstdint>
#include <random>

#include "fissile/spin.hpp"
#include "fissile/thread_context.hpp"

namespace fissile {

/// Every lock kind exposes acquire/release on a thread context.
template <typename L>
concept Lockable = requires(L& lock, ThreadContext& ctx) {
  lock.acquire(ctx);
  lock.release(ctx);
};

/// RAII holder for any Lockable.
template <Lockable L>
class LockGuard {
 public:
  LockGuard(L& lock, ThreadContext& ctx) : lock_(lock), ctx_(ctx) { lock_.acquire(ctx_); }
  ~LockGuard() { lock_.release(ctx_); }
  LockGuard(const LockGuard&) = delete;
  LockGuard& operator=(const LockGuard&) = delete;

 private:
  L& lock_;
  ThreadContext& ctx_;
};

/// Test-and-set word. 0 is unlocked, 1 locked; Fissile also uses 2 and above
/// as a "handoff pending" state that only the alpha may consume.
class alignas(kCacheSector) TriStateWord {
 public:
  static constexpr std::uint32_t kUnlocked = 0;
  static constexpr std::uint32_t kLocked = 1;
  static constexpr std::uint32_t kHandoff = 2;

  TriStateWord() = default;
  explicit TriStateWord(std::uint32_t v) : value_(v) {}

  /// Installs 1 iff the word is 0. A nonzero word is left exactly as found,
  /// so a pending handoff value survives a failed attempt.
  bool try_acquire() noexcept {
    std::uint32_t expected = kUnlocked;
    return value_.compare_exchange_strong(expected, kLocked, std::memory_order_acquire,
                                          std::memory_order_relaxed);
  }

  void release(std::uint32_t store_value = kUnlocked) noexcept {
    value_.store(store_value, std::memory_order_release);
  }

  /// Impolite swap of 1 into the word; returns what was there.
  std::uint32_t exchange_locked() noexcept {
    return value_.exchange(kLocked, std::memory_order_acquire);
  }

  std::uint32_t load(std::memory_order order = std::memory_order_relaxed) const noexcept {
    return value_.load(order);
  }

 private:
  std::atomic<std::uint32_t> value_{kUnlocked};
};

/// Truncated randomized binary exponential backoff.
class BackoffState {
 public:
  static constexpr std::uint32_t kCeilingCap = 100000;
  static constexpr std::uint32_t kInitialCeiling = 1;

  explicit BackoffState(std::uint32_t ceiling = kInitialCeiling) noexcept
      : ceiling_(std::clamp<std::uint32_t>(ceiling, 1, kCeilingCap)) {}

  std::uint32_t ceiling() const noexcept { return ceiling_; }

  /// Draws a delay uniform in [0, ceiling) and doubles the ceiling up to the cap.
  template <std::uniform_random_bit_generator Rng>
  std::uint32_t next_delay(Rng& rng) noexcept {
    std::uint32_t delay = std::uniform_int_distribution<std::uint32_t>(0, ceiling_ - 1)(rng);
    ceiling_ = std::min(ceiling_ * 2, kCeilingCap);
    return delay;
  }

 private:
  std::uint32_t ceiling_;
};

/// Polite test-and-test-and-set lock with backoff. No fairness.
class TtsLock {
 public:
  void acquire(ThreadContext& ctx) noexcept {
    BackoffState backoff;
    for (;;) {
      SpinWait wait;
      while (word_.load() != TriStateWord::kUnlocked) wait.pause();
      if (word_.exchange_locked() == TriStateWord::kUnlocked) return;
      spin_for(backoff.next_delay(ctx.rng));
    }
  }

  void release(ThreadContext&) noexcept { word_.release(TriStateWord::kUnlocked); }

 private:
  TriStateWord word_;
};

}  // namespace fissile
