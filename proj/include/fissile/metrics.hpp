#pragma once

#include <atomic>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

namespace fissile::metrics {

/// Sentinel for ratios with a zero denominator (spread with a starved thread,
/// migration reciprocal with no migrations).
inline constexpr double kUnbounded = std::numeric_limits<double>::infinity();

/// Shared counter in units of lock acquisitions. Written only inside the
/// critical section; read before acquiring, hence atomic with relaxed order.
struct alignas(128) LockClock {
  std::atomic<std::uint64_t> value{0};

  std::uint64_t read() const noexcept { return value.load(std::memory_order_relaxed); }
};

struct WaitSample {
  std::uint64_t wait = 0;
  std::uint32_t thread = 0;
  bool fifo = false;
};

/// Call inside the critical section with the clock value read before acquire.
/// Returns the wait and advances the clock by one.
inline WaitSample clock_observe_then_advance(LockClock& clock, std::uint64_t pre_value,
                                             std::uint32_t thread = 0, bool fifo = false) noexcept {
  std::uint64_t entry = clock.value.load(std::memory_order_relaxed);
  clock.value.store(entry + 1, std::memory_order_relaxed);
  return {entry - pre_value, thread, fifo};
}

struct MigrationTally {
  std::uint64_t acquisitions = 0;
  std::uint64_t migrations = 0;
  int last_node = -1;

  void record(int node) noexcept {
    if (last_node >= 0 && node != last_node) ++migrations;
    last_node = node;
    ++acquisitions;
  }
};

/// max/min of per-thread iteration counts; kUnbounded if any count is zero.
/// Throws std::invalid_argument on an empty list.
double spread(std::span<const std::uint64_t> per_thread_counts);

/// acquisitions / migrations; kUnbounded when nothing migrated.
/// Throws std::invalid_argument when there were no acquisitions.
double migration_reciprocal(const MigrationTally& tally);

/// Sample standard deviation over the mean. 0 for fewer than 2 samples or a
/// zero mean.
double rstddev(std::span<const double> samples);
double rstddev(std::span<const std::uint64_t> samples);

/// Theil-T index normalized by ln(n), in [0, 1]. 0 for fewer than 2 samples
/// or all-zero input.
double theil_t(std::span<const double> samples);
double theil_t(std::span<const std::uint64_t> samples);

/// Single-threaded reference kernels. The functions above switch to OpenMP
/// reductions on large inputs and are tested against these.
namespace serial {
double rstddev(std::span<const double> samples);
double rstddev(std::span<const std::uint64_t> samples);
double theil_t(std::span<const double> samples);
double theil_t(std::span<const std::uint64_t> samples);
}  // namespace serial

/// Inputs at or above this size use the parallel kernels.
inline constexpr std::size_t kParallelThreshold = std::size_t{1} << 15;

struct WaitStats {
  double rstddev = 0;
  std::uint64_t worst = 0;
  double average = 0;
  double median = 0;
  std::size_t count = 0;
};

WaitStats wait_stats(std::span<const std::uint64_t> waits);

/// Middle element of an odd-length list, mean of the two middles otherwise.
double median(std::vector<double> values);

}  // namespace fissile::metrics
