#include "fissile/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace fissile::metrics {

double spread(std::span<const std::uint64_t> counts) {
  if (counts.empty()) throw std::invalid_argument("spread of an empty list");
  auto [lo, hi] = std::minmax_element(counts.begin(), counts.end());
  if (*lo == 0) return kUnbounded;
  return static_cast<double>(*hi) / static_cast<double>(*lo);
}

double migration_reciprocal(const MigrationTally& t) {
  if (t.acquisitions == 0) throw std::invalid_argument("migration ratio with no acquisitions");
  if (t.migrations == 0) return kUnbounded;
  return static_cast<double>(t.acquisitions) / static_cast<double>(t.migrations);
}

namespace {

// Deterministic parallel sum: static contiguous chunks, partials combined in
// thread order, so the result only depends on the thread count.
template <typename T, typename F>
double parallel_sum(std::span<const T> xs, F term) {
#ifdef _OPENMP
  int threads = omp_get_max_threads();
  std::vector<double> partial(static_cast<std::size_t>(threads), 0.0);
#pragma omp parallel num_threads(threads)
  {
    auto tid = static_cast<std::size_t>(omp_get_thread_num());
    std::size_t n = xs.size();
    std::size_t begin = n * tid / static_cast<std::size_t>(threads);
    std::size_t end = n * (tid + 1) / static_cast<std::size_t>(threads);
    double acc = 0;
    for (std::size_t i = begin; i < end; ++i) acc += term(static_cast<double>(xs[i]));
    partial[tid] = acc;
  }
  double total = 0;
  for (double p : partial) total += p;
  return total;
#else
  double acc = 0;
  for (const T& x : xs) acc += term(static_cast<double>(x));
  return acc;
#endif
}

template <typename T, typename F>
double serial_sum(std::span<const T> xs, F term) {
  double acc = 0;
  for (const T& x : xs) acc += term(static_cast<double>(x));
  return acc;
}

struct Serial {
  template <typename T, typename F>
  double operator()(std::span<const T> xs, F term) const {
    return serial_sum(xs, term);
  }
};

struct Auto {
  template <typename T, typename F>
  double operator()(std::span<const T> xs, F term) const {
    return xs.size() >= kParallelThreshold ? parallel_sum(xs, term) : serial_sum(xs, term);
  }
};

template <typename T, typename Sum>
double rstddev_impl(std::span<const T> xs, Sum sum) {
  if (xs.size() < 2) return 0;
  double n = static_cast<double>(xs.size());
  double mean = sum(xs, [](double x) { return x; }) / n;
  if (mean == 0) return 0;
  double ss = sum(xs, [mean](double x) { return (x - mean) * (x - mean); });
  return std::sqrt(ss / (n - 1)) / mean;
}

template <typename T, typename Sum>
double theil_impl(std::span<const T> xs, Sum sum) {
  if (xs.size() < 2) return 0;
  double n = static_cast<double>(xs.size());
  double mean = sum(xs, [](double x) { return x; }) / n;
  if (mean <= 0) return 0;
  double t = sum(xs, [mean](double x) {
               if (x <= 0) return 0.0;
               double r = x / mean;
               return r * std::log(r);
             }) /
             n;
  return t / std::log(n);
}

}  // namespace

double rstddev(std::span<const double> xs) { return rstddev_impl(xs, Auto{}); }
double rstddev(std::span<const std::uint64_t> xs) { return rstddev_impl(xs, Auto{}); }
double theil_t(std::span<const double> xs) { return theil_impl(xs, Auto{}); }
double theil_t(std::span<const std::uint64_t> xs) { return theil_impl(xs, Auto{}); }

namespace serial {
double rstddev(std::span<const double> xs) { return rstddev_impl(xs, Serial{}); }
double rstddev(std::span<const std::uint64_t> xs) { return rstddev_impl(xs, Serial{}); }
double theil_t(std::span<const double> xs) { return theil_impl(xs, Serial{}); }
double theil_t(std::span<const std::uint64_t> xs) { return theil_impl(xs, Serial{}); }
}  // namespace serial

double median(std::vector<double> values) {
  if (values.empty()) return 0;
  std::size_t mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid), values.end());
  double upper = values[mid];
  if (values.size() % 2 == 1) return upper;
  double lower = *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid));
  return (lower + upper) / 2;
}

WaitStats wait_stats(std::span<const std::uint64_t> waits) {
  WaitStats s;
  s.count = waits.size();
  if (waits.empty()) return s;
  s.rstddev = rstddev(waits);
  s.worst = *std::max_element(waits.begin(), waits.end());
  double total = 0;
  for (auto w : waits) total += static_cast<double>(w);
  s.average = total / static_cast<double>(waits.size());
  s.median = median(std::vector<double>(waits.begin(), waits.end()));
  return s;
}

}  // namespace fissile::metrics
