#include "fissile/spin.hpp"

namespace fissile {

namespace {

unsigned hardware_threads() noexcept {
  unsigned n = std::thread::hardware_concurrency();
  return n == 0 ? 1 : n;
}

constexpr unsigned kOversubscribedYieldInterval = 8;

unsigned default_interval() noexcept {
  return hardware_threads() <= 1 ? kOversubscribedYieldInterval : 0;
}

}  // namespace

namespace detail {
std::atomic<unsigned> g_spin_yield_interval{default_interval()};
}

unsigned spin_yield_interval() noexcept {
  return detail::g_spin_yield_interval.load(std::memory_order_relaxed);
}

void set_spin_yield_interval(unsigned interval) noexcept {
  detail::g_spin_yield_interval.store(interval, std::memory_order_relaxed);
}

bool configure_spin_policy(unsigned threads) noexcept {
  bool oversubscribed = threads > hardware_threads();
  set_spin_yield_interval(oversubscribed ? kOversubscribedYieldInterval : 0);
  return oversubscribed;
}

}  // namespace fissile
