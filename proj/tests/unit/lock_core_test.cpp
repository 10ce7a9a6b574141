#include <doctest.h>

#include <array>
#include <random>
#include <thread>
#include <vector>

#include "fissile/lock_core.hpp"
#include "fissile/lock_kind.hpp"
#include "fissile/verify.hpp"

using namespace fissile;

TEST_CASE("tri-state word test-and-set") {
  SUBCASE("unlocked word is taken") {
    TriStateWord w(0);
    CHECK(w.try_acquire());
    CHECK(w.load() == 1);
  }
  SUBCASE("locked word is left alone") {
    TriStateWord w(1);
    CHECK_FALSE(w.try_acquire());
    CHECK(w.load() == 1);
  }
  SUBCASE("handoff value survives a failed attempt") {
    TriStateWord w(2);
    CHECK_FALSE(w.try_acquire());
    CHECK(w.load() == 2);
  }
  SUBCASE("release stores the given value") {
    TriStateWord w(1);
    for (std::uint32_t v : {0u, 2u, 4u}) {
      w.release(v);
      CHECK(w.load() == v);
    }
  }
  SUBCASE("exchange installs 1 and returns the old value") {
    TriStateWord w(4);
    CHECK(w.exchange_locked() == 4);
    CHECK(w.load() == 1);
    CHECK(w.exchange_locked() == 1);
  }
}

TEST_CASE("backoff ceiling doubles and saturates") {
  std::mt19937_64 rng(7);
  BackoffState b(8);
  CHECK(b.next_delay(rng) < 8);
  CHECK(b.ceiling() == 16);

  BackoffState capped(BackoffState::kCeilingCap);
  CHECK(capped.next_delay(rng) < BackoffState::kCeilingCap);
  CHECK(capped.ceiling() == BackoffState::kCeilingCap);

  BackoffState grow;
  for (int i = 0; i < 40; ++i) grow.next_delay(rng);
  CHECK(grow.ceiling() == BackoffState::kCeilingCap);
}

namespace {

// Pearson chi-squared of BackoffState(8) delays against uniform on {0..7}.
double backoff_chi2(std::uint64_t seed, int samples) {
  std::mt19937_64 rng(seed);
  std::array<int, 8> counts{};
  for (int i = 0; i < samples; ++i) {
    BackoffState b(8);
    std::uint32_t d = b.next_delay(rng);
    if (d >= 8) return 1e300;
    ++counts[d];
  }
  double expected = samples / 8.0;
  double chi2 = 0;
  for (int c : counts) chi2 += (c - expected) * (c - expected) / expected;
  return chi2;
}

// 7 degrees of freedom, alpha = 0.01.
constexpr double kChi2Critical = 18.475;

}  // namespace

TEST_CASE("backoff delays are uniform below the ceiling") {
  CHECK(backoff_chi2(1, 80000) < kChi2Critical);
}

TEST_CASE("backoff uniformity test rejects at its nominal rate") {
  // Over 200 seeds the number of rejections is Binomial(200, 0.01); more
  // than 8 has probability below 1e-3.
  int rejections = 0;
  for (std::uint64_t seed = 100; seed < 300; ++seed)
    rejections += backoff_chi2(seed, 10000) >= kChi2Critical;
  CHECK(rejections <= 8);
}

TEST_CASE("tts lock excludes") {
  TtsLock lock;
  std::uint64_t counter = 0;
  std::vector<std::thread> ts;
  for (unsigned t = 0; t < 4; ++t)
    ts.emplace_back([&, t] {
      ThreadContext ctx(t, 3);
      for (int i = 0; i < 20000; ++i) {
        LockGuard g(lock, ctx);
        ++counter;
      }
    });
  for (auto& t : ts) t.join();
  CHECK(counter == 80000);
}

TEST_CASE("guarded counter is exact for every lock kind") {
  for (LockKind k : kAllLockKinds) {
    CAPTURE(to_string(k));
    unsigned fifo = k == LockKind::kFissileFifo ? 2 : 0;
    std::uint64_t got = bench::guarded_counter(k, LockParams{}, 4, 20000, fifo);
    CHECK(got == (4 + fifo) * 20000ULL);
  }
}

TEST_CASE("lock kind names round-trip") {
  for (LockKind k : kAllLockKinds) CHECK(parse_lock_kind(to_string(k)) == k);
  CHECK_FALSE(parse_lock_kind("ticket").has_value());
  CHECK(is_fissile(LockKind::kFissileFifo));
  CHECK_FALSE(is_fissile(LockKind::kCna));
}
