#include <doctest.h>

#include <mutex>
#include <thread>
#include <vector>

#include "fissile/mcs_lock.hpp"
#include "test_util.hpp"

using namespace fissile;
using fissile::testing::ScriptedSink;
using fissile::testing::wait_until;

TEST_CASE("mcs uncontended acquire installs the element as tail") {
  McsLock lock;
  ThreadContext ctx;
  QueueElement e;
  e.reset(0, false);
  CHECK(lock.quiescent());
  lock.acquire(e, ctx);
  CHECK_FALSE(lock.quiescent());
  lock.release(e, ctx);
  CHECK(lock.quiescent());
}

TEST_CASE("mcs grants in arrival order") {
  McsLock lock;
  ScriptedSink sink;
  lock.set_trace(&sink);

  ThreadContext main_ctx(99);
  QueueElement held;
  held.reset(0, false);
  lock.acquire(held, main_ctx);

  std::mutex mu;
  std::vector<unsigned> order;
  std::vector<std::thread> ts;
  for (unsigned t = 0; t < 3; ++t) {
    std::size_t before = sink.count(TraceKind::kQueueEnqueued);
    ts.emplace_back([&, t] {
      ThreadContext ctx(t);
      lock.acquire(ctx);
      {
        std::lock_guard<std::mutex> g(mu);
        order.push_back(t);
      }
      lock.release(ctx);
    });
    // Next thread starts only once this one sits in the queue.
    REQUIRE(wait_until([&] { return sink.count(TraceKind::kQueueEnqueued) > before; }));
  }
  lock.release(held, main_ctx);
  for (auto& t : ts) t.join();
  CHECK(order == std::vector<unsigned>{0, 1, 2});
  CHECK(lock.quiescent());
}

TEST_CASE("mcs release survives an arrival between the next check and the tail CAS") {
  McsLock lock;
  ScriptedSink sink;
  std::atomic<bool> releaser_paused{false};
  std::atomic<bool> arrival_swapped{false};
  sink.hook = [&](const TraceEvent& ev) {
    if (ev.kind == TraceKind::kQueueNoSuccessor && ev.thread == 0) {
      releaser_paused = true;
      wait_until([&] { return arrival_swapped.load(); });
    }
    if (ev.kind == TraceKind::kQueueEnqueued && ev.thread == 1) arrival_swapped = true;
  };
  lock.set_trace(&sink);

  std::atomic<bool> second_done{false};
  std::thread first([&] {
    ThreadContext ctx(0);
    lock.acquire(ctx);
    lock.release(ctx);
  });
  std::thread second([&] {
    ThreadContext ctx(1);
    wait_until([&] { return releaser_paused.load(); });
    lock.acquire(ctx);
    second_done = true;
    lock.release(ctx);
  });
  first.join();
  second.join();
  CHECK(second_done);
  CHECK(lock.quiescent());

  // The releaser saw no successor, yet the arrival was granted by hand-over.
  auto evs = sink.events();
  std::size_t no_succ = 0, granted_1 = 0;
  for (std::size_t i = 0; i < evs.size(); ++i) {
    if (evs[i].kind == TraceKind::kQueueNoSuccessor && evs[i].thread == 0) no_succ = i;
    if (evs[i].kind == TraceKind::kQueueGranted && evs[i].thread == 1) granted_1 = i;
  }
  CHECK(granted_1 > no_succ);
}

TEST_CASE("mcs excludes under contention and ends quiescent") {
  McsLock lock;
  std::uint64_t counter = 0;
  std::vector<std::thread> ts;
  for (unsigned t = 0; t < 4; ++t)
    ts.emplace_back([&, t] {
      ThreadContext ctx(t);
      for (int i = 0; i < 20000; ++i) {
        lock.acquire(ctx);
        counter = counter + 1;
        lock.release(ctx);
      }
    });
  for (auto& t : ts) t.join();
  CHECK(counter == 80000);
  CHECK(lock.quiescent());
}
