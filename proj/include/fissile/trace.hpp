#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <span>
#include <string_view>
#include <vector>

namespace fissile {

enum class TraceKind : std::uint8_t {
  kNone = 0,
  // Fissile outer lock.
  kFastPathWin,
  kDivert,
  kImpatientSet,   // value: impatient after the increment
  kHandoffTaken,   // value: outer word observed by the alpha
  kOuterWin,
  kRelease,        // value: impatient loaded and stored into the outer word
  // Queue (MCS / CNA inner) lock.
  kQueueArrive,    // value: element id; stamped before the tail swap
  kQueueEnqueued,  // value: element id, aux: predecessor id (0 if none), flag: fifo
  kQueueGranted,   // value: element id
  kQueueNoSuccessor,  // releaser saw next == none and is about to CAS the tail
  kCull,           // value: element id, aux: 1 if it was the tail, aux2: numa, flag: fifo
  kFlush,          // value: secondary length spliced
  kReprovision,    // value: secondary head id
};

std::string_view to_string(TraceKind kind) noexcept;

struct TraceEvent {
  std::uint64_t stamp = 0;
  std::uint32_t thread = 0;
  TraceKind kind = TraceKind::kNone;
  bool flag = false;
  std::int64_t value = 0;
  std::int64_t aux = 0;
  std::int64_t aux2 = 0;
};

/// Event sink attached to a lock for verification runs.
///
/// `now()` hands out a logical timestamp that is sequentially consistent with
/// the lock's own atomics; locks call it right after an acquiring atomic and
/// right before a releasing one, so stamp order is ownership order.
class TraceSink {
 public:
  virtual ~TraceSink() = default;
  virtual std::uint64_t now() noexcept = 0;
  virtual void record(const TraceEvent& event) noexcept = 0;

  void emit(std::uint32_t thread, TraceKind kind, std::int64_t value = 0,
            std::int64_t aux = 0, bool flag = false, std::int64_t aux2 = 0) noexcept {
    TraceEvent ev;
    ev.stamp = now();
    ev.thread = thread;
    ev.kind = kind;
    ev.flag = flag;
    ev.value = value;
    ev.aux = aux;
    ev.aux2 = aux2;
    record(ev);
  }
};

/// Lock-free fixed-capacity recorder. The stamp doubles as the slot index, so
/// `events()` comes back in timestamp order.
class TraceRecorder final : public TraceSink {
 public:
  explicit TraceRecorder(std::size_t capacity);

  std::uint64_t now() noexcept override {
    return next_.fetch_add(1, std::memory_order_seq_cst);
  }
  void record(const TraceEvent& event) noexcept override;

  /// Recorded events in stamp order, skipping unfilled slots.
  std::vector<TraceEvent> events() const;
  bool overflowed() const noexcept {
    return next_.load(std::memory_order_relaxed) > slots_.size();
  }
  void clear() noexcept;

 private:
  std::vector<TraceEvent> slots_;
  std::atomic<std::uint64_t> next_{0};
};

}  // namespace fissile
