#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "fissile/trace.hpp"

namespace fissile {

struct TraceViolation {
  std::string rule;
  std::string detail;
  // Shortest slice of the trace that exhibits the violation.
  std::vector<TraceEvent> window;
};

struct BypassReport {
  std::size_t episodes = 0;          // non-FIFO impatience entries
  std::size_t raced_episodes = 0;    // episodes in which another thread acquired first
  std::size_t handoff_releases = 0;  // releases that stored >= 2
  std::size_t max_intervening = 0;   // most foreign acquisitions inside one episode
  std::vector<TraceViolation> violations;
};

/// Outer-lock handoff discipline over a Fissile trace:
///  - a release that stores >= 2 is followed by a handoff, never another win;
///  - between an alpha's impatience entry and its acquisition at most one
///    other thread acquires the lock.
BypassReport check_bounded_bypass(std::span<const TraceEvent> events);

struct FifoReport {
  std::size_t elements = 0;
  std::size_t fifo_elements = 0;
  std::vector<TraceViolation> violations;
};

/// No queue element that definitely arrived after a FIFO element S (its
/// pre-swap stamp follows S's post-swap stamp) is granted before S.
FifoReport check_fifo_order(std::span<const TraceEvent> events);

struct ChainReport {
  std::size_t enqueued = 0;
  std::size_t granted = 0;
  std::size_t culls = 0;
  std::size_t flushes = 0;
  std::size_t reprovisions = 0;
  std::vector<TraceViolation> violations;
};

/// Queue-lock bookkeeping: every enqueued element granted exactly once, culls
/// never take a FIFO element, the tail, or a preferred-node element, and a
/// culled element is granted only after its cull.
ChainReport check_chain_conservation(std::span<const TraceEvent> events);

std::string format_event(const TraceEvent& event);
std::string format_trace(std::span<const TraceEvent> events);

}  // namespace fissile
