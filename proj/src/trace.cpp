#include <algorithm>
#include <sstream>
#include <unordered_map>

#include "fissile/trace.hpp"
#include "fissile/trace_check.hpp"

namespace fissile {

std::string_view to_string(TraceKind kind) noexcept {
  switch (kind) {
    case TraceKind::kNone: return "none";
    case TraceKind::kFastPathWin: return "fastpath-win";
    case TraceKind::kDivert: return "divert";
    case TraceKind::kImpatientSet: return "impatient-set";
    case TraceKind::kHandoffTaken: return "handoff-taken";
    case TraceKind::kOuterWin: return "outer-win";
    case TraceKind::kRelease: return "release";
    case TraceKind::kQueueArrive: return "queue-arrive";
    case TraceKind::kQueueEnqueued: return "inner-enqueued";
    case TraceKind::kQueueGranted: return "inner-granted";
    case TraceKind::kQueueNoSuccessor: return "queue-no-successor";
    case TraceKind::kCull: return "cull";
    case TraceKind::kFlush: return "flush";
    case TraceKind::kReprovision: return "reprovision";
  }
  return "unknown";
}

TraceRecorder::TraceRecorder(std::size_t capacity) : slots_(capacity) {}

void TraceRecorder::record(const TraceEvent& event) noexcept {
  if (event.stamp < slots_.size()) slots_[event.stamp] = event;
}

std::vector<TraceEvent> TraceRecorder::events() const {
  std::size_t filled = std::min<std::size_t>(next_.load(std::memory_order_acquire), slots_.size());
  std::vector<TraceEvent> out;
  out.reserve(filled);
  for (std::size_t i = 0; i < filled; ++i)
    if (slots_[i].kind != TraceKind::kNone) out.push_back(slots_[i]);
  return out;
}

void TraceRecorder::clear() noexcept {
  std::fill(slots_.begin(), slots_.end(), TraceEvent{});
  next_.store(0, std::memory_order_relaxed);
}

namespace {

constexpr std::size_t kMaxWindow = 64;

std::vector<TraceEvent> window(std::span<const TraceEvent> events, std::size_t first,
                               std::size_t last) {
  if (last - first + 1 > kMaxWindow) first = last + 1 - kMaxWindow;
  return {events.begin() + static_cast<std::ptrdiff_t>(first),
          events.begin() + static_cast<std::ptrdiff_t>(last) + 1};
}

bool is_acquisition(TraceKind k) {
  return k == TraceKind::kFastPathWin || k == TraceKind::kOuterWin || k == TraceKind::kHandoffTaken;
}

}  // namespace

BypassReport check_bounded_bypass(std::span<const TraceEvent> events) {
  BypassReport report;
  std::ptrdiff_t handoff_release = -1;

  struct Episode {
    std::uint32_t thread;
    std::size_t start;
    std::size_t intervening = 0;
  };
  std::vector<Episode> open;

  for (std::size_t i = 0; i < events.size(); ++i) {
    const TraceEvent& ev = events[i];
    if (ev.kind == TraceKind::kRelease) {
      if (ev.value >= 2) {
        ++report.handoff_releases;
        handoff_release = static_cast<std::ptrdiff_t>(i);
      }
    } else if (ev.kind == TraceKind::kImpatientSet && !ev.flag) {
      open.push_back({ev.thread, i});
      ++report.episodes;
    } else if (is_acquisition(ev.kind)) {
      if (handoff_release >= 0) {
        if (ev.kind != TraceKind::kHandoffTaken) {
          report.violations.push_back(
              {"handoff", "release stored >= 2 but the next acquisition was " +
                              std::string(to_string(ev.kind)) + " by thread " +
                              std::to_string(ev.thread),
               window(events, static_cast<std::size_t>(handoff_release), i)});
        }
        handoff_release = -1;
      }
      for (auto it = open.begin(); it != open.end();) {
        if (it->thread == ev.thread) {
          report.max_intervening = std::max(report.max_intervening, it->intervening);
          if (it->intervening > 0) ++report.raced_episodes;
          if (it->intervening > 1) {
            report.violations.push_back(
                {"bounded-bypass",
                 std::to_string(it->intervening) +
                     " acquisitions overtook impatient alpha thread " + std::to_string(ev.thread),
                 window(events, it->start, i)});
          }
          it = open.erase(it);
        } else {
          ++it->intervening;
          ++it;
        }
      }
    }
  }
  return report;
}

FifoReport check_fifo_order(std::span<const TraceEvent> events) {
  struct Element {
    std::uint64_t arrive = UINT64_MAX;
    std::uint64_t enqueued = UINT64_MAX;
    std::uint64_t granted = UINT64_MAX;
    std::int64_t id = 0;
    bool fifo = false;
  };
  std::unordered_map<std::int64_t, Element> by_id;
  for (const TraceEvent& ev : events) {
    switch (ev.kind) {
      case TraceKind::kQueueArrive: by_id[ev.value].arrive = ev.stamp; break;
      case TraceKind::kQueueEnqueued:
        by_id[ev.value].enqueued = ev.stamp;
        by_id[ev.value].fifo = ev.flag;
        break;
      case TraceKind::kQueueGranted: by_id[ev.value].granted = ev.stamp; break;
      default: break;
    }
  }

  std::vector<Element> elems;
  elems.reserve(by_id.size());
  for (auto& [id, e] : by_id) {
    if (e.arrive == UINT64_MAX || e.enqueued == UINT64_MAX) continue;
    e.id = id;
    elems.push_back(e);
  }
  std::sort(elems.begin(), elems.end(),
            [](const Element& a, const Element& b) { return a.arrive < b.arrive; });

  // suffix_min[i]: index of the earliest-granted element among elems[i..].
  std::vector<std::size_t> suffix_min(elems.size() + 1, SIZE_MAX);
  for (std::size_t i = elems.size(); i-- > 0;) {
    std::size_t best = suffix_min[i + 1];
    suffix_min[i] = (best == SIZE_MAX || elems[i].granted < elems[best].granted) ? i : best;
  }

  FifoReport report;
  report.elements = elems.size();
  for (const Element& s : elems) {
    if (!s.fifo) continue;
    ++report.fifo_elements;
    auto later = std::upper_bound(elems.begin(), elems.end(), s.enqueued,
                                  [](std::uint64_t v, const Element& e) { return v < e.arrive; });
    std::size_t idx = suffix_min[static_cast<std::size_t>(later - elems.begin())];
    if (idx == SIZE_MAX) continue;
    const Element& x = elems[idx];
    if (x.granted < s.granted) {
      std::vector<TraceEvent> win;
      for (const TraceEvent& ev : events) {
        bool involved = (ev.value == s.id || ev.value == x.id) &&
                        (ev.kind == TraceKind::kQueueArrive || ev.kind == TraceKind::kQueueEnqueued ||
                         ev.kind == TraceKind::kQueueGranted);
        if (involved) win.push_back(ev);
      }
      report.violations.push_back({"fifo-order",
                                   "element " + std::to_string(x.id) + " arrived after FIFO element " +
                                       std::to_string(s.id) + " but was granted first",
                                   std::move(win)});
    }
  }
  return report;
}

ChainReport check_chain_conservation(std::span<const TraceEvent> events) {
  ChainReport report;
  std::unordered_map<std::int64_t, std::size_t> enqueue_at;
  std::unordered_map<std::int64_t, std::size_t> grant_count;
  std::unordered_map<std::int64_t, std::size_t> last_cull;

  for (std::size_t i = 0; i < events.size(); ++i) {
    const TraceEvent& ev = events[i];
    switch (ev.kind) {
      case TraceKind::kQueueEnqueued:
        ++report.enqueued;
        enqueue_at[ev.value] = i;
        break;
      case TraceKind::kQueueGranted: {
        ++report.granted;
        if (++grant_count[ev.value] > 1)
          report.violations.push_back({"granted-once",
                                       "element " + std::to_string(ev.value) + " granted twice",
                                       window(events, enqueue_at.count(ev.value) ? enqueue_at[ev.value] : i, i)});
        auto c = last_cull.find(ev.value);
        if (c != last_cull.end()) last_cull.erase(c);
        break;
      }
      case TraceKind::kCull:
        ++report.culls;
        last_cull[ev.value] = i;
        if (ev.flag)
          report.violations.push_back({"fifo-culled", "FIFO element " + std::to_string(ev.value) +
                                                          " moved to the secondary chain",
                                       window(events, i, i)});
        if (ev.aux != 0)
          report.violations.push_back({"tail-culled", "tail element " + std::to_string(ev.value) +
                                                          " moved to the secondary chain",
                                       window(events, i, i)});
        if (ev.aux2 != 0)
          report.violations.push_back({"preferred-culled", "element " + std::to_string(ev.value) +
                                                               " on the preferred node was culled",
                                       window(events, i, i)});
        break;
      case TraceKind::kFlush: ++report.flushes; break;
      case TraceKind::kReprovision: ++report.reprovisions; break;
      default: break;
    }
  }
  for (const auto& [id, at] : enqueue_at) {
    if (grant_count.count(id) == 0)
      report.violations.push_back({"granted-once", "element " + std::to_string(id) + " never granted",
                                   window(events, at, at)});
  }
  for (const auto& [id, at] : last_cull) {
    report.violations.push_back({"secondary-stranded",
                                 "culled element " + std::to_string(id) + " never granted afterwards",
                                 window(events, at, at)});
  }
  return report;
}

std::string format_event(const TraceEvent& ev) {
  std::ostringstream os;
  os << ev.stamp << " t" << ev.thread << ' ' << to_string(ev.kind) << " value=" << ev.value;
  if (ev.aux != 0) os << " aux=" << ev.aux;
  if (ev.aux2 != 0) os << " aux2=" << ev.aux2;
  if (ev.flag) os << " flag";
  return os.str();
}

std::string format_trace(std::span<const TraceEvent> events) {
  std::string out;
  for (const TraceEvent& ev : events) {
    out += format_event(ev);
    out += '\n';
  }
  return out;
}

}  // namespace fissile
