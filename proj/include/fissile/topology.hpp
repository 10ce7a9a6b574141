#pragma once

#include <optional>
#include <string>

#include "fissile/thread_context.hpp"

namespace fissile {

enum class TopologyMode { kOsQuery, kSynthetic };

/// Maps threads to NUMA node ids.
///
/// Synthetic mode assigns thread i to node i mod node_count, which makes
/// NUMA behaviour reproducible on a single-socket machine. OS-query mode asks
/// the kernel which node the calling thread is running on right now.
class TopologyMap {
 public:
  static TopologyMap synthetic(unsigned node_count);
  static TopologyMap os_query();

  /// Reads FISSILE_SYNTHETIC_NODES; a positive value forces synthetic mode
  /// with that many nodes. Otherwise returns `fallback`.
  static TopologyMap from_environment(TopologyMap fallback);

  TopologyMode mode() const noexcept { return mode_; }
  unsigned node_count() const noexcept { return node_count_; }

  int resolve_node(const ThreadContext& ctx) const noexcept;

  /// Set when os-query was requested but unavailable and the map fell back to
  /// a single synthetic node.
  const std::optional<std::string>& warning() const noexcept { return warning_; }

 private:
  TopologyMap(TopologyMode mode, unsigned nodes) : mode_(mode), node_count_(nodes) {}

  TopologyMode mode_;
  unsigned node_count_;
  std::optional<std::string> warning_;
};

/// Number of NUMA nodes the OS reports, or 0 if it cannot be determined.
unsigned os_node_count();

}  // namespace fissile
