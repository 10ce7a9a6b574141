#include "fissile/topology.hpp"

#include <sched.h>

#include <cstdlib>
#include <filesystem>
#include <stdexcept>
#include <string_view>

namespace fissile {

namespace {

bool getcpu_works() {
  unsigned cpu = 0;
  unsigned node = 0;
  return ::getcpu(&cpu, &node) == 0;
}

}  // namespace

TopologyMap TopologyMap::synthetic(unsigned node_count) {
  if (node_count == 0) throw std::invalid_argument("synthetic topology needs at least one node");
  return TopologyMap(TopologyMode::kSynthetic, node_count);
}

TopologyMap TopologyMap::os_query() {
  unsigned nodes = os_node_count();
  if (nodes == 0 || !getcpu_works()) {
    TopologyMap map(TopologyMode::kSynthetic, 1);
    map.warning_ = "OS NUMA query unavailable; using one synthetic node";
    return map;
  }
  return TopologyMap(TopologyMode::kOsQuery, nodes);
}

TopologyMap TopologyMap::from_environment(TopologyMap fallback) {
  const char* env = std::getenv("FISSILE_SYNTHETIC_NODES");
  if (env == nullptr || *env == '\0') return fallback;
  char* end = nullptr;
  unsigned long n = std::strtoul(env, &end, 10);
  if (*end != '\0' || n == 0) return fallback;
  return synthetic(static_cast<unsigned>(n));
}

int TopologyMap::resolve_node(const ThreadContext& ctx) const noexcept {
  if (mode_ == TopologyMode::kSynthetic) return static_cast<int>(ctx.index % node_count_);
  unsigned cpu = 0;
  unsigned node = 0;
  if (::getcpu(&cpu, &node) != 0) return 0;
  return static_cast<int>(node < node_count_ ? node : 0);
}

unsigned os_node_count() {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::path root("/sys/devices/system/node");
  if (!fs::is_directory(root, ec)) return 0;
  unsigned count = 0;
  for (const auto& entry : fs::directory_iterator(root, ec)) {
    std::string_view name = entry.path().filename().native();
    if (name.size() > 4 && name.substr(0, 4) == "node" &&
        name.find_first_not_of("0123456789", 4) == std::string_view::npos)
      ++count;
  }
  return count;
}

}  // namespace fissile
