#pragma once

#include <array>
#include <memory>
#include <optional>
#include <string_view>
#include <utility>

#include "fissile/cna_lock.hpp"
#include "fissile/fissile_lock.hpp"
#include "fissile/lock_core.hpp"
#include "fissile/mcs_lock.hpp"

namespace fissile {

enum class LockKind { kTts, kMcs, kCna, kFissile, kFissileFifo };

inline constexpr std::array<LockKind, 5> kAllLockKinds = {
    LockKind::kTts, LockKind::kMcs, LockKind::kCna, LockKind::kFissile, LockKind::kFissileFifo};

constexpr std::string_view to_string(LockKind kind) noexcept {
  switch (kind) {
    case LockKind::kTts: return "tts";
    case LockKind::kMcs: return "mcs";
    case LockKind::kCna: return "cna";
    case LockKind::kFissile: return "fissile";
    case LockKind::kFissileFifo: return "fissile-fifo";
  }
  return "?";
}

inline std::optional<LockKind> parse_lock_kind(std::string_view name) noexcept {
  for (LockKind k : kAllLockKinds)
    if (to_string(k) == name) return k;
  return std::nullopt;
}

constexpr bool is_fissile(LockKind kind) noexcept {
  return kind == LockKind::kFissile || kind == LockKind::kFissileFifo;
}

struct LockParams {
  unsigned grace_period = 50;
  FlushProbability flush{};
};

template <Lockable L>
std::unique_ptr<L> make_lock(LockKind kind, const LockParams& params) {
  if constexpr (std::is_same_v<L, FissileLock>) {
    return std::make_unique<FissileLock>(FissileLock::Options{
        params.grace_period, params.flush, kind == LockKind::kFissileFifo});
  } else if constexpr (std::is_same_v<L, CnaLock>) {
    return std::make_unique<CnaLock>(params.flush);
  } else {
    return std::make_unique<L>();
  }
}

/// Calls `f(type_tag)` with a std::type_identity of the concrete lock type, so
/// hot loops are instantiated per lock and pay no virtual dispatch.
template <typename F>
decltype(auto) visit_lock_kind(LockKind kind, F&& f) {
  switch (kind) {
    case LockKind::kTts: return std::forward<F>(f)(std::type_identity<TtsLock>{});
    case LockKind::kMcs: return std::forward<F>(f)(std::type_identity<McsLock>{});
    case LockKind::kCna: return std::forward<F>(f)(std::type_identity<CnaLock>{});
    case LockKind::kFissile:
    case LockKind::kFissileFifo: break;
  }
  return std::forward<F>(f)(std::type_identity<FissileLock>{});
}

}  // namespace fissile
