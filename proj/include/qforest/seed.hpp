#pragma once

#include <cstdint>
#include <initializer_list>

namespace qforest {

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Derives a child seed from a parent seed and a path of task coordinates.
/// Every seed in an experiment (runs, folds, trees, partitions) is obtained by
/// chaining this from the master seed, so results never depend on the order in
/// which tasks execute.
constexpr std::uint64_t derive_seed(std::uint64_t parent, std::initializer_list<std::uint64_t> path) noexcept {
  std::uint64_t s = mix64(parent);
  for (std::uint64_t p : path) s = mix64(s ^ mix64(p + 0x632be59bd9b4e019ULL));
  return s;
}

// Stream tags keep seeds for different purposes apart.
namespace seed_tag {
inline constexpr std::uint64_t kInit = 1;
inline constexpr std::uint64_t kShuffle = 2;
inline constexpr std::uint64_t kTree = 3;
inline constexpr std::uint64_t kPartition = 4;
inline constexpr std::uint64_t kSplit = 5;
inline constexpr std::uint64_t kModel = 6;
}  // namespace seed_tag

}  // namespace qforest
