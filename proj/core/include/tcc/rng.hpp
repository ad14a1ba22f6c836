#pragma once

#include <cstdint>
#include <random>

namespace tcc {

/// SplitMix64 finalizer. Used to derive decorrelated stream seeds.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seed for stream `stream` (and optional sub-stream) of a master seed.
/// A random path is fully determined by (master, stream, substream), so
/// Monte Carlo results do not depend on the order paths are executed in.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream,
                                    std::uint64_t substream = 0) noexcept {
  return splitmix64(splitmix64(splitmix64(master) ^ stream) ^ (substream * 0xd1b54a32d192ed03ULL));
}

using Engine = std::mt19937_64;

inline Engine make_engine(std::uint64_t master, std::uint64_t stream = 0,
                          std::uint64_t substream = 0) {
  return Engine{derive_seed(master, stream, substream)};
}

}  // namespace tcc
