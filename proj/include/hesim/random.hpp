#pragma once

// Deterministic seeded random streams. Every sampling site in the project
// derives its own stream from (seed, stream index), so results do not depend
// on evaluation order or threading.

#include <cstdint>
#include <random>
#include <stdexcept>

namespace hesim {

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace detail

struct RunSeed {
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;

  // Independent child stream; mixing keeps distinct (stream, k) pairs apart.
  RunSeed substream(std::uint64_t k) const {
    return RunSeed{seed, detail::splitmix64(stream ^ detail::splitmix64(k + 1))};
  }
};

inline std::mt19937_64 make_engine(const RunSeed& rs) {
  const std::uint64_t s0 = detail::splitmix64(rs.seed ^ 0x5851f42d4c957f2dULL);
  const std::uint64_t s1 = detail::splitmix64(s0 ^ rs.stream);
  std::seed_seq seq{std::uint32_t(s0), std::uint32_t(s0 >> 32), std::uint32_t(s1),
                    std::uint32_t(s1 >> 32)};
  return std::mt19937_64(seq);
}

inline long long poisson_draw(std::mt19937_64& engine, double mean) {
  if (mean < 0.0) throw std::invalid_argument("poisson_draw: negative mean");
  if (mean == 0.0) return 0;
  std::poisson_distribution<long long> dist(mean);
  return dist(engine);
}

}  // namespace hesim
