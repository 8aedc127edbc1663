#ifndef GALILEO_SIM_RNG_HPP
#define GALILEO_SIM_RNG_HPP

#include <cstdint>
#include <random>

namespace galileo::sim {

enum class Stream : std::uint64_t {
  Imu = 1,
  Bias = 2,
  Lidar = 3,
  Initial = 4,
  Bench = 5,
};

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

/// Independent engine per (seed, stream, index); no seed bookkeeping needed.
inline std::mt19937_64 stream_engine(std::uint64_t seed, Stream stream, std::uint64_t index = 0) {
  const std::uint64_t s = splitmix64(splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(stream))) + index);
  return std::mt19937_64(s);
}

}  // namespace galileo::sim

#endif  // GALILEO_SIM_RNG_HPP
