#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <utility>

namespace matprod {

/// Philox4x32-10 block function (Salmon et al., Random123). Maps a 128-bit
/// counter and a 64-bit key to 128 pseudo-random bits.
using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

PhiloxCounter philox4x32(PhiloxCounter counter, PhiloxKey key);

std::uint64_t splitmix64(std::uint64_t x);

/// Stream key for a (seed, factor, replica) triple.
PhiloxKey stream_key(std::uint64_t seed, std::uint64_t factor_index, std::uint64_t replica);

/// Uniform double in (0, 1] built from the top 53 bits of `bits`.
inline double to_unit_open0(std::uint64_t bits) {
  return (static_cast<double>(bits >> 11) + 1.0) * 0x1.0p-53;
}

/// Pair of independent standard normals from two uniform words (Box-Muller).
std::pair<double, double> box_muller(std::uint64_t a, std::uint64_t b);

// Sequential view of a counter-based stream. Each call to `block()` consumes
// one counter value; nothing is cached between calls so copies are cheap and
// independent.
class CounterStream {
 public:
  CounterStream(PhiloxKey key, std::uint64_t start = 0) : key_(key), next_(start) {}

  std::array<std::uint64_t, 2> block();
  double uniform();  // in (0, 1]
  double normal();
  std::complex<double> uniform_in_disc();

  std::uint64_t position() const { return next_; }

 private:
  PhiloxKey key_;
  std::uint64_t next_;
};

}  // namespace matprod
