#include "matprod/rng.hpp"

#include <cmath>
#include <numbers>

namespace matprod {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

}  // namespace

PhiloxCounter philox4x32(PhiloxCounter c, PhiloxKey k) {
  for (int round = 0; round < 10; ++round) {
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kMul0, c[0], hi0, lo0);
    mulhilo(kMul1, c[2], hi1, lo1);
    c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
    k[0] += kWeyl0;
    k[1] += kWeyl1;
  }
  return c;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

PhiloxKey stream_key(std::uint64_t seed, std::uint64_t factor_index, std::uint64_t replica) {
  std::uint64_t h = splitmix64(seed);
  h = splitmix64(h ^ factor_index);
  h = splitmix64(h ^ (replica * 0x632BE59BD9B4E019ull));
  return {static_cast<std::uint32_t>(h), static_cast<std::uint32_t>(h >> 32)};
}

std::pair<double, double> box_muller(std::uint64_t a, std::uint64_t b) {
  const double radius = std::sqrt(-2.0 * std::log(to_unit_open0(a)));
  const double angle = 2.0 * std::numbers::pi * to_unit_open0(b);
  return {radius * std::cos(angle), radius * std::sin(angle)};
}

std::array<std::uint64_t, 2> CounterStream::block() {
  const std::uint64_t idx = next_++;
  const auto out = philox4x32(
      {static_cast<std::uint32_t>(idx), static_cast<std::uint32_t>(idx >> 32), 0x5EED5EEDu, 0u},
      key_);
  return {(static_cast<std::uint64_t>(out[1]) << 32) | out[0],
          (static_cast<std::uint64_t>(out[3]) << 32) | out[2]};
}

double CounterStream::uniform() { return to_unit_open0(block()[0]); }

double CounterStream::normal() {
  const auto b = block();
  return box_muller(b[0], b[1]).first;
}

std::complex<double> CounterStream::uniform_in_disc() {
  const auto b = block();
  const double r = std::sqrt(to_unit_open0(b[0]));
  const double angle = 2.0 * std::numbers::pi * to_unit_open0(b[1]);
  return std::polar(r, angle);
}

}  // namespace matprod
