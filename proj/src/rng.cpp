#include "he/rng.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace he {
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

inline double to_unit(std::uint32_t hi, std::uint32_t lo) {
  const std::uint64_t bits = (static_cast<std::uint64_t>(hi) << 32) | lo;
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

}  // namespace

Philox4x32Counter philox4x32_10(Philox4x32Counter ctr, Philox4x32Key key) {
  for (int round = 0; round < 10; ++round) {
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kMul0, ctr[0], hi0, lo0);
    mulhilo(kMul1, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kWeyl0;
    key[1] += kWeyl1;
  }
  return ctr;
}

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

RandomStream::RandomStream(std::uint64_t master_seed, Purpose purpose, std::uint64_t stream_index)
    : stream_index_(stream_index) {
  const std::uint64_t k = mix64(master_seed ^ mix64(static_cast<std::uint64_t>(purpose)));
  key_ = {static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(k >> 32)};
}

std::array<double, 2> RandomStream::uniform_pair(std::uint64_t n) const {
  const Philox4x32Counter ctr{static_cast<std::uint32_t>(n), static_cast<std::uint32_t>(n >> 32),
                              static_cast<std::uint32_t>(stream_index_),
                              static_cast<std::uint32_t>(stream_index_ >> 32)};
  const auto out = philox4x32_10(ctr, key_);
  return {to_unit(out[0], out[1]), to_unit(out[2], out[3])};
}

double RandomStream::uniform(std::uint64_t n) const { return uniform_pair(n / 2)[n % 2]; }

std::array<double, 2> RandomStream::normal_pair(std::uint64_t n) const {
  const auto u = uniform_pair(n);
  const double radius = std::sqrt(-2.0 * std::log1p(-u[0]));  // 1 - u in (0, 1]
  const double angle = 2.0 * std::numbers::pi * u[1];
  return {radius * std::cos(angle), radius * std::sin(angle)};
}

std::uint64_t RandomStream::next_below(std::uint64_t bound) {
  if (bound == 0) throw std::invalid_argument("next_below: bound must be positive");
  // Rejection keeps the result exactly uniform.
  const std::uint64_t limit = (1ull << 53) - ((1ull << 53) % bound);
  for (;;) {
    const auto bits = static_cast<std::uint64_t>(next_uniform() * 0x1.0p53);
    if (bits < limit) return bits % bound;
  }
}

}  // namespace he
