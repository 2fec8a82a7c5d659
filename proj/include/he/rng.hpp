#pragma once
// Counter-based random numbers. Every variate is a pure function of
// (master seed, purpose, stream index, counter), so results never depend on
// which worker produced them or in which order.

#include <array>
#include <cstdint>

namespace he {

using Philox4x32Counter = std::array<std::uint32_t, 4>;
using Philox4x32Key = std::array<std::uint32_t, 2>;

// Philox4x32 with 10 rounds (Salmon et al., Random123).
Philox4x32Counter philox4x32_10(Philox4x32Counter ctr, Philox4x32Key key);

// Separates independent uses of the same master seed.
enum class Purpose : std::uint32_t {
  ExplorerCoins = 1,
  Percolation = 2,
  BrownianDriving = 3,
  RandomWalk = 4,
  DomainGeneration = 5,
  TestData = 6,
};

class RandomStream {
 public:
  RandomStream(std::uint64_t master_seed, Purpose purpose, std::uint64_t stream_index);

  // Uniform in [0, 1) with 53 random bits; the n-th draw of the stream.
  double uniform(std::uint64_t n) const;

  // Two independent uniforms from block n (uniform(2n), uniform(2n+1)).
  std::array<double, 2> uniform_pair(std::uint64_t n) const;

  // Standard normal pair by Box-Muller from block n.
  std::array<double, 2> normal_pair(std::uint64_t n) const;

  // Sequential convenience interface.
  double next_uniform() { return uniform(cursor_++); }
  std::uint64_t next_below(std::uint64_t bound);
  std::uint64_t cursor() const { return cursor_; }

 private:
  Philox4x32Key key_{};
  std::uint64_t stream_index_;
  std::uint64_t cursor_ = 0;
};

// SplitMix64 finaliser; used to spread seeds over the Philox key space.
std::uint64_t mix64(std::uint64_t x);

}  // namespace he
