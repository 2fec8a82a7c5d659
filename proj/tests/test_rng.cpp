#include <cmath>
#include <set>

#include "doctest.h"
#include "he/rng.hpp"

using namespace he;

TEST_SUITE("rng") {
  // Known-answer vectors distributed with Random123.
  TEST_CASE("philox4x32-10 known answers") {
    CHECK(philox4x32_10({0, 0, 0, 0}, {0, 0}) == Philox4x32Counter{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
    CHECK(philox4x32_10({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}) ==
          Philox4x32Counter{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
    CHECK(philox4x32_10({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}) ==
          Philox4x32Counter{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
  }

  TEST_CASE("streams are pure functions of their coordinates") {
    RandomStream a(7, Purpose::ExplorerCoins, 3);
    RandomStream b(7, Purpose::ExplorerCoins, 3);
    for (std::uint64_t n : {0u, 1u, 1000u, 5u}) CHECK(a.uniform(n) == b.uniform(n));
    RandomStream c(7, Purpose::Percolation, 3);
    RandomStream d(7, Purpose::ExplorerCoins, 4);
    RandomStream e(8, Purpose::ExplorerCoins, 3);
    CHECK(a.uniform(0) != c.uniform(0));
    CHECK(a.uniform(0) != d.uniform(0));
    CHECK(a.uniform(0) != e.uniform(0));
    const auto pair = a.uniform_pair(4);
    CHECK(pair[0] == a.uniform(8));
    CHECK(pair[1] == a.uniform(9));
  }

  TEST_CASE("uniform moments and range") {
    RandomStream r(1, Purpose::TestData, 0);
    double sum = 0.0, sq = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
      const double u = r.uniform(static_cast<std::uint64_t>(i));
      REQUIRE(u >= 0.0);
      REQUIRE(u < 1.0);
      sum += u;
      sq += u * u;
    }
    const double mean = sum / n;
    CHECK(std::abs(mean - 0.5) < 4.0 * std::sqrt(1.0 / 12.0 / n));
    CHECK(std::abs(sq / n - mean * mean - 1.0 / 12.0) < 2e-3);
  }

  TEST_CASE("normal pairs have unit variance") {
    RandomStream r(2, Purpose::BrownianDriving, 0);
    double s = 0.0, s2 = 0.0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
      const auto z = r.normal_pair(static_cast<std::uint64_t>(i));
      s += z[0] + z[1];
      s2 += z[0] * z[0] + z[1] * z[1];
    }
    CHECK(std::abs(s / (2 * n)) < 4.0 / std::sqrt(2.0 * n));
    CHECK(std::abs(s2 / (2 * n) - 1.0) < 4.0 * std::sqrt(2.0 / (2 * n)));
  }

  TEST_CASE("next_below is in range and covers it") {
    RandomStream r(3, Purpose::TestData, 1);
    std::set<std::uint64_t> seen;
    for (int i = 0; i < 1000; ++i) {
      const auto k = r.next_below(6);
      REQUIRE(k < 6);
      seen.insert(k);
    }
    CHECK(seen.size() == 6);
  }
}
