#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "doctest.h"
#include "he/ks.hpp"
#include "he/lattice.hpp"

using namespace he;

namespace {

// Dual theta-series form of the Kolmogorov tail, convergent for small lambda.
double q_dual(double lambda) {
  double s = 0.0;
  for (int k = 1; k <= 50; ++k) {
    const double m = 2.0 * k - 1.0;
    s += std::exp(-m * m * std::numbers::pi * std::numbers::pi / (8.0 * lambda * lambda));
  }
  return 1.0 - std::sqrt(2.0 * std::numbers::pi) / lambda * s;
}

double ecdf(const std::vector<double>& xs, double x) {
  return static_cast<double>(std::count_if(xs.begin(), xs.end(), [&](double v) { return v <= x; })) /
         static_cast<double>(xs.size());
}

}  // namespace

TEST_SUITE("ks") {
  TEST_CASE("Kolmogorov tail") {
    CHECK(kolmogorov_q(1.0) == doctest::Approx(0.26999967).epsilon(1e-7));
    for (double l : {0.3, 0.6, 0.9, 1.36, 1.63, 2.5}) {
      CAPTURE(l);
      CHECK(std::abs(kolmogorov_q(l) - q_dual(l)) < 1e-12);
    }
    CHECK(kolmogorov_q(0.0) == 1.0);
    CHECK(kolmogorov_q(10.0) < 1e-80);
  }

  TEST_CASE("normal cdf") {
    CHECK(standard_normal_cdf(0.0) == doctest::Approx(0.5));
    CHECK(standard_normal_cdf(1.96) == doctest::Approx(0.9750021).epsilon(1e-7));
  }

  TEST_CASE("one-sample statistic equals the brute-force supremum") {
    std::mt19937_64 rng(4);
    std::normal_distribution<double> g;
    std::vector<double> xs(300);
    for (auto& x : xs) x = g(rng);
    double d = 0.0;
    for (double x : xs) {
      const double f = standard_normal_cdf(x);
      d = std::max({d, std::abs(ecdf(xs, x) - f), std::abs(ecdf(xs, std::nextafter(x, -INFINITY)) - f)});
    }
    const auto r = ks_normal(xs);
    CHECK(r.d == doctest::Approx(d).epsilon(1e-12));
    CHECK(r.p_value > 0.01);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (auto& x : xs) x = u(rng);
    CHECK(ks_normal(xs).p_value < 0.01);
  }

  TEST_CASE("two-sample statistic equals the brute-force supremum") {
    std::mt19937_64 rng(6);
    std::normal_distribution<double> g;
    std::vector<double> a(200), b(150);
    for (auto& x : a) x = g(rng);
    for (auto& x : b) x = std::round(g(rng) * 4) / 4;  // ties
    a[3] = b[7];
    double d = 0.0;
    for (const auto* xs : {&a, &b}) {
      for (double x : *xs) d = std::max(d, std::abs(ecdf(a, x) - ecdf(b, x)));
    }
    const auto r = ks_two_sample(a, b);
    CHECK(r.d == doctest::Approx(d).epsilon(1e-12));
    CHECK(ks_two_sample(a, a).d == 0.0);
    std::vector<double> shifted = a;
    for (auto& x : shifted) x += 1.0;
    CHECK(ks_two_sample(a, shifted).p_value < 1e-6);
  }

  TEST_CASE("critical value inverts the p-value") {
    for (auto [n, m] : {std::pair<std::size_t, std::size_t>{500, 500}, {100, 2000}}) {
      const double c = ks_two_sample_critical(n, m, 0.01);
      const double ne = static_cast<double>(n * m) / static_cast<double>(n + m);
      const double s = std::sqrt(ne);
      CHECK(kolmogorov_q((s + 0.12 + 0.11 / s) * c) == doctest::Approx(0.01).epsilon(1e-6));
      // large-sample value 1.628 / sqrt(n_eff)
      CHECK(c * s == doctest::Approx(1.628).epsilon(0.02));
    }
  }

  TEST_CASE("errors") {
    CHECK_THROWS_AS(ks_normal(std::vector<double>{}), Error);
    CHECK_THROWS_AS(ks_two_sample(std::vector<double>{1.0}, std::vector<double>{}), Error);
  }
}
