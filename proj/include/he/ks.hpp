#pragma once
// Kolmogorov-Smirnov statistics with asymptotic p-values.

#include <cstddef>
#include <span>

namespace he {

struct KsResult {
  double d = 0.0;
  double p_value = 1.0;
};

// Q_KS(lambda) = 2 sum_{j>=1} (-1)^{j-1} exp(-2 j^2 lambda^2).
double kolmogorov_q(double lambda);

double standard_normal_cdf(double x);

KsResult ks_normal(std::span<const double> xs);
KsResult ks_two_sample(std::span<const double> a, std::span<const double> b);

// Two-sample statistic at which the asymptotic p-value equals `level`.
double ks_two_sample_critical(std::size_t n, std::size_t m, double level);

}  // namespace he
