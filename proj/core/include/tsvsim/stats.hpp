#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace tsvsim::stats {

double normal_cdf(double x, double mean = 0.0, double sd = 1.0);

struct KsResult {
    double statistic = 0.0;  // sup |F_n - F|
    double p_value = 1.0;
};

/// One-sample Kolmogorov-Smirnov test against a continuous CDF. The p-value
/// uses the asymptotic Kolmogorov distribution with Stephens' finite-n
/// correction, accurate to a few percent for n >= 5.
KsResult ks_test(std::span<const double> samples, const std::function<double(double)>& cdf);

/// KS test against Uniform(0, 1).
KsResult ks_uniform(std::span<const double> samples);

/// Survival function of the Kolmogorov distribution, P(K > x).
double kolmogorov_survival(double x);

/// C(n, k) in exact integer arithmetic; throws std::overflow_error beyond 64 bits.
std::uint64_t binomial(unsigned n, unsigned k);

double mean(std::span<const double> xs);
double sample_sd(std::span<const double> xs);

}  // namespace tsvsim::stats
