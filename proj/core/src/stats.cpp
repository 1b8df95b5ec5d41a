#include "tsvsim/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace tsvsim::stats {

double normal_cdf(double x, double mean, double sd) {
    return 0.5 * std::erfc(-(x - mean) / (sd * std::sqrt(2.0)));
}

double kolmogorov_survival(double x) {
    if (x <= 0.0) {
        return 1.0;
    }
    if (x < 0.2) {
        return 1.0;  // series below does not converge usefully; true value > 0.9999
    }
    // 2 sum_{k>=1} (-1)^{k-1} exp(-2 k^2 x^2)
    double sum = 0.0;
    double sign = 1.0;
    for (int k = 1; k <= 100; ++k) {
        double term = std::exp(-2.0 * k * k * x * x);
        sum += sign * term;
        if (term < 1e-16) {
            break;
        }
        sign = -sign;
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}

KsResult ks_test(std::span<const double> samples, const std::function<double(double)>& cdf) {
    if (samples.empty()) {
        throw std::invalid_argument("ks_test: no samples");
    }
    std::vector<double> sorted(samples.begin(), samples.end());
    std::sort(sorted.begin(), sorted.end());
    const double n = static_cast<double>(sorted.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        double f = cdf(sorted[i]);
        d = std::max({d, (static_cast<double>(i) + 1.0) / n - f, f - static_cast<double>(i) / n});
    }
    double sqrt_n = std::sqrt(n);
    double p = kolmogorov_survival((sqrt_n + 0.12 + 0.11 / sqrt_n) * d);
    return KsResult{d, p};
}

KsResult ks_uniform(std::span<const double> samples) {
    return ks_test(samples, [](double x) { return std::clamp(x, 0.0, 1.0); });
}

std::uint64_t binomial(unsigned n, unsigned k) {
    if (k > n) {
        return 0;
    }
    k = std::min(k, n - k);
    std::uint64_t result = 1;
    for (unsigned i = 1; i <= k; ++i) {
        // result * (n - k + i) / i stays integral at every step.
        std::uint64_t num = n - k + i;
        std::uint64_t g = std::gcd(result, static_cast<std::uint64_t>(i));
        std::uint64_t r = result / g;
        std::uint64_t d = i / g;
        // d divides num after removing the common factor with result.
        if (num % d != 0) {
            throw std::logic_error("binomial: internal divisibility failure");
        }
        num /= d;
        if (r != 0 && num > UINT64_MAX / r) {
            throw std::overflow_error("binomial: result exceeds 64 bits");
        }
        result = r * num;
    }
    return result;
}

double mean(std::span<const double> xs) {
    if (xs.empty()) {
        throw std::invalid_argument("mean: empty input");
    }
    return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

double sample_sd(std::span<const double> xs) {
    if (xs.size() < 2) {
        throw std::invalid_argument("sample_sd: need at least two values");
    }
    double m = mean(xs);
    double ss = 0.0;
    for (double x : xs) {
        ss += (x - m) * (x - m);
    }
    return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

}  // namespace tsvsim::stats
