#pragma once

// Test-only reference computations that share no code with the library.

#include <cmath>
#include <cstdint>
#include <utility>

namespace ifm::oracle {

/// P(X <= k) for X ~ Binomial(m, p), summed term by term in long double.
inline long double binomial_cdf(std::uint64_t k, std::uint64_t m, long double p) {
    if (p <= 0.0L) return 1.0L;
    if (p >= 1.0L) return k >= m ? 1.0L : 0.0L;
    const long double lp = std::log(p);
    const long double lq = std::log1p(-p);
    const long double lm = std::lgamma(static_cast<long double>(m) + 1.0L);
    long double sum = 0.0L;
    for (std::uint64_t j = 0; j <= k; ++j) {
        const auto jd = static_cast<long double>(j);
        const auto rest = static_cast<long double>(m - j);
        sum += std::exp(lm - std::lgamma(jd + 1.0L) - std::lgamma(rest + 1.0L) + jd * lp + rest * lq);
    }
    return sum;
}

/// Clopper-Pearson bounds by bisection on the binomial tails:
/// lower solves P(X >= k; p) = tail, upper solves P(X <= k; p) = tail.
inline std::pair<double, double> clopper_pearson_by_tails(std::uint64_t k, std::uint64_t m,
                                                          double coverage) {
    const long double tail = 0.5L * (1.0L - coverage);
    auto bisect = [](auto&& increasing_fn, long double target) {
        long double lo = 0.0L;
        long double hi = 1.0L;
        for (int i = 0; i < 80; ++i) {
            const long double mid = 0.5L * (lo + hi);
            if (increasing_fn(mid) < target) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        return static_cast<double>(0.5L * (lo + hi));
    };
    const double lower = k == 0 ? 0.0 : bisect([&](long double p) { return 1.0L - binomial_cdf(k - 1, m, p); }, tail);
    const double upper = k == m ? 1.0 : bisect([&](long double p) { return -binomial_cdf(k, m, p); }, -tail);
    return {lower, upper};
}

}  // namespace ifm::oracle
