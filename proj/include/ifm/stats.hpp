#pragma once

// Special functions and the confidence intervals used for transparency
// estimation: Clopper-Pearson for binomial counts, the chi-squared method for
// Poisson counts, and the normal-approximation width.

#include <cstdint>

namespace ifm {

struct Interval {
    double lower = 0.0;
    double upper = 0.0;
    double coverage = 0.95;

    double width() const { return upper - lower; }
    bool contains(double value) const { return lower <= value && value <= upper; }
};

/// I_x(a, b). Throws std::domain_error unless a > 0, b > 0 and x in [0, 1].
double regularized_incomplete_beta(double a, double b, double x);

/// x such that I_x(a, b) = p.
double inverse_regularized_incomplete_beta(double a, double b, double p);

/// Quantile of the chi-squared distribution with `dof` degrees of freedom.
/// p = 0 returns 0; p must be < 1.
double chi_squared_quantile(double p, int dof);

/// Standard normal quantile.
double normal_quantile(double p);

/// Exact central binomial interval. k = 0 gives lower 0 and k = m gives upper 1.
/// Throws std::invalid_argument for m = 0 or k > m.
Interval clopper_pearson(std::uint64_t k, std::uint64_t m, double coverage = 0.95);

/// Central interval on a Poisson mean from an observed count (chi-squared method).
Interval poisson_interval(std::uint64_t k, double coverage = 0.95);

/// Full width 2 z sqrt(p (1 - p) / m) of the normal-approximation interval,
/// z being the (1 + coverage) / 2 quantile. Meaningless (zero) at p = 0 or 1.
double normal_width_binomial(double p, std::uint64_t m, double coverage = 0.95);

}  // namespace ifm
