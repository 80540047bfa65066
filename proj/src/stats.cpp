#include "ifm/stats.hpp"

#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/erf.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace ifm {

namespace {

void require_coverage(double coverage) {
    if (!(coverage > 0.0 && coverage < 1.0)) {
        throw std::invalid_argument("coverage must lie in (0, 1)");
    }
}

void require_beta_domain(double a, double b, double x) {
    if (!(a > 0.0) || !(b > 0.0) || !(x >= 0.0 && x <= 1.0)) {
        throw std::domain_error("incomplete beta requires a > 0, b > 0 and argument in [0, 1]");
    }
}

}  // namespace

double regularized_incomplete_beta(double a, double b, double x) {
    require_beta_domain(a, b, x);
    return boost::math::ibeta(a, b, x);
}

double inverse_regularized_incomplete_beta(double a, double b, double p) {
    require_beta_domain(a, b, p);
    return boost::math::ibeta_inv(a, b, p);
}

double chi_squared_quantile(double p, int dof) {
    if (dof < 1) throw std::domain_error("chi-squared quantile requires dof >= 1");
    if (!(p >= 0.0 && p < 1.0)) throw std::domain_error("chi-squared quantile requires p in [0, 1)");
    if (p == 0.0) return 0.0;
    return 2.0 * boost::math::gamma_p_inv(0.5 * dof, p);
}

double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) throw std::domain_error("normal quantile requires p in (0, 1)");
    return std::numbers::sqrt2 * boost::math::erf_inv(2.0 * p - 1.0);
}

Interval clopper_pearson(std::uint64_t k, std::uint64_t m, double coverage) {
    require_coverage(coverage);
    if (m == 0) throw std::invalid_argument("Clopper-Pearson interval needs at least one trial");
    if (k > m) throw std::invalid_argument("Clopper-Pearson interval needs k <= m");

    const double tail = 0.5 * (1.0 - coverage);
    const auto kd = static_cast<double>(k);
    const auto md = static_cast<double>(m);
    const double lower = k == 0 ? 0.0 : boost::math::ibeta_inv(kd, md - kd + 1.0, tail);
    const double upper = k == m ? 1.0 : boost::math::ibeta_inv(kd + 1.0, md - kd, 1.0 - tail);
    return {lower, upper, coverage};
}

Interval poisson_interval(std::uint64_t k, double coverage) {
    require_coverage(coverage);
    const double tail = 0.5 * (1.0 - coverage);
    const auto kd = static_cast<double>(k);
    // chi2(p; 2k) / 2 == gamma_p_inv(k, p); avoids the int dof overflow for large counts.
    const double lower = k == 0 ? 0.0 : boost::math::gamma_p_inv(kd, tail);
    const double upper = boost::math::gamma_p_inv(kd + 1.0, 1.0 - tail);
    return {lower, upper, coverage};
}

double normal_width_binomial(double p, std::uint64_t m, double coverage) {
    require_coverage(coverage);
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("probability must lie in [0, 1]");
    if (m == 0) throw std::invalid_argument("normal width needs at least one trial");
    const double z = normal_quantile(0.5 * (1.0 + coverage));
    return 2.0 * z * std::sqrt(p * (1.0 - p) / static_cast<double>(m));
}

}  // namespace ifm
