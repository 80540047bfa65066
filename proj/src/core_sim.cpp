#include "ifm/core_sim.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace ifm {

namespace {

void require_positive_n(int n) {
    if (n < 1) {
        throw std::invalid_argument("number of round trips must be >= 1, got " +
                                    std::to_string(n));
    }
}

void require_transparency(double alpha, const char* name) {
    if (!(alpha >= 0.0 && alpha <= 1.0)) {
        throw std::invalid_argument(std::string(name) + " must lie in [0, 1]");
    }
}

OutcomeProbabilities probabilities_of(const ProbeState& state) {
    return {std::norm(state.r), std::norm(state.s), state.p_loss, {}};
}

}  // namespace

void SampleSpec::validate() const {
    require_transparency(alpha, "transparency");
    if (!std::isfinite(phi) || !std::isfinite(phi_comp)) {
        throw std::invalid_argument("phase shifts must be finite");
    }
}

void SetupSpec::validate() const { require_positive_n(n_roundtrips); }

Matrix2 operator*(const Matrix2& lhs, const Matrix2& rhs) {
    return {lhs.a * rhs.a + lhs.b * rhs.c, lhs.a * rhs.b + lhs.b * rhs.d,
            lhs.c * rhs.a + lhs.d * rhs.c, lhs.c * rhs.b + lhs.d * rhs.d};
}

Matrix2 adjoint(const Matrix2& m) {
    return {std::conj(m.a), std::conj(m.c), std::conj(m.b), std::conj(m.d)};
}

Matrix2 power(Matrix2 m, std::uint64_t exponent) {
    Matrix2 result = Matrix2::identity();
    while (exponent != 0) {
        if (exponent & 1U) result = result * m;
        exponent >>= 1U;
        if (exponent != 0) m = m * m;
    }
    return result;
}

Matrix2 coupling_propagator(double fraction_of_half_period) {
    const Complex phase = std::polar(1.0, -std::numbers::pi * fraction_of_half_period);
    const Complex diag = 0.5 * (1.0 + phase);
    const Complex off = 0.5 * (1.0 - phase);
    return {diag, off, off, diag};
}

Matrix2 encounter_operator(const SampleSpec& sample) {
    return {1.0, 0.0, 0.0, std::polar(std::sqrt(sample.alpha), sample.phi - sample.phi_comp)};
}

ProbeState coherent_step(const ProbeState& state, int n) {
    require_positive_n(n);
    const Matrix2 u = coupling_propagator(1.0 / n);
    return {u.a * state.r + u.b * state.s, u.c * state.r + u.d * state.s, state.p_loss};
}

ProbeState sample_encounter(const ProbeState& state, const SampleSpec& sample) {
    const double s_prob = std::norm(state.s);
    return {state.r,
            std::polar(std::sqrt(sample.alpha), sample.phi - sample.phi_comp) * state.s,
            state.p_loss + (1.0 - sample.alpha) * s_prob};
}

OutcomeProbabilities run_ifm(const SetupSpec& setup, const SampleSpec& sample) {
    setup.validate();
    sample.validate();

    const int n = setup.n_roundtrips;
    const Matrix2 u = coupling_propagator(1.0 / n);
    const Complex attenuation = std::polar(std::sqrt(sample.alpha), sample.phi - sample.phi_comp);

    std::vector<TracePoint> trace;
    if (setup.record_trace) {
        trace.reserve(static_cast<std::size_t>(n) + 1);
        trace.push_back({0, 1.0, 0.0, 0.0});
    }

    ProbeState state;
    for (int step = 1; step <= n; ++step) {
        // coherent_step / sample_encounter inlined: u is loop-invariant.
        const Complex r = u.a * state.r + u.b * state.s;
        const Complex s = u.c * state.r + u.d * state.s;
        state.p_loss += (1.0 - sample.alpha) * std::norm(s);
        state.r = r;
        state.s = attenuation * s;
        if (setup.record_trace) {
            trace.push_back({step, std::norm(state.r), std::norm(state.s), state.p_loss});
        }
    }

    OutcomeProbabilities out = probabilities_of(state);
    out.trace = std::move(trace);
    return out;
}

OutcomeProbabilities final_probabilities(int n, const SampleSpec& sample) {
    require_positive_n(n);
    sample.validate();
    const Matrix2 round_trip = encounter_operator(sample) * coupling_propagator(1.0 / n);
    const Matrix2 total = power(round_trip, static_cast<std::uint64_t>(n));
    // Applied to |R> = (1, 0): first column.
    const double p_r = std::norm(total.a);
    const double p_s = std::norm(total.c);
    return {p_r, p_s, std::max(0.0, 1.0 - p_r - p_s), {}};
}

double opaque_loss_closed_form(int n) {
    require_positive_n(n);
    const double c = std::cos(std::numbers::pi / (2.0 * n));
    return 1.0 - std::pow(c, 2.0 * n);
}

std::vector<OutcomeProbabilities> probability_sweep(int n, std::span<const double> alphas,
                                                    double phi) {
    const SetupSpec setup{n, false};
    std::vector<OutcomeProbabilities> rows;
    rows.reserve(alphas.size());
    for (double alpha : alphas) {
        rows.push_back(run_ifm(setup, SampleSpec{alpha, phi, 0.0}));
    }
    return rows;
}

LossPeak loss_peak(int n) {
    if (n < 2) throw std::invalid_argument("loss_peak requires N >= 2");

    // u = log(1 - alpha); u = 0 is the opaque sample.
    auto loss_at = [n](double u) {
        return final_probabilities(n, SampleSpec{1.0 - std::exp(u), 0.0, 0.0}).p_l;
    };

    constexpr int kGridPoints = 10000;
    const double u_lo = std::log(1e-3 / n);
    const double u_hi = 0.0;
    const double du = (u_hi - u_lo) / (kGridPoints - 1);

    int best = 0;
    double best_loss = -1.0;
    for (int i = 0; i < kGridPoints; ++i) {
        const double loss = loss_at(u_lo + i * du);
        if (loss > best_loss) {
            best_loss = loss;
            best = i;
        }
    }

    double a = u_lo + std::max(best - 1, 0) * du;
    double b = u_lo + std::min(best + 1, kGridPoints - 1) * du;
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = b - inv_phi * (b - a);
    double x2 = a + inv_phi * (b - a);
    double f1 = loss_at(x1);
    double f2 = loss_at(x2);
    for (int iter = 0; iter < 200 && std::abs(std::exp(b) - std::exp(a)) > 1e-10; ++iter) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = loss_at(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = loss_at(x1);
        }
    }
    const double u_peak = 0.5 * (a + b);
    const double refined = loss_at(u_peak);
    if (refined < best_loss) {
        return {1.0 - std::exp(u_lo + best * du), best_loss};
    }
    return {1.0 - std::exp(u_peak), refined};
}

Approximation alpha_prime_approx(int n) {
    require_positive_n(n);
    return {1.0 - 4.4 / n, n >= 5};
}

double n_opt_approx(double alpha1, double alpha2) {
    require_transparency(alpha1, "alpha1");
    require_transparency(alpha2, "alpha2");
    if (alpha1 >= 1.0 || alpha2 >= 1.0) {
        throw std::domain_error("optimal-N estimate is undefined for a transparency of 1");
    }
    return 4.4 / std::sqrt((1.0 - alpha1) * (1.0 - alpha2));
}

double average_loss(int n, double alpha1, double alpha2) {
    return 0.5 * (final_probabilities(n, SampleSpec{alpha1, 0.0, 0.0}).p_l +
                  final_probabilities(n, SampleSpec{alpha2, 0.0, 0.0}).p_l);
}

OptimalN n_opt_numeric(double alpha1, double alpha2, std::optional<int> n_max, int n_min) {
    require_transparency(alpha1, "alpha1");
    require_transparency(alpha2, "alpha2");
    const int limit = n_max ? *n_max : static_cast<int>(std::ceil(10.0 * n_opt_approx(alpha1, alpha2)));
    require_positive_n(limit);
    require_positive_n(n_min);
    if (n_min > limit) throw std::invalid_argument("empty round-trip search range");

    OptimalN best{n_min, average_loss(n_min, alpha1, alpha2), n_min, limit, false};
    for (int n = n_min + 1; n <= limit; ++n) {
        const double loss = average_loss(n, alpha1, alpha2);
        if (loss < best.average_loss) {
            best.n = n;
            best.average_loss = loss;
        }
    }
    best.hit_search_bound = (best.n == limit && limit > n_min) || (best.n == n_min && n_min > 1);
    return best;
}

std::vector<ContrastPoint> contrast_curve(std::span<const double> contrasts, double alpha2_anchor) {
    if (!(alpha2_anchor >= 0.0 && alpha2_anchor < 1.0)) {
        throw std::invalid_argument("contrast anchor must lie in [0, 1)");
    }
    std::vector<ContrastPoint> rows;
    rows.reserve(contrasts.size());
    for (double c : contrasts) {
        if (!(c >= 1.0) || !std::isfinite(c)) {
            throw std::invalid_argument("contrast must be a finite value >= 1");
        }
        double alpha1 = 1.0 - c * (1.0 - alpha2_anchor);
        if (alpha1 < 0.0 && alpha1 > -1e-12) alpha1 = 0.0;  // rounding at the largest contrast
        if (alpha1 < 0.0) {
            throw std::domain_error("contrast " + std::to_string(c) +
                                    " too large for the anchor transparency");
        }
        const auto peak_range = [](double alpha) { return 4.4 / (1.0 - alpha); };
        const int n_min = std::max(1, static_cast<int>(std::floor(peak_range(alpha1))));
        const int n_max = std::max(n_min, static_cast<int>(std::ceil(peak_range(alpha2_anchor))));
        rows.push_back({c, alpha1, alpha2_anchor, n_opt_numeric(alpha1, alpha2_anchor, n_max, n_min)});
    }
    return rows;
}

}  // namespace ifm
