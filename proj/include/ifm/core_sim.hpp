#pragma once

// Three-state model of a probe particle in a quantum-Zeno-like
// interaction-free measurement (IFM) setup.
//
// The particle starts in the reference state |R>. Each round trip applies one
// coherent coupling step between |R> and |S>, followed by one encounter of the
// |S> component with the sample. Amplitude removed by the sample is booked as
// a real loss probability (the |L> channel is irreversible, so no phase is
// kept for it).

#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace ifm {

using Complex = std::complex<double>;

struct ProbeState {
    Complex r{1.0, 0.0};
    Complex s{0.0, 0.0};
    double p_loss = 0.0;

    double norm() const { return std::norm(r) + std::norm(s) + p_loss; }
};

/// Sample seen by the |S> component once per round trip.
struct SampleSpec {
    double alpha = 1.0;     ///< transparency in [0, 1]
    double phi = 0.0;       ///< phase shift per encounter [rad]
    double phi_comp = 0.0;  ///< inverse phase applied to |S> per round trip [rad]

    /// Throws std::invalid_argument on alpha outside [0, 1] or non-finite phases.
    void validate() const;
};

struct SetupSpec {
    int n_roundtrips = 1;
    bool record_trace = false;

    void validate() const;
};

struct TracePoint {
    int step = 0;  ///< completed round trips; step / N is t / T
    double p_r = 0.0;
    double p_s = 0.0;
    double p_l = 0.0;
};

struct OutcomeProbabilities {
    double p_r = 0.0;
    double p_s = 0.0;
    double p_l = 0.0;
    /// Round trips 0..N when requested, empty otherwise.
    std::vector<TracePoint> trace;
};

/// Row-major 2x2 complex matrix acting on (r, s).
struct Matrix2 {
    Complex a, b;
    Complex c, d;

    static Matrix2 identity() { return {1.0, 0.0, 0.0, 1.0}; }
};

Matrix2 operator*(const Matrix2& lhs, const Matrix2& rhs);
Matrix2 adjoint(const Matrix2& m);
Matrix2 power(Matrix2 m, std::uint64_t exponent);

/// Coherent R<->S propagator over a time interval dt, given as the fraction
/// dt / T of the half oscillation.
Matrix2 coupling_propagator(double fraction_of_half_period);

/// Diagonal per-encounter operator on (r, s); the loss channel is not part of it.
Matrix2 encounter_operator(const SampleSpec& sample);

/// One coupling step of length T / n. The loss probability is untouched.
ProbeState coherent_step(const ProbeState& state, int n);

/// One pass of the |S> component through the sample. r is untouched,
/// s -> exp(i (phi - phi_comp)) sqrt(alpha) s, and (1 - alpha)|s|^2 moves to loss.
ProbeState sample_encounter(const ProbeState& state, const SampleSpec& sample);

/// Reference evolution: N round trips of (coupling step, then sample
/// encounter), starting from |R>. Probabilities are read out at time T.
OutcomeProbabilities run_ifm(const SetupSpec& setup, const SampleSpec& sample);

/// Same final probabilities as run_ifm, obtained from the N-th power of the
/// round-trip matrix in O(log N). Used by the parameter searches.
OutcomeProbabilities final_probabilities(int n, const SampleSpec& sample);

/// Loss probability for an opaque sample: 1 - cos^(2N)(pi / 2N).
double opaque_loss_closed_form(int n);

/// One run_ifm per grid point, in grid order.
std::vector<OutcomeProbabilities> probability_sweep(int n, std::span<const double> alphas,
                                                    double phi = 0.0);

struct LossPeak {
    double alpha = 0.0;
    double p_l_max = 0.0;
};

/// Transparency maximising P_L at fixed N (n >= 2).
///
/// Dense grid of 10^4 points in log(1 - alpha) over [1e-3 / N, 1], then
/// golden-section refinement between the neighbours of the best grid point.
/// The result is resolved to better than 1e-9 in alpha.
LossPeak loss_peak(int n);

/// A closed-form estimate together with whether its argument lies inside the
/// regime where the estimate is meaningful.
struct Approximation {
    double value = 0.0;
    bool valid = true;
};

/// Loss-peak position 1 - 4.4 / N. Valid for N >= 5.
Approximation alpha_prime_approx(int n);

/// 4.4 / sqrt((1 - alpha1)(1 - alpha2)). Throws std::domain_error for alpha == 1.
double n_opt_approx(double alpha1, double alpha2);

/// (P_L(alpha1; N) + P_L(alpha2; N)) / 2.
double average_loss(int n, double alpha1, double alpha2);

struct OptimalN {
    int n = 1;
    double average_loss = 0.0;
    int n_min = 1;
    int n_max = 1;
    /// The minimiser sits on a restricting end of the range, so the true
    /// optimum may lie outside it.
    bool hit_search_bound = false;
};

/// Exhaustive integer scan of N in [n_min, n_max] minimising the average loss;
/// ties go to the smaller N. n_max defaults to ceil(10 * n_opt_approx).
OptimalN n_opt_numeric(double alpha1, double alpha2, std::optional<int> n_max = std::nullopt,
                       int n_min = 1);

struct ContrastPoint {
    double contrast = 1.0;
    double alpha1 = 0.0;
    double alpha2 = 0.0;
    OptimalN optimum;
};

inline constexpr double kDefaultContrastAnchor = 1.0 - 1e-4;

/// For each contrast c: alpha2 = anchor, alpha1 = 1 - c (1 - alpha2), and the
/// smallest average loss over N in [floor(4.4 / (1 - alpha1)), ceil(4.4 / (1 - alpha2))],
/// the range in which the loss peak sits between the two transparencies.
/// Below it N = 1 degenerates to a single transmission pass, which would
/// otherwise win for transparencies close to 1.
std::vector<ContrastPoint> contrast_curve(std::span<const double> contrasts,
                                          double alpha2_anchor = kDefaultContrastAnchor);

}  // namespace ifm
