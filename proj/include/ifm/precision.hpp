#pragma once

// Expected number of lost particles when an unknown transparency is measured
// to a given uncertainty. The measured signal is one detection channel of the
// IFM (or plain transmission); its confidence interval is converted to an
// uncertainty in alpha through the local slope dP/dalpha.

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ifm {

enum class Signal { reference, sample, loss, classical_transmission };
enum class CountStatistics { binomial, poisson };

/// Which observed count the inverted interval width is evaluated at.
enum class CountMode {
    expected,    ///< k = round(P M)
    /// Count with the widest interval over all signal probabilities:
    /// k = round(M / 2) for binomial, k = M for Poisson counts.
    worst_case,
};

std::string_view to_string(Signal signal);
std::string_view to_string(CountStatistics statistics);
std::optional<Signal> parse_signal(std::string_view text);
std::optional<CountStatistics> parse_statistics(std::string_view text);

struct SignalValue {
    double p = 0.0;       ///< signal probability per particle
    double p_loss = 0.0;  ///< loss probability per particle
};

/// Signal and loss probability at alpha. n is ignored for classical transmission.
SignalValue evaluate_signal(double alpha, int n, Signal signal);

struct SignalSlope {
    double value = 0.0;
    bool one_sided = false;
    bool near_zero = false;  ///< |P'| < kNearZeroSlope: uncertainty blows up
    bool unstable = false;   ///< h = 1e-4 and h = 1e-5 differ by more than 1e-3 relative
};

/// Three decades below the unit slope of plain transmission. On the
/// large-N reference plateau the slope falls off like ~18 / N.
inline constexpr double kNearZeroSlope = 1e-3;

/// dP/dalpha by central differences with h = 1e-4 (one-sided within h of 0 or 1),
/// cross-checked against h = 1e-5. Exactly 1 for classical transmission.
SignalSlope signal_derivative(double alpha, int n, Signal signal);

struct LossFlags {
    bool one_sided = false;
    bool near_zero_slope = false;
    bool unstable_derivative = false;
    bool unbounded = false;  ///< no M <= 1e12 reaches the requested width

    bool any() const { return one_sided || near_zero_slope || unstable_derivative || unbounded; }
    /// "|"-joined flag names, empty when none is set.
    std::string describe() const;
};

struct LossBudget {
    double alpha = 0.0;
    double delta_alpha = 0.0;
    double signal = 0.0;
    double slope = 0.0;
    double p_loss = 0.0;
    /// Particles (binomial) or mean particle number (Poisson); +inf when unbounded.
    double m_required = 0.0;
    double expected_lost = 0.0;
    LossFlags flags;
};

inline constexpr double kMaxParticles = 1e12;

/// Normal approximation with binomial counts:
/// P_L P (1 - P) (2 z / (delta_alpha P'))^2. Throws std::domain_error for
/// P in {0, 1} unless nothing can be lost (P_L = 0).
double expected_loss_normal_binomial(double alpha, double delta_alpha, Signal signal, int n,
                                     double coverage = 0.95);

/// Normal approximation with Poisson counts: P_L P (2 z / (delta_alpha P'))^2.
/// Throws std::domain_error for P = 0.
double expected_loss_normal_poisson(double alpha, double delta_alpha, Signal signal, int n,
                                    double coverage = 0.95);

/// Smallest particle number M whose Clopper-Pearson width is at most
/// |P'| delta_alpha, times P_L.
LossBudget expected_loss_clopper_pearson(double alpha, double delta_alpha, Signal signal, int n,
                                         double coverage = 0.95, CountMode mode = CountMode::expected);

/// Smallest mean particle number whose chi-squared Poisson interval, scaled
/// to a rate, is at most |P'| delta_alpha wide, times P_L. Losses are assumed
/// unobservable, so the loss signal is rejected.
LossBudget expected_loss_poisson_chi2(double alpha, double delta_alpha, Signal signal, int n,
                                      double coverage = 0.95, CountMode mode = CountMode::expected);

struct LossCurveSpec {
    Signal signal = Signal::reference;
    int n = 100;
    double delta_alpha = 0.01;
    CountStatistics statistics = CountStatistics::binomial;
    double coverage = 0.95;
    CountMode mode = CountMode::expected;
    unsigned threads = 1;
};

/// One LossBudget per grid point, in grid order.
std::vector<LossBudget> loss_curve(const LossCurveSpec& spec, std::span<const double> alpha_grid);

}  // namespace ifm
