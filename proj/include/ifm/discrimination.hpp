#pragma once

// Sequential Bayesian discrimination between two known transparencies.
//
// A measurement sends single particles one after another and updates the
// posterior of alpha1 after each run (equal priors). It stops as soon as the
// smaller of the two posteriors drops below a threshold x and reports the more
// likely hypothesis. Sweeping x trades error probability against the mean
// number of lost particles.

#include "ifm/core_sim.hpp"
#include "ifm/sampling.hpp"

#include <array>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace ifm {

enum class StrategyKind { classical, ifm };

std::string_view to_string(StrategyKind kind);

struct StrategySpec {
    StrategyKind kind = StrategyKind::classical;
    int n_roundtrips = 1;  ///< ignored for classical transmission
    double alpha1 = 0.0;
    double alpha2 = 1.0;
    double phi = 0.0;

    /// Requires 0 <= alpha1 < alpha2 <= 1 and N >= 1 for IFM.
    void validate() const;
};

enum class Hypothesis { alpha1, alpha2 };

struct SequentialRun {
    Hypothesis decision = Hypothesis::alpha1;
    std::uint64_t particles_used = 0;
    std::uint64_t particles_lost = 0;
    /// IFM: (n_r, n_s, n_l). Classical: (transmitted, 0, lost).
    std::array<std::uint64_t, 3> counts{};
    /// The particle cap was reached before the threshold was crossed.
    bool capped = false;
};

struct DiscriminationPoint {
    double threshold_x = 0.0;
    double error_probability = 0.0;
    double mean_lost = 0.0;
    double mean_used = 0.0;
    std::uint64_t replications = 0;
    std::uint64_t capped_runs = 0;
    std::uint64_t errors = 0;
    double error_std_error = 0.0;
    double lost_std_error = 0.0;
};

inline constexpr std::uint64_t kDefaultParticleCap = 1'000'000;
inline constexpr std::uint64_t kDefaultReplications = 40'000;

/// Posterior of alpha1 from two log-likelihoods; -inf marks impossible data.
/// Throws std::domain_error when both are -inf.
double posterior_from_log_likelihoods(double log_l1, double log_l2);

/// Posterior of alpha1 after n_total classical runs with n_pass transmitted.
double posterior_classical(std::uint64_t n_pass, std::uint64_t n_total, double alpha1, double alpha2);

/// Posterior of alpha1 after IFM runs with the given detection counts.
double posterior_ifm(std::uint64_t n_r, std::uint64_t n_s, std::uint64_t n_l,
                     const OutcomeProbabilities& probs1, const OutcomeProbabilities& probs2);

/// One sequential measurement with the given true transparency. x must lie in (0, 0.5).
SequentialRun run_sequential(const StrategySpec& strategy, Hypothesis truth, double threshold_x,
                             RandomStream& stream, std::uint64_t cap = kDefaultParticleCap);

struct MonteCarloOptions {
    std::uint64_t cap = kDefaultParticleCap;
    unsigned threads = 0;  ///< 0 = hardware concurrency
    bool stratified = false;  ///< alternate the true hypothesis instead of drawing it
};

/// Error probability and mean loss per threshold.
///
/// Replication i uses stream (seed, i) for every threshold: its true
/// hypothesis is the first draw, followed by the particle outcomes. Thresholds
/// therefore share random numbers, and a single pass per replication serves
/// all of them. Points whose (error, loss, used) totals repeat an earlier
/// threshold's are dropped.
std::vector<DiscriminationPoint> monte_carlo_curve(const StrategySpec& strategy,
                                                   std::span<const double> thresholds,
                                                   std::uint64_t replications, std::uint64_t seed,
                                                   const MonteCarloOptions& options = {});

/// Log-spaced thresholds from 0.49 down to 1e-12.
std::vector<double> default_thresholds(std::size_t count = 60);

/// Minimum mean number of lost particles of any quantum measurement that
/// tells alpha1 from alpha2 (equal priors) with error at most p_e. Returns
/// +infinity when alpha1 == alpha2.
double min_loss_bound(double alpha1, double alpha2, double p_e);

}  // namespace ifm
