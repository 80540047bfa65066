#include "ifm/discrimination.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <thread>

namespace ifm {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

using Counts = std::array<std::uint64_t, 3>;
using Probs = std::array<double, 3>;

constexpr std::size_t kLostIndex = 2;

double log_likelihood(const Counts& counts, const Probs& probs) {
    double total = 0.0;
    for (std::size_t o = 0; o < 3; ++o) {
        if (counts[o] == 0) continue;
        if (probs[o] <= 0.0) return kNegInf;
        total += static_cast<double>(counts[o]) * std::log(probs[o]);
    }
    return total;
}

// Outcome probabilities under each hypothesis. Classical runs are mapped to
// (transmitted, -, lost) so both strategies share one likelihood.
struct OutcomeModel {
    bool classical = true;
    std::array<Probs, 2> probs{};

    explicit OutcomeModel(const StrategySpec& strategy) : classical(strategy.kind == StrategyKind::classical) {
        const std::array<double, 2> alphas{strategy.alpha1, strategy.alpha2};
        for (std::size_t h = 0; h < 2; ++h) {
            if (classical) {
                probs[h] = {alphas[h], 0.0, 1.0 - alphas[h]};
            } else {
                const auto p = run_ifm(SetupSpec{strategy.n_roundtrips, false},
                                       SampleSpec{alphas[h], strategy.phi, 0.0});
                probs[h] = {p.p_r, p.p_s, p.p_l};
            }
        }
    }

    std::size_t draw(RandomStream& stream, Hypothesis truth) const {
        const Probs& p = probs[truth == Hypothesis::alpha1 ? 0 : 1];
        if (classical) return sample_bernoulli(stream, p[0]) ? 0 : kLostIndex;
        return static_cast<std::size_t>(sample_categorical3(stream, p));
    }

    double posterior(const Counts& counts) const {
        return posterior_from_log_likelihoods(log_likelihood(counts, probs[0]),
                                              log_likelihood(counts, probs[1]));
    }
};

Hypothesis more_likely(double posterior1) {
    return posterior1 >= 0.5 ? Hypothesis::alpha1 : Hypothesis::alpha2;
}

void require_threshold(double x) {
    if (!(x > 0.0 && x < 0.5)) throw std::invalid_argument("threshold x must lie in (0, 0.5)");
}

// Runs particles until every threshold in `descending` has stopped (or the
// cap is hit), calling on_stop(index, run) once per threshold in order.
template <typename OnStop>
void walk(const OutcomeModel& model, Hypothesis truth, std::span<const double> descending,
          RandomStream& stream, std::uint64_t cap, OnStop&& on_stop) {
    SequentialRun run;
    std::size_t next = 0;
    double posterior = 0.5;
    while (next < descending.size()) {
        if (run.particles_used >= cap) {
            run.capped = true;
            run.decision = more_likely(posterior);
            for (; next < descending.size(); ++next) on_stop(next, run);
            return;
        }
        const std::size_t outcome = model.draw(stream, truth);
        ++run.counts[outcome];
        ++run.particles_used;
        if (outcome == kLostIndex) ++run.particles_lost;

        posterior = model.posterior(run.counts);
        const double smaller = std::min(posterior, 1.0 - posterior);
        run.decision = more_likely(posterior);
        while (next < descending.size() && smaller < descending[next]) {
            on_stop(next, run);
            ++next;
        }
    }
}

struct Accumulator {
    std::uint64_t errors = 0;
    std::uint64_t lost = 0;
    std::uint64_t used = 0;
    std::uint64_t capped = 0;
    // Sum of squared per-run losses; exact while the total stays below 2^64.
    std::uint64_t lost_sq = 0;

    Accumulator& operator+=(const Accumulator& other) {
        errors += other.errors;
        lost += other.lost;
        used += other.used;
        capped += other.capped;
        lost_sq += other.lost_sq;
        return *this;
    }
};

}  // namespace

std::string_view to_string(StrategyKind kind) {
    return kind == StrategyKind::classical ? "classical" : "ifm";
}

void StrategySpec::validate() const {
    if (!(alpha1 >= 0.0 && alpha1 < alpha2 && alpha2 <= 1.0)) {
        throw std::invalid_argument("transparencies must satisfy 0 <= alpha1 < alpha2 <= 1");
    }
    if (kind == StrategyKind::ifm && n_roundtrips < 1) {
        throw std::invalid_argument("IFM strategy needs N >= 1");
    }
    if (!std::isfinite(phi)) throw std::invalid_argument("phase must be finite");
}

double posterior_from_log_likelihoods(double log_l1, double log_l2) {
    if (log_l1 == kNegInf && log_l2 == kNegInf) {
        throw std::domain_error("observed counts are impossible under both transparencies");
    }
    if (log_l1 == kNegInf) return 0.0;
    if (log_l2 == kNegInf) return 1.0;
    return 1.0 / (1.0 + std::exp(log_l2 - log_l1));
}

double posterior_classical(std::uint64_t n_pass, std::uint64_t n_total, double alpha1, double alpha2) {
    if (n_pass > n_total) throw std::invalid_argument("transmitted count exceeds total runs");
    const Counts counts{n_pass, 0, n_total - n_pass};
    return posterior_from_log_likelihoods(log_likelihood(counts, {alpha1, 0.0, 1.0 - alpha1}),
                                          log_likelihood(counts, {alpha2, 0.0, 1.0 - alpha2}));
}

double posterior_ifm(std::uint64_t n_r, std::uint64_t n_s, std::uint64_t n_l,
                     const OutcomeProbabilities& probs1, const OutcomeProbabilities& probs2) {
    const Counts counts{n_r, n_s, n_l};
    return posterior_from_log_likelihoods(log_likelihood(counts, {probs1.p_r, probs1.p_s, probs1.p_l}),
                                          log_likelihood(counts, {probs2.p_r, probs2.p_s, probs2.p_l}));
}

SequentialRun run_sequential(const StrategySpec& strategy, Hypothesis truth, double threshold_x,
                             RandomStream& stream, std::uint64_t cap) {
    strategy.validate();
    require_threshold(threshold_x);
    if (cap < 1) throw std::invalid_argument("particle cap must be >= 1");

    const OutcomeModel model(strategy);
    const std::array<double, 1> threshold{threshold_x};
    SequentialRun result;
    walk(model, truth, threshold, stream, cap, [&](std::size_t, const SequentialRun& run) { result = run; });
    return result;
}

std::vector<DiscriminationPoint> monte_carlo_curve(const StrategySpec& strategy,
                                                   std::span<const double> thresholds,
                                                   std::uint64_t replications, std::uint64_t seed,
                                                   const MonteCarloOptions& options) {
    strategy.validate();
    if (replications < 1) throw std::invalid_argument("replications must be >= 1");
    if (options.cap < 1) throw std::invalid_argument("particle cap must be >= 1");
    for (double x : thresholds) require_threshold(x);

    // Walk thresholds from largest to smallest; stable so equal x keep input order.
    std::vector<std::size_t> order(thresholds.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return thresholds[a] > thresholds[b]; });
    std::vector<double> descending(order.size());
    for (std::size_t i = 0; i < order.size(); ++i) descending[i] = thresholds[order[i]];

    const OutcomeModel model(strategy);

    unsigned workers = options.threads != 0 ? options.threads : std::thread::hardware_concurrency();
    workers = static_cast<unsigned>(std::clamp<std::uint64_t>(workers, 1, replications));

    std::vector<std::vector<Accumulator>> partial(workers, std::vector<Accumulator>(descending.size()));
    auto work = [&](unsigned w) {
        const std::uint64_t begin = replications * w / workers;
        const std::uint64_t end = replications * (w + 1) / workers;
        auto& acc = partial[w];
        for (std::uint64_t rep = begin; rep < end; ++rep) {
            RandomStream stream(RngSeed{seed, rep});
            const double u = stream.uniform();
            const Hypothesis truth = options.stratified ? (rep % 2 == 0 ? Hypothesis::alpha1 : Hypothesis::alpha2)
                                                        : (u < 0.5 ? Hypothesis::alpha1 : Hypothesis::alpha2);
            walk(model, truth, descending, stream, options.cap, [&](std::size_t idx, const SequentialRun& run) {
                Accumulator& a = acc[idx];
                a.errors += run.decision != truth ? 1 : 0;
                a.lost += run.particles_lost;
                a.used += run.particles_used;
                a.capped += run.capped ? 1 : 0;
                a.lost_sq += run.particles_lost * run.particles_lost;
            });
        }
    };

    if (workers == 1) {
        work(0);
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work, w);
    }

    std::vector<Accumulator> totals(descending.size());
    for (const auto& part : partial) {
        for (std::size_t i = 0; i < totals.size(); ++i) totals[i] += part[i];
    }

    // Back to input order, dropping repeats of an earlier point.
    std::vector<std::size_t> position(order.size());
    for (std::size_t i = 0; i < order.size(); ++i) position[order[i]] = i;

    const auto reps = static_cast<double>(replications);
    std::vector<DiscriminationPoint> points;
    std::vector<const Accumulator*> seen;
    for (std::size_t input = 0; input < thresholds.size(); ++input) {
        const Accumulator& t = totals[position[input]];
        const bool duplicate = std::any_of(seen.begin(), seen.end(), [&](const Accumulator* s) {
            return s->errors == t.errors && s->lost == t.lost && s->used == t.used;
        });
        if (duplicate) continue;
        seen.push_back(&t);

        DiscriminationPoint p;
        p.threshold_x = thresholds[input];
        p.replications = replications;
        p.errors = t.errors;
        p.capped_runs = t.capped;
        p.error_probability = static_cast<double>(t.errors) / reps;
        p.mean_lost = static_cast<double>(t.lost) / reps;
        p.mean_used = static_cast<double>(t.used) / reps;
        p.error_std_error = std::sqrt(p.error_probability * (1.0 - p.error_probability) / reps);
        if (replications > 1) {
            const double second_moment = static_cast<double>(t.lost_sq) / reps;
            const double variance = std::max(0.0, second_moment - p.mean_lost * p.mean_lost) * reps / (reps - 1.0);
            p.lost_std_error = std::sqrt(variance / reps);
        }
        points.push_back(p);
    }
    return points;
}

std::vector<double> default_thresholds(std::size_t count) {
    if (count < 2) throw std::invalid_argument("threshold grid needs at least two points");
    const double hi = std::log(0.49);
    const double lo = std::log(1e-12);
    std::vector<double> grid(count);
    for (std::size_t i = 0; i < count; ++i) {
        grid[i] = std::exp(hi + (lo - hi) * static_cast<double>(i) / static_cast<double>(count - 1));
    }
    return grid;
}

double min_loss_bound(double alpha1, double alpha2, double p_e) {
    if (!(alpha1 >= 0.0 && alpha1 <= 1.0) || !(alpha2 >= 0.0 && alpha2 <= 1.0)) {
        throw std::invalid_argument("transparencies must lie in [0, 1]");
    }
    if (!(p_e >= 0.0 && p_e <= 0.5)) throw std::invalid_argument("error probability must lie in [0, 0.5]");
    if (alpha1 == alpha2) return std::numeric_limits<double>::infinity();

    // With sqrt(alpha) = cos(theta) and sqrt(1 - alpha) = sin(theta) the
    // denominator 1 - sqrt(a1 a2) - sqrt((1-a1)(1-a2)) is 1 - cos(theta1 - theta2).
    const double theta1 = std::asin(std::sqrt(1.0 - alpha1));
    const double theta2 = std::asin(std::sqrt(1.0 - alpha2));
    const double half = std::sin(0.5 * (theta1 - theta2));
    const double denominator = 2.0 * half * half;
    const double numerator = std::sqrt(1.0 - alpha1) * std::sqrt(1.0 - alpha2) *
                             (1.0 - 2.0 * std::sqrt(p_e * (1.0 - p_e)));
    return numerator / denominator;
}

}  // namespace ifm
