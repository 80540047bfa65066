#include "ifm/precision.hpp"

#include "ifm/core_sim.hpp"
#include "ifm/stats.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <functional>
#include <limits>
#include <stdexcept>
#include <thread>

namespace ifm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kStep = 1e-4;
constexpr double kFineStep = 1e-5;

void require_alpha(double alpha) {
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw std::invalid_argument("transparency must lie in [0, 1]");
}

void require_delta(double delta_alpha) {
    if (!(delta_alpha > 0.0) || !std::isfinite(delta_alpha)) {
        throw std::invalid_argument("uncertainty in alpha must be positive");
    }
}

struct Difference {
    double value;
    bool one_sided;
};

Difference finite_difference(double alpha, int n, Signal signal, double h) {
    auto p = [&](double a) { return evaluate_signal(a, n, signal).p; };
    if (alpha - h < 0.0) return {(p(alpha + h) - p(alpha)) / h, true};
    if (alpha + h > 1.0) return {(p(alpha) - p(alpha - h)) / h, true};
    return {(p(alpha + h) - p(alpha - h)) / (2.0 * h), false};
}

using WidthFn = std::function<double(std::uint64_t)>;

// Smallest M in [1, kMaxParticles] with width(M) <= target, or nullopt.
std::optional<std::uint64_t> invert_width(const WidthFn& width, double target) {
    if (!(target > 0.0)) return std::nullopt;
    const auto limit = static_cast<std::uint64_t>(kMaxParticles);
    std::uint64_t hi = 1;
    while (width(hi) > target) {
        if (hi >= limit) return std::nullopt;
        hi = std::min(hi * 2, limit);
    }
    std::uint64_t lo = hi / 2;  // width(lo) > target, or lo == 0
    while (hi - lo > 1) {
        const std::uint64_t mid = lo + (hi - lo) / 2;
        if (width(mid) <= target) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    // Widths are monotone only up to the rounding of k; step down while M - 1 still fits.
    for (int i = 0; i < 64 && hi > 1 && width(hi - 1) <= target; ++i) --hi;
    return hi;
}

std::uint64_t count_at(double p, std::uint64_t m) {
    return static_cast<std::uint64_t>(std::llround(p * static_cast<double>(m)));
}

LossBudget budget_skeleton(double alpha, double delta_alpha, Signal signal, int n) {
    require_alpha(alpha);
    require_delta(delta_alpha);
    const SignalValue value = evaluate_signal(alpha, n, signal);
    const SignalSlope slope = signal_derivative(alpha, n, signal);

    LossBudget budget;
    budget.alpha = alpha;
    budget.delta_alpha = delta_alpha;
    budget.signal = value.p;
    budget.p_loss = value.p_loss;
    budget.slope = slope.value;
    budget.flags.one_sided = slope.one_sided;
    budget.flags.near_zero_slope = slope.near_zero;
    budget.flags.unstable_derivative = slope.unstable;
    return budget;
}

LossBudget finish(LossBudget budget, const WidthFn& width) {
    const auto m = invert_width(width, std::abs(budget.slope) * budget.delta_alpha);
    if (!m) {
        budget.flags.unbounded = true;
        budget.m_required = kInf;
        budget.expected_lost = kInf;
        return budget;
    }
    budget.m_required = static_cast<double>(*m);
    budget.expected_lost = budget.m_required * budget.p_loss;
    return budget;
}

double normal_factor(double delta_alpha, double slope, double coverage) {
    const double z = normal_quantile(0.5 * (1.0 + coverage));
    const double f = 2.0 * z / (delta_alpha * slope);
    return f * f;
}

}  // namespace

std::string_view to_string(Signal signal) {
    switch (signal) {
        case Signal::reference: return "reference";
        case Signal::sample: return "sample";
        case Signal::loss: return "loss";
        case Signal::classical_transmission: return "classical";
    }
    return "unknown";
}

std::string_view to_string(CountStatistics statistics) {
    return statistics == CountStatistics::binomial ? "binomial" : "poisson";
}

std::optional<Signal> parse_signal(std::string_view text) {
    if (text == "reference") return Signal::reference;
    if (text == "sample") return Signal::sample;
    if (text == "loss") return Signal::loss;
    if (text == "classical") return Signal::classical_transmission;
    return std::nullopt;
}

std::optional<CountStatistics> parse_statistics(std::string_view text) {
    if (text == "binomial") return CountStatistics::binomial;
    if (text == "poisson") return CountStatistics::poisson;
    return std::nullopt;
}

std::string LossFlags::describe() const {
    std::string out;
    auto add = [&out](bool set, const char* name) {
        if (!set) return;
        if (!out.empty()) out += '|';
        out += name;
    };
    add(one_sided, "one_sided");
    add(near_zero_slope, "near_zero_slope");
    add(unstable_derivative, "unstable_derivative");
    add(unbounded, "unbounded");
    return out;
}

SignalValue evaluate_signal(double alpha, int n, Signal signal) {
    require_alpha(alpha);
    if (signal == Signal::classical_transmission) return {alpha, 1.0 - alpha};
    const OutcomeProbabilities p = run_ifm(SetupSpec{n, false}, SampleSpec{alpha, 0.0, 0.0});
    switch (signal) {
        case Signal::reference: return {p.p_r, p.p_l};
        case Signal::sample: return {p.p_s, p.p_l};
        default: return {p.p_l, p.p_l};
    }
}

SignalSlope signal_derivative(double alpha, int n, Signal signal) {
    require_alpha(alpha);
    const bool edge = alpha - kStep < 0.0 || alpha + kStep > 1.0;
    if (signal == Signal::classical_transmission) return {1.0, edge, false, false};

    const Difference coarse = finite_difference(alpha, n, signal, kStep);
    const Difference fine = finite_difference(alpha, n, signal, kFineStep);
    SignalSlope slope;
    slope.value = coarse.value;
    slope.one_sided = coarse.one_sided;
    slope.near_zero = std::abs(coarse.value) < kNearZeroSlope;
    const double scale = std::max(std::abs(coarse.value), std::abs(fine.value));
    slope.unstable = !slope.near_zero && std::abs(coarse.value - fine.value) > 1e-3 * scale;
    return slope;
}

double expected_loss_normal_binomial(double alpha, double delta_alpha, Signal signal, int n,
                                     double coverage) {
    require_alpha(alpha);
    require_delta(delta_alpha);
    const SignalValue value = evaluate_signal(alpha, n, signal);
    if (value.p_loss == 0.0) return 0.0;
    if (value.p <= 0.0 || value.p >= 1.0) {
        throw std::domain_error("normal approximation is invalid for a signal probability of 0 or 1");
    }
    const double slope = signal_derivative(alpha, n, signal).value;
    return value.p_loss * value.p * (1.0 - value.p) * normal_factor(delta_alpha, slope, coverage);
}

double expected_loss_normal_poisson(double alpha, double delta_alpha, Signal signal, int n,
                                    double coverage) {
    require_alpha(alpha);
    require_delta(delta_alpha);
    const SignalValue value = evaluate_signal(alpha, n, signal);
    if (value.p <= 0.0) {
        throw std::domain_error("normal approximation is invalid for a signal probability of 0");
    }
    const double slope = signal_derivative(alpha, n, signal).value;
    return value.p_loss * value.p * normal_factor(delta_alpha, slope, coverage);
}

LossBudget expected_loss_clopper_pearson(double alpha, double delta_alpha, Signal signal, int n,
                                         double coverage, CountMode mode) {
    LossBudget budget = budget_skeleton(alpha, delta_alpha, signal, n);
    const double p = mode == CountMode::expected ? budget.signal : 0.5;
    return finish(budget, [p, coverage](std::uint64_t m) {
        return clopper_pearson(std::min(count_at(p, m), m), m, coverage).width();
    });
}

LossBudget expected_loss_poisson_chi2(double alpha, double delta_alpha, Signal signal, int n,
                                      double coverage, CountMode mode) {
    if (signal == Signal::loss) {
        throw std::invalid_argument("the loss signal is unavailable when lost particles are not counted");
    }
    LossBudget budget = budget_skeleton(alpha, delta_alpha, signal, n);
    const double p = mode == CountMode::expected ? budget.signal : 1.0;
    return finish(budget, [p, coverage](std::uint64_t m) {
        return poisson_interval(count_at(p, m), coverage).width() / static_cast<double>(m);
    });
}

std::vector<LossBudget> loss_curve(const LossCurveSpec& spec, std::span<const double> alpha_grid) {
    if (alpha_grid.empty()) throw std::invalid_argument("transparency grid is empty");
    for (double a : alpha_grid) require_alpha(a);
    require_delta(spec.delta_alpha);
    if (spec.statistics == CountStatistics::poisson && spec.signal == Signal::loss) {
        throw std::invalid_argument("the loss signal is unavailable when lost particles are not counted");
    }

    std::vector<LossBudget> rows(alpha_grid.size());
    auto compute = [&](std::size_t i) {
        rows[i] = spec.statistics == CountStatistics::binomial
                      ? expected_loss_clopper_pearson(alpha_grid[i], spec.delta_alpha, spec.signal, spec.n,
                                                      spec.coverage, spec.mode)
                      : expected_loss_poisson_chi2(alpha_grid[i], spec.delta_alpha, spec.signal, spec.n,
                                                   spec.coverage, spec.mode);
    };

    const unsigned workers = std::clamp<unsigned>(spec.threads == 0 ? std::thread::hardware_concurrency()
                                                                    : spec.threads,
                                                  1U, static_cast<unsigned>(rows.size()));
    if (workers == 1) {
        for (std::size_t i = 0; i < rows.size(); ++i) compute(i);
        return rows;
    }
    // Strided assignment; each row is written by exactly one worker.
    std::vector<std::exception_ptr> failures(workers);
    {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                try {
                    for (std::size_t i = w; i < rows.size(); i += workers) compute(i);
                } catch (...) {
                    failures[w] = std::current_exception();
                }
            });
        }
    }
    for (const auto& failure : failures) {
        if (failure) std::rethrow_exception(failure);
    }
    return rows;
}

}  // namespace ifm
