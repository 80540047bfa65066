#include "commands.hpp"

#include "ifm/core_sim.hpp"
#include "ifm/discrimination.hpp"
#include "ifm/precision.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <ostream>
#include <stdexcept>
#include <thread>

#ifndef IFM_VERSION_STRING
#define IFM_VERSION_STRING "0.0.0"
#endif

namespace ifm::cli {

namespace {

using json = nlohmann::ordered_json;

Column integer(std::string name) { return {std::move(name), ColumnType::integer}; }
Column real(std::string name) { return {std::move(name), ColumnType::real}; }
Column text(std::string name) { return {std::move(name), ColumnType::text}; }
Column boolean(std::string name) { return {std::move(name), ColumnType::boolean}; }

const std::map<std::string, Schema, std::less<>>& schemas() {
    static const std::map<std::string, Schema, std::less<>> table{
        {"evolution",
         {integer("n"), real("alpha"), real("phi"), real("phi_comp"), integer("step"), real("t"), real("p_r"),
          real("p_s"), real("p_l")}},
        {"sweep", {integer("n"), real("alpha"), real("one_minus_alpha"), real("phi"), real("p_r"), real("p_s"), real("p_l")}},
        {"contrast",
         {real("contrast"), real("alpha1"), real("alpha2"), integer("n_opt"), real("average_loss"), integer("n_min"),
          integer("n_max"), boolean("hit_search_bound"), real("n_opt_approx")}},
        {"discriminate",
         {text("strategy"), integer("n"), real("alpha1"), real("alpha2"), real("threshold"), real("error"),
          real("mean_lost"), real("mean_used"), integer("replications"), integer("capped_runs"), integer("errors"),
          real("error_se"), real("lost_se"), real("bound")}},
        {"bound", {real("alpha1"), real("alpha2"), real("p_error"), real("min_lost")}},
        {"precision",
         {text("strategy"), integer("n"), text("signal"), text("statistics"), text("count_mode"), real("alpha"),
          real("delta_alpha"), real("coverage"), real("signal_p"), real("slope"), real("p_loss"), real("m_required"),
          real("expected_lost"), text("flags")}},
        {"phase", {integer("n"), real("alpha"), real("phi"), real("phi_comp"), real("p_r"), real("p_s"), real("p_l")}},
    };
    return table;
}

struct InvalidConfig : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

void require(bool ok, const std::string& message) {
    if (!ok) throw InvalidConfig(message);
}

struct Options {
    std::vector<int> n;
    std::vector<double> alpha;
    double alpha1 = 0.0;
    double alpha2 = 1.0;
    double phi = 0.0;
    std::vector<double> phi_grid;
    double phi_comp = 0.0;
    double delta_alpha = 0.01;
    double coverage = 0.95;
    std::string signal = "reference";
    std::string statistics = "binomial";
    std::string count_mode = "expected";
    std::vector<double> thresholds;
    std::vector<double> contrast;
    std::vector<double> p_error;
    std::uint64_t replications = kDefaultReplications;
    std::uint64_t cap = kDefaultParticleCap;
    std::uint64_t seed = kDefaultSeed;
    unsigned threads = 0;
    int points = 0;
    bool log_scale = false;
    bool no_classical = false;
    bool stratified = false;
    std::string out;
    std::string format = "csv";
};

std::vector<double> linspace(double lo, double hi, int points) {
    std::vector<double> grid;
    if (points == 1) return {lo};
    for (int i = 0; i < points; ++i) grid.push_back(lo + (hi - lo) * i / (points - 1));
    grid.back() = hi;
    return grid;
}

std::vector<double> logspace(double lo, double hi, int points) {
    std::vector<double> grid;
    if (points == 1) return {lo};
    const double a = std::log10(lo);
    const double b = std::log10(hi);
    for (int i = 0; i < points; ++i) grid.push_back(std::pow(10.0, a + (b - a) * i / (points - 1)));
    grid.front() = lo;
    grid.back() = hi;
    return grid;
}

unsigned resolve_threads(unsigned requested) {
    if (requested > 0) return requested;
    return std::max(1U, std::thread::hardware_concurrency());
}

void check_n(const std::vector<int>& ns) {
    require(!ns.empty(), "--n needs at least one value");
    for (int n : ns) require(n >= 1, "--n values must be >= 1");
}

void check_unit(double v, const std::string& name) {
    require(std::isfinite(v) && v >= 0.0 && v <= 1.0, name + " must lie in [0, 1]");
}

void check_points(int points, int minimum) {
    require(points >= minimum, "--points must be >= " + std::to_string(minimum));
}

Table start_table(const std::string& subcommand, const Options& o, json config) {
    Table t;
    t.schema = schema_for(subcommand);
    t.metadata["tool"] = kToolName;
    t.metadata["version"] = IFM_VERSION_STRING;
    t.metadata["subcommand"] = subcommand;
    t.metadata["config"] = std::move(config);
    t.metadata["seed"] = o.seed;
    return t;
}

// ---- subcommands -----------------------------------------------------------

Table cmd_evolution(Options& o) {
    if (o.n.empty()) o.n = {10};
    if (o.alpha.empty()) o.alpha = {0.0};
    check_n(o.n);
    for (double a : o.alpha) check_unit(a, "--alpha");
    SampleSpec{0.5, o.phi, o.phi_comp}.validate();

    Table t = start_table("evolution", o,
                          {{"n", o.n}, {"alpha", o.alpha}, {"phi", o.phi}, {"phi_comp", o.phi_comp}});
    for (int n : o.n) {
        for (double a : o.alpha) {
            const auto res = run_ifm(SetupSpec{n, true}, SampleSpec{a, o.phi, o.phi_comp});
            for (const auto& p : res.trace) {
                t.add_row({std::int64_t{n}, a, o.phi, o.phi_comp, std::int64_t{p.step},
                           static_cast<double>(p.step) / n, p.p_r, p.p_s, p.p_l});
            }
        }
    }
    return t;
}

Table cmd_sweep(Options& o) {
    if (o.n.empty()) o.n = {10};
    if (o.points == 0) o.points = 101;
    check_n(o.n);
    for (double a : o.alpha) check_unit(a, "--alpha");
    if (o.alpha.empty()) check_points(o.points, 2);
    SampleSpec{0.5, o.phi, 0.0}.validate();

    json config{{"n", o.n}, {"phi", o.phi}};
    if (o.alpha.empty()) {
        config["points"] = o.points;
        config["log_scale"] = o.log_scale;
    } else {
        config["alpha"] = o.alpha;
    }
    Table t = start_table("sweep", o, std::move(config));
    for (int n : o.n) {
        // On the log scale the grid is uniform in log(1 - alpha) over [1e-3 / N, 1].
        std::vector<double> one_minus;
        if (!o.alpha.empty()) {
            for (double a : o.alpha) one_minus.push_back(1.0 - a);
        } else if (o.log_scale) {
            one_minus = logspace(1e-3 / n, 1.0, o.points);
        } else {
            for (double a : linspace(0.0, 1.0, o.points)) one_minus.push_back(1.0 - a);
        }
        std::vector<double> alphas;
        for (std::size_t i = 0; i < one_minus.size(); ++i) {
            alphas.push_back(o.alpha.empty() ? 1.0 - one_minus[i] : o.alpha[i]);
        }
        const auto rows = probability_sweep(n, alphas, o.phi);
        for (std::size_t i = 0; i < rows.size(); ++i) {
            t.add_row({std::int64_t{n}, alphas[i], one_minus[i], o.phi, rows[i].p_r, rows[i].p_s, rows[i].p_l});
        }
    }
    return t;
}

Table cmd_contrast(Options& o) {
    if (o.points == 0) o.points = 41;
    if (o.contrast.empty()) {
        check_points(o.points, 1);
        o.contrast = logspace(1.0, 1e4, o.points);
    }
    check_unit(o.alpha2, "--alpha2");
    require(o.alpha2 < 1.0, "--alpha2 must be below 1 for the contrast scan");
    for (double c : o.contrast) {
        require(std::isfinite(c) && c >= 1.0, "--contrast values must be >= 1");
        require(1.0 - c * (1.0 - o.alpha2) >= -1e-12, "--contrast too large for the chosen --alpha2");
    }

    Table t = start_table("contrast", o, {{"contrast", o.contrast}, {"alpha2", o.alpha2}});
    for (const auto& p : contrast_curve(o.contrast, o.alpha2)) {
        t.add_row({p.contrast, p.alpha1, p.alpha2, std::int64_t{p.optimum.n}, p.optimum.average_loss,
                   std::int64_t{p.optimum.n_min}, std::int64_t{p.optimum.n_max}, p.optimum.hit_search_bound,
                   n_opt_approx(p.alpha1, p.alpha2)});
    }
    return t;
}

Table cmd_discriminate(Options& o) {
    if (o.n.empty()) o.n = {10, 100};
    if (o.thresholds.empty()) o.thresholds = default_thresholds();
    check_n(o.n);
    check_unit(o.alpha1, "--alpha1");
    check_unit(o.alpha2, "--alpha2");
    require(o.alpha1 < o.alpha2, "--alpha1 must be smaller than --alpha2");
    require(o.replications >= 1, "--replications must be >= 1");
    require(o.cap >= 1, "--cap must be >= 1");
    for (double x : o.thresholds) require(x > 0.0 && x < 0.5, "--thresholds must lie in (0, 0.5)");
    SampleSpec{0.5, o.phi, 0.0}.validate();

    std::vector<StrategySpec> strategies;
    if (!o.no_classical) strategies.push_back({StrategyKind::classical, 1, o.alpha1, o.alpha2, 0.0});
    for (int n : o.n) strategies.push_back({StrategyKind::ifm, n, o.alpha1, o.alpha2, o.phi});

    Table t = start_table("discriminate", o,
                          {{"alpha1", o.alpha1},
                           {"alpha2", o.alpha2},
                           {"n", o.n},
                           {"phi", o.phi},
                           {"classical", !o.no_classical},
                           {"thresholds", o.thresholds},
                           {"replications", o.replications},
                           {"cap", o.cap},
                           {"stratified", o.stratified}});
    MonteCarloOptions mc;
    mc.cap = o.cap;
    mc.threads = resolve_threads(o.threads);
    mc.stratified = o.stratified;
    for (const auto& s : strategies) {
        const std::int64_t n = s.kind == StrategyKind::classical ? 0 : s.n_roundtrips;
        for (const auto& p : monte_carlo_curve(s, o.thresholds, o.replications, o.seed, mc)) {
            t.add_row({std::string(to_string(s.kind)), n, o.alpha1, o.alpha2, p.threshold_x, p.error_probability,
                       p.mean_lost, p.mean_used, static_cast<std::int64_t>(p.replications),
                       static_cast<std::int64_t>(p.capped_runs), static_cast<std::int64_t>(p.errors),
                       p.error_std_error, p.lost_std_error, min_loss_bound(o.alpha1, o.alpha2, p.error_probability)});
        }
    }
    return t;
}

Table cmd_bound(Options& o) {
    if (o.points == 0) o.points = 51;
    if (o.p_error.empty()) {
        check_points(o.points, 2);
        o.p_error = linspace(0.0, 0.5, o.points);
    }
    check_unit(o.alpha1, "--alpha1");
    check_unit(o.alpha2, "--alpha2");
    for (double pe : o.p_error) require(pe >= 0.0 && pe <= 0.5, "--p-error values must lie in [0, 0.5]");

    Table t = start_table("bound", o, {{"alpha1", o.alpha1}, {"alpha2", o.alpha2}, {"p_error", o.p_error}});
    for (double pe : o.p_error) t.add_row({o.alpha1, o.alpha2, pe, min_loss_bound(o.alpha1, o.alpha2, pe)});
    return t;
}

Table cmd_precision(Options& o) {
    if (o.n.empty()) o.n = {10, 100, 500};
    if (o.points == 0) o.points = 99;
    if (o.alpha.empty()) {
        check_points(o.points, 2);
        o.alpha = linspace(0.01, 0.99, o.points);
    }
    check_n(o.n);
    for (double a : o.alpha) check_unit(a, "--alpha");
    require(o.delta_alpha > 0.0 && std::isfinite(o.delta_alpha), "--delta-alpha must be positive");
    require(o.coverage > 0.0 && o.coverage < 1.0, "--coverage must lie in (0, 1)");
    const auto signal = parse_signal(o.signal);
    const auto statistics = parse_statistics(o.statistics);
    require(signal.has_value(), "unknown --signal " + o.signal);
    require(statistics.has_value(), "unknown --statistics " + o.statistics);
    require(o.count_mode == "expected" || o.count_mode == "worst_case", "unknown --count-mode " + o.count_mode);
    require(!(*signal == Signal::loss && *statistics == CountStatistics::poisson),
            "the loss signal is not observable under Poisson statistics");
    const CountMode mode = o.count_mode == "expected" ? CountMode::expected : CountMode::worst_case;

    Table t = start_table("precision", o,
                          {{"n", o.n},
                           {"alpha", o.alpha},
                           {"signal", o.signal},
                           {"statistics", o.statistics},
                           {"count_mode", o.count_mode},
                           {"delta_alpha", o.delta_alpha},
                           {"coverage", o.coverage},
                           {"classical", !o.no_classical}});

    struct Series {
        std::string strategy;
        int n;
        Signal signal;
    };
    std::vector<Series> series;
    if (*signal == Signal::classical_transmission) {
        series.push_back({"classical", 0, Signal::classical_transmission});
    } else {
        if (!o.no_classical) series.push_back({"classical", 0, Signal::classical_transmission});
        for (int n : o.n) series.push_back({"ifm", n, *signal});
    }
    for (const auto& s : series) {
        LossCurveSpec spec;
        spec.signal = s.signal;
        spec.n = std::max(1, s.n);
        spec.delta_alpha = o.delta_alpha;
        spec.statistics = *statistics;
        spec.coverage = o.coverage;
        spec.mode = mode;
        spec.threads = resolve_threads(o.threads);
        for (const auto& b : loss_curve(spec, o.alpha)) {
            t.add_row({s.strategy, std::int64_t{s.n}, std::string(to_string(s.signal)), o.statistics, o.count_mode,
                       b.alpha, b.delta_alpha, o.coverage, b.signal, b.slope, b.p_loss, b.m_required,
                       b.expected_lost, b.flags.describe()});
        }
    }
    return t;
}

Table cmd_phase(Options& o) {
    if (o.n.empty()) o.n = {2, 5, 50};
    if (o.alpha.empty()) o.alpha = {1.0};
    if (o.points == 0) o.points = 201;
    if (o.phi_grid.empty()) {
        check_points(o.points, 2);
        o.phi_grid = linspace(0.0, 2.0 * std::numbers::pi, o.points);
    }
    check_n(o.n);
    for (double a : o.alpha) check_unit(a, "--alpha");
    for (double phi : o.phi_grid) SampleSpec{1.0, phi, o.phi_comp}.validate();

    Table t = start_table("phase", o,
                          {{"n", o.n}, {"alpha", o.alpha}, {"phi", o.phi_grid}, {"phi_comp", o.phi_comp}});
    for (int n : o.n) {
        for (double a : o.alpha) {
            for (double phi : o.phi_grid) {
                const auto p = final_probabilities(n, SampleSpec{a, phi, o.phi_comp});
                t.add_row({std::int64_t{n}, a, phi, o.phi_comp, p.p_r, p.p_s, p.p_l});
            }
        }
    }
    return t;
}

// ---- option wiring ---------------------------------------------------------

void add_output(CLI::App* sub, Options& o) {
    sub->add_option("--out", o.out, "Output file (default: stdout)");
    sub->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--seed", o.seed, "Random seed")->capture_default_str();
}

void add_n(CLI::App* sub, Options& o, const std::string& help) {
    sub->add_option("--n", o.n, help)->delimiter(',');
}

}  // namespace

const Schema& schema_for(std::string_view subcommand) {
    const auto it = schemas().find(subcommand);
    if (it == schemas().end()) throw std::invalid_argument("unknown subcommand " + std::string(subcommand));
    return it->second;
}

std::vector<std::string_view> subcommand_names() {
    return {"evolution", "sweep", "contrast", "discriminate", "bound", "precision", "phase"};
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    Options o;
    CLI::App app{"Interaction-free measurement of semitransparent samples", std::string(kToolName)};
    app.set_version_flag("--version", IFM_VERSION_STRING);
    app.require_subcommand(1);

    auto* evolution = app.add_subcommand("evolution", "State probabilities after each round trip");
    add_n(evolution, o, "Round trips per run (default 10)");
    evolution->add_option("--alpha", o.alpha, "Transparencies (default 0)")->delimiter(',');
    evolution->add_option("--phi", o.phi, "Phase shift per encounter [rad]");
    evolution->add_option("--phi-comp", o.phi_comp, "Compensating phase per round trip [rad]");
    add_output(evolution, o);

    auto* sweep = app.add_subcommand("sweep", "Final probabilities across transparencies");
    add_n(sweep, o, "Round trips (default 10)");
    sweep->add_option("--alpha", o.alpha, "Explicit transparency grid")->delimiter(',');
    sweep->add_option("--points", o.points, "Generated grid size (default 101)");
    sweep->add_flag("--log-scale", o.log_scale, "Grid uniform in log(1 - alpha) over [1e-3/N, 1]");
    sweep->add_option("--phi", o.phi, "Phase shift per encounter [rad]");
    add_output(sweep, o);

    auto* contrast = app.add_subcommand("contrast", "Minimal average loss versus contrast");
    contrast->add_option("--contrast", o.contrast, "Contrasts (default 41 log-spaced in [1, 1e4])")->delimiter(',');
    contrast->add_option("--points", o.points, "Generated grid size (default 41)");
    o.alpha2 = kDefaultContrastAnchor;
    contrast->add_option("--alpha2", o.alpha2, "Higher transparency, held fixed")->capture_default_str();
    add_output(contrast, o);

    auto* discriminate = app.add_subcommand("discriminate", "Sequential discrimination of two transparencies");
    add_n(discriminate, o, "IFM round trips (default 10,100)");
    discriminate->add_option("--alpha1", o.alpha1, "Lower transparency")->required();
    discriminate->add_option("--alpha2", o.alpha2, "Higher transparency")->required();
    discriminate->add_option("--phi", o.phi, "Phase shift per encounter [rad]");
    discriminate->add_option("--thresholds", o.thresholds, "Stopping thresholds (default 60 log-spaced)")
        ->delimiter(',');
    discriminate->add_option("--replications", o.replications, "Runs per threshold")->capture_default_str();
    discriminate->add_option("--cap", o.cap, "Particle cap per run")->capture_default_str();
    discriminate->add_option("--threads", o.threads, "Worker threads (0 = all cores)");
    discriminate->add_flag("--no-classical", o.no_classical, "Skip the classical strategy");
    discriminate->add_flag("--stratified", o.stratified, "Alternate the true transparency");
    add_output(discriminate, o);

    auto* bound = app.add_subcommand("bound", "Minimum mean loss of any quantum discrimination");
    bound->add_option("--alpha1", o.alpha1, "Lower transparency")->required();
    bound->add_option("--alpha2", o.alpha2, "Higher transparency")->required();
    bound->add_option("--p-error", o.p_error, "Error probabilities (default 51 in [0, 0.5])")->delimiter(',');
    bound->add_option("--points", o.points, "Generated grid size (default 51)");
    add_output(bound, o);

    auto* precision = app.add_subcommand("precision", "Expected loss for measuring a transparency");
    add_n(precision, o, "IFM round trips (default 10,100,500)");
    precision->add_option("--alpha", o.alpha, "Transparency grid (default 0.01..0.99)")->delimiter(',');
    precision->add_option("--points", o.points, "Generated grid size (default 99)");
    precision->add_option("--signal", o.signal, "reference|sample|loss|classical")->capture_default_str();
    precision->add_option("--statistics", o.statistics, "binomial|poisson")->capture_default_str();
    precision->add_option("--count-mode", o.count_mode, "expected|worst_case")->capture_default_str();
    precision->add_option("--delta-alpha", o.delta_alpha, "Target uncertainty")->capture_default_str();
    precision->add_option("--coverage", o.coverage, "Confidence level")->capture_default_str();
    precision->add_option("--threads", o.threads, "Worker threads (0 = all cores)");
    precision->add_flag("--no-classical", o.no_classical, "Skip the classical reference rows");
    add_output(precision, o);

    auto* phase = app.add_subcommand("phase", "Final probabilities versus phase shift");
    add_n(phase, o, "Round trips (default 2,5,50)");
    phase->add_option("--alpha", o.alpha, "Transparencies (default 1)")->delimiter(',');
    phase->add_option("--phi", o.phi_grid, "Phase grid (default 201 points in [0, 2 pi])")->delimiter(',');
    phase->add_option("--points", o.points, "Generated grid size (default 201)");
    phase->add_option("--phi-comp", o.phi_comp, "Compensating phase per round trip [rad]");
    add_output(phase, o);

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitInvalidConfig;
    }

    const std::string name = app.get_subcommands().front()->get_name();
    Table table;
    try {
        if (name == "evolution") table = cmd_evolution(o);
        else if (name == "sweep") table = cmd_sweep(o);
        else if (name == "contrast") table = cmd_contrast(o);
        else if (name == "discriminate") table = cmd_discriminate(o);
        else if (name == "bound") table = cmd_bound(o);
        else if (name == "precision") table = cmd_precision(o);
        else table = cmd_phase(o);
    } catch (const std::invalid_argument& e) {
        err << "ifm " << name << ": invalid configuration: " << e.what() << '\n';
        return kExitInvalidConfig;
    } catch (const std::exception& e) {
        err << "ifm " << name << ": numeric failure: " << e.what() << '\n';
        return kExitNumericFailure;
    }

    auto emit = [&](std::ostream& sink) {
        if (o.format == "json") {
            write_json(sink, table);
        } else {
            write_csv(sink, table);
        }
    };
    if (o.out.empty()) {
        emit(out);
        return kExitOk;
    }
    std::ofstream file(o.out, std::ios::binary);
    if (!file) {
        err << "ifm: cannot open " << o.out << " for writing\n";
        return kExitInvalidConfig;
    }
    emit(file);
    if (!file.flush()) {
        err << "ifm: write to " << o.out << " failed\n";
        return kExitNumericFailure;
    }
    return kExitOk;
}

}  // namespace ifm::cli
