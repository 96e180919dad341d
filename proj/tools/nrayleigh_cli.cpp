// Command-line front end: scenario curves, published-figure datasets,
// CDF tables, raw simulation runs, and a quick selftest.
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "nrayleigh/analytic.hpp"
#include "nrayleigh/exact.hpp"
#include "nrayleigh/scenario.hpp"
#include "nrayleigh/simulator.hpp"
#include "nrayleigh/specialfn.hpp"

namespace {

using namespace nray;

std::string scenario_stem(const std::string& path) {
    return std::filesystem::path(path).stem().string();
}

std::string fmt(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

/// Emit to `<out_dir>/<name>` atomically when out_dir is set, else stdout.
void emit(const std::string& out_dir, const std::string& name, const std::string& body) {
    if (out_dir.empty()) {
        std::cout << body;
        return;
    }
    std::filesystem::create_directories(out_dir);
    const auto path = (std::filesystem::path(out_dir) / name).string();
    write_file_atomic(path, body);
    std::cout << path << "\n";
}

std::vector<Method> methods_from_flag(const std::string& flag, std::size_t n_hops) {
    if (flag == "exact") return {Method::Exact};
    if (flag == "laplace") return {Method::Laplace};
    if (flag == "simulate" || flag == "simulated") return {Method::Simulated};
    if (flag == "all") {
        std::vector<Method> m;
        if (n_hops <= 4) m.push_back(Method::Exact);
        m.push_back(Method::Laplace);
        m.push_back(Method::Simulated);
        return m;
    }
    throw std::invalid_argument("unknown method `" + flag +
                                "` (expected exact, laplace, simulate, or all)");
}

struct CommonArgs {
    std::string scenario;
    std::string grid;
    std::string out_dir;
    std::uint64_t seed = 0;
    bool seed_set = false;
};

ScenarioConfig load_with_overrides(const CommonArgs& args) {
    ScenarioConfig cfg = load_scenario_file(args.scenario);
    if (!args.grid.empty()) {
        parse_grid_spec(args.grid, cfg.grid_lo_db, cfg.grid_hi_db, cfg.grid_step_db);
    }
    if (args.seed_set) cfg.seed = args.seed;
    return cfg;
}

int run_curve(const CommonArgs& args, const std::string& method_flag) {
    const ScenarioConfig cfg = load_with_overrides(args);
    const std::vector<Method> methods =
        method_flag.empty() ? cfg.methods : methods_from_flag(method_flag, cfg.cascade.size());
    const auto rows = compute_curves(cfg, methods);
    std::ostringstream body;
    write_curve_csv(rows, body);
    emit(args.out_dir, scenario_stem(args.scenario) + "_curve.csv", body.str());
    return 0;
}

int run_cdf(const CommonArgs& args) {
    const ScenarioConfig cfg = load_with_overrides(args);
    std::ostringstream body;
    write_cdf_csv(cfg, body);
    emit(args.out_dir, scenario_stem(args.scenario) + "_cdf.csv", body.str());
    return 0;
}

int run_simulate(const CommonArgs& args, double duration, const std::string& trace_path) {
    ScenarioConfig cfg = load_with_overrides(args);
    if (duration > 0.0) cfg.duration = duration;
    const ThresholdGrid grid = cfg.grid();
    const TraceSpec t = cfg.trace_spec();
    const double fm = cfg.resolve_fm_ref();
    const auto dbs_lo = cfg.grid_lo_db;

    const auto est =
        estimate_cascade_taps(cfg.cascade, {cfg.cascade.size()}, {grid}, t, 16).front();

    std::ostringstream body;
    body << "threshold_db,threshold_lin,crossings,lcr_hz,afd_s,lcr_normalized,"
            "afd_normalized\n";
    for (std::size_t j = 0; j < grid.values.size(); ++j) {
        const double db = dbs_lo + static_cast<double>(j) * cfg.grid_step_db;
        body << fmt(db) << ',' << fmt(grid.values[j]) << ',' << est.crossings[j] << ','
             << fmt(est.lcr[j]) << ',' << fmt(est.afd[j]) << ',' << fmt(est.lcr[j] / fm)
             << ',' << fmt(est.afd[j] * fm) << '\n';
    }
    emit(args.out_dir, scenario_stem(args.scenario) + "_sim.csv", body.str());

    if (!trace_path.empty()) {
        const FadingTrace trace = cascade_trace(cfg.cascade, t);
        const std::string tmp = trace_path + ".tmp";
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open for writing: " + tmp);
        write_trace_csv(trace, out);
        out.flush();
        if (!out) throw std::runtime_error("write failed: " + tmp);
        out.close();
        std::filesystem::rename(tmp, trace_path);
        std::cout << trace_path << "\n";
    }
    return 0;
}

int run_figure(int figure_id, const std::string& out_dir, std::uint64_t seed,
               const std::string& grid_flag, double fm, double duration, int oscillators) {
    double lo = -30.0, hi = 10.0, step = 0.5;
    if (!grid_flag.empty()) parse_grid_spec(grid_flag, lo, hi, step);
    const FigureResult result =
        compute_figure(figure_id, fm, duration, seed, lo, hi, step, oscillators);
    for (const auto& path : write_figure_csvs(result, out_dir.empty() ? "." : out_dir)) {
        std::cout << path << "\n";
    }
    return 0;
}

// ------------------------------------------------------------- selftest

struct SelfTest {
    int failures = 0;

    void check(const std::string& name, bool ok, const std::string& detail = "") {
        if (ok) {
            std::cout << "PASS " << name << "\n";
        } else {
            ++failures;
            std::cout << "FAIL " << name << (detail.empty() ? "" : ": " + detail) << "\n";
        }
    }

    void check_rel(const std::string& name, double got, double want, double tol) {
        const double rel = std::fabs(got - want) / std::fabs(want);
        check(name, rel <= tol,
              "got " + fmt(got) + ", want " + fmt(want) + ", rel " + fmt(rel));
    }

    template <typename Fn>
    void check_rel_eval(const std::string& name, Fn&& fn, double want, double tol) {
        try {
            check_rel(name, fn(), want, tol);
        } catch (const std::exception& e) {
            check(name, false, e.what());
        }
    }

    template <typename Fn>
    void check_eval(const std::string& name, Fn&& fn) {
        try {
            check(name, fn());
        } catch (const std::exception& e) {
            check(name, false, e.what());
        }
    }
};

CascadeSpec unit_cascade(std::size_t n) {
    CascadeSpec c;
    c.hops.resize(n);
    c.gains.assign(n, RelayGainSpec::unity());
    for (auto& h : c.hops) h.doppler = DopplerSpec::fixed_to_mobile(1.0);
    return c;
}

int run_selftest() {
    SelfTest t;

    t.check_rel("exponential_integral_E1(1)", gamma_upper_zero(1.0), 0.21938393439552027,
                1e-12);
    t.check_rel("exponential_integral_E1(0.1)", gamma_upper_zero(0.1), 1.8229239584193907,
                1e-12);
    t.check_rel("bessel_K1(1)", bessel_k1(1.0), 0.60190723019723457, 1e-10);

    t.check_rel("cdf_one_hop", product_exp_cdf(1.0, 1), 0.63212055882855768, 1e-12);
    t.check_rel_eval(
        "cdf_two_hop_vs_bessel",
        [] {
            const double z = 0.3;
            return product_exp_cdf(z, 2) /
                   (1.0 - 2.0 * std::sqrt(z) * bessel_k1(2.0 * std::sqrt(z)));
        },
        1.0, 1e-8);
    t.check_rel_eval("cdf_three_hop", [] { return product_exp_cdf(1.0, 3); },
                     0.77638724688673618, 1e-6);

    t.check_rel("semi_blind_gain_sq", semi_blind_gain_sq(1.0, 1.0), 0.59634736232319407,
                1e-12);

    t.check_rel_eval("closed_form_rate_two_hop",
                     [] { return laplace_lcr(unit_cascade(2), 1.0); }, 0.85033666317527266,
                     1e-12);
    t.check_rel_eval("integral_rate_two_hop", [] { return exact_lcr(unit_cascade(2), 1.0); },
                     0.88865974675164547, 1e-7);
    t.check_rel_eval("integral_rate_three_hop",
                     [] { return exact_lcr(unit_cascade(3), 1.0); }, 0.82246245283692224,
                     1e-6);

    t.check_eval("trace_determinism", [] {
        TraceSpec spec;
        spec.sample_rate = 256.0;
        spec.duration = 120.0;
        spec.seed = 42;
        const FadingTrace a = gen_f2m_trace(1.0, 2.0, spec);
        const FadingTrace b = gen_f2m_trace(1.0, 2.0, spec);
        spec.seed = 43;
        const FadingTrace c = gen_f2m_trace(1.0, 2.0, spec);
        return a.samples == b.samples && a.samples != c.samples;
    });

    t.check_eval("estimator_cdf_identity", [] {
        TraceSpec spec;
        spec.sample_rate = 256.0;
        spec.duration = 120.0;
        spec.seed = 42;
        const FadingTrace a = gen_f2m_trace(1.0, 2.0, spec);
        ThresholdGrid grid = ThresholdGrid::from_db_range(-10.0, 0.0, 2.0, 1.0);
        const SimEstimate est = estimate_lcr_afd(a, grid);
        for (std::size_t j = 0; j < grid.values.size(); ++j) {
            if (est.crossings[j] == 0) continue;
            const double lhs = est.afd[j] * est.lcr[j] * est.duration;
            if (std::fabs(lhs - est.time_below[j]) > 1e-12 * est.time_below[j]) {
                return false;
            }
        }
        return true;
    });

    t.check_rel_eval(
        "scenario_one_hop_normalized_rate",
        [] {
            const std::string text =
                "hops = 1\nnode_doppler_hz = 0 10\ngrid_db = 0:0:1\nmethods = laplace\n";
            const ScenarioConfig cfg = parse_scenario_string(text, "selftest");
            return compute_curve(cfg, Method::Laplace).at(0).lcr_normalized;
        },
        0.92213700889578910, 1e-12);

    if (t.failures == 0) {
        std::cout << "selftest: all checks passed\n";
        return 0;
    }
    std::cout << "selftest: " << t.failures << " check(s) failed\n";
    return 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "Second-order statistics (level crossing rate and average fade duration) of "
        "cascaded Rayleigh fading channels"};
    app.require_subcommand(1);

    CommonArgs curve_args, cdf_args, sim_args;
    std::string curve_method;
    double sim_duration = 0.0;
    std::string sim_trace;

    int fig_id = 0;
    std::string fig_out = ".", fig_grid;
    std::uint64_t fig_seed = 1;
    double fig_fm = 30.0, fig_duration = 800.0;
    int fig_osc = 32;

    auto add_common = [](CLI::App* sub, CommonArgs& args, bool* seed_flag) {
        sub->add_option("--scenario", args.scenario, "Scenario file path")
            ->required()
            ->check(CLI::ExistingFile);
        sub->add_option("--grid", args.grid, "Threshold grid override lo_db:hi_db:step_db");
        sub->add_option("--out", args.out_dir, "Output directory (default: stdout)");
        sub->add_option("--seed", args.seed, "Simulation seed override")
            ->each([seed_flag](const std::string&) { *seed_flag = true; });
    };

    CLI::App* curve = app.add_subcommand("curve", "Compute an LCR/AFD curve for a scenario");
    add_common(curve, curve_args, &curve_args.seed_set);
    curve->add_option("--method", curve_method,
                      "exact | laplace | simulate | all (default: scenario file)");

    CLI::App* figure =
        app.add_subcommand("figure", "Reproduce a published figure dataset (ids 2..7)");
    figure->add_option("id", fig_id, "Figure id (2..7)")->required();
    figure->add_option("--out", fig_out, "Output directory (default .)");
    figure->add_option("--seed", fig_seed, "Simulation seed (default 1)");
    figure->add_option("--grid", fig_grid, "Threshold grid lo_db:hi_db:step_db");
    figure->add_option("--fm", fig_fm, "Mobile-node max Doppler in Hz (default 30)");
    figure->add_option("--duration", fig_duration, "Simulated seconds (default 800)");
    figure->add_option("--oscillators", fig_osc, "Ring size M (default 32)");

    CLI::App* cdf = app.add_subcommand("cdf", "Evaluate the cascade amplitude CDF");
    add_common(cdf, cdf_args, &cdf_args.seed_set);

    CLI::App* simulate =
        app.add_subcommand("simulate", "Run the scenario's Monte-Carlo simulation");
    add_common(simulate, sim_args, &sim_args.seed_set);
    simulate->add_option("--duration", sim_duration, "Simulated seconds override");
    simulate->add_option("--export-trace", sim_trace, "Also write the envelope trace CSV");

    CLI::App* selftest = app.add_subcommand("selftest", "Run quick built-in checks");

    CLI11_PARSE(app, argc, argv);

    try {
        if (curve->parsed()) return run_curve(curve_args, curve_method);
        if (figure->parsed())
            return run_figure(fig_id, fig_out, fig_seed, fig_grid, fig_fm, fig_duration,
                              fig_osc);
        if (cdf->parsed()) return run_cdf(cdf_args);
        if (simulate->parsed()) return run_simulate(sim_args, sim_duration, sim_trace);
        if (selftest->parsed()) return run_selftest();
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
