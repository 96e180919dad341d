// Python bindings for the main operations: channel/cascade description,
// closed-form and integral LCR/AFD, the amplitude CDF, trace simulation,
// and scenario/figure plumbing.
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "nrayleigh/analytic.hpp"
#include "nrayleigh/core.hpp"
#include "nrayleigh/exact.hpp"
#include "nrayleigh/scenario.hpp"
#include "nrayleigh/simulator.hpp"
#include "nrayleigh/specialfn.hpp"

namespace py = pybind11;
using namespace nray;

PYBIND11_MODULE(_core, m) {
    m.doc() =
        "Second-order statistics (level crossing rate and average fade duration) of the "
        "product of N Rayleigh fading envelopes: closed-form approximation, direct "
        "numerical integration, and sum-of-sinusoids Monte-Carlo simulation.";

    py::enum_<Method>(m, "Method")
        .value("Exact", Method::Exact)
        .value("Laplace", Method::Laplace)
        .value("Simulated", Method::Simulated);

    py::enum_<DopplerSpec::Kind>(m, "DopplerKind")
        .value("FixedToMobile", DopplerSpec::Kind::FixedToMobile)
        .value("MobileToMobile", DopplerSpec::Kind::MobileToMobile);

    py::class_<DopplerSpec>(m, "DopplerSpec")
        .def(py::init<>())
        .def_readwrite("kind", &DopplerSpec::kind)
        .def_readwrite("fm_tx", &DopplerSpec::fm_tx)
        .def_readwrite("fm_rx", &DopplerSpec::fm_rx)
        .def_static("fixed_to_mobile", &DopplerSpec::fixed_to_mobile, py::arg("fm"))
        .def_static("mobile_to_mobile", &DopplerSpec::mobile_to_mobile, py::arg("fm_tx"),
                    py::arg("fm_rx"))
        .def("validate", &DopplerSpec::validate);

    m.def("effective_doppler", &effective_doppler, py::arg("doppler"));
    m.def("max_doppler", &max_doppler, py::arg("doppler"));
    m.def("derivative_variance", &derivative_variance, py::arg("omega"), py::arg("f"));

    py::class_<HopSpec>(m, "HopSpec")
        .def(py::init<>())
        .def_readwrite("omega_hat", &HopSpec::omega_hat)
        .def_readwrite("doppler", &HopSpec::doppler)
        .def_readwrite("noise_variance", &HopSpec::noise_variance)
        .def("mean_snr", &HopSpec::mean_snr);

    py::class_<RelayGainSpec>(m, "RelayGainSpec")
        .def(py::init<>())
        .def_static("unity", &RelayGainSpec::unity)
        .def_static("fixed_c", &RelayGainSpec::fixed_c, py::arg("c"))
        .def_static("semi_blind", &RelayGainSpec::semi_blind)
        .def_static("explicit_gain", &RelayGainSpec::explicit_gain, py::arg("g"));

    m.def("semi_blind_gain_sq", &semi_blind_gain_sq, py::arg("mean_snr"),
          py::arg("omega_hat"));

    py::class_<CascadeSpec>(m, "CascadeSpec")
        .def(py::init<>())
        .def_readwrite("hops", &CascadeSpec::hops)
        .def_readwrite("gains", &CascadeSpec::gains)
        .def_readwrite("node_dopplers", &CascadeSpec::node_dopplers)
        .def("__len__", &CascadeSpec::size)
        .def("validate", &CascadeSpec::validate);

    m.def("hop_doppler", &hop_doppler, py::arg("cascade"), py::arg("i"));
    m.def("resolved_gain", &resolved_gain, py::arg("cascade"), py::arg("i"));
    m.def("effective_powers", &effective_powers, py::arg("cascade"));
    m.def("effective_dopplers", &effective_dopplers, py::arg("cascade"));
    m.def("phi", py::overload_cast<const CascadeSpec&>(&phi), py::arg("cascade"));

    py::class_<ThresholdGrid>(m, "ThresholdGrid")
        .def(py::init<>())
        .def_readwrite("values", &ThresholdGrid::values)
        .def_readwrite("normalization", &ThresholdGrid::normalization)
        .def_static("from_db_range", &ThresholdGrid::from_db_range, py::arg("lo_db"),
                    py::arg("hi_db"), py::arg("step_db"), py::arg("normalization") = 1.0)
        .def("validate", &ThresholdGrid::validate);

    m.def("snr_db_to_linear", &snr_db_to_linear, py::arg("db"));
    m.def("threshold_db_to_amplitude", &threshold_db_to_amplitude, py::arg("db"),
          py::arg("normalization"));
    m.def("amplitude_to_threshold_db", &amplitude_to_threshold_db, py::arg("y"),
          py::arg("normalization"));

    // Special functions.
    m.def("gamma_upper_zero", &gamma_upper_zero, py::arg("x"),
          "Upper incomplete gamma of order zero (the exponential integral E1).");
    m.def("bessel_k1", &bessel_k1, py::arg("x"));
    m.def(
        "product_exp_cdf",
        [](double z, int n, double rel_tol) {
            CdfEvalOptions opts;
            opts.rel_tol = rel_tol;
            return product_exp_cdf(z, n, opts);
        },
        py::arg("z"), py::arg("n"), py::arg("rel_tol") = 1e-9,
        "CDF of the product of n unit-mean exponential variables at z.");
    m.def(
        "cdf_product_rayleigh",
        [](double y, const CascadeSpec& c, double rel_tol) {
            CdfEvalOptions opts;
            opts.rel_tol = rel_tol;
            return cdf_product_rayleigh(y, c, opts);
        },
        py::arg("y"), py::arg("cascade"), py::arg("rel_tol") = 1e-9);

    // Analytic rates.
    m.def("rayleigh_lcr", &rayleigh_lcr, py::arg("omega"), py::arg("f1"), py::arg("y"));
    m.def("laplace_lcr", &laplace_lcr, py::arg("cascade"), py::arg("y"));
    m.def(
        "laplace_afd",
        [](const CascadeSpec& c, double y) { return laplace_afd(c, y); }, py::arg("cascade"),
        py::arg("y"));
    m.def("lcr_critical_point", &lcr_critical_point, py::arg("cascade"), py::arg("y"));

    // Direct integration.
    m.def(
        "exact_lcr",
        [](const CascadeSpec& c, double y, double rel_tol) {
            QuadratureSpec q;
            q.rel_tol = rel_tol;
            return exact_lcr(c, y, q);
        },
        py::arg("cascade"), py::arg("y"), py::arg("rel_tol") = 1e-7);
    m.def(
        "exact_afd",
        [](const CascadeSpec& c, double y, double rel_tol) {
            QuadratureSpec q;
            q.rel_tol = rel_tol;
            return exact_afd(c, y, q);
        },
        py::arg("cascade"), py::arg("y"), py::arg("rel_tol") = 1e-7);

    // Simulation.
    py::class_<TraceSpec>(m, "TraceSpec")
        .def(py::init<>())
        .def(py::init([](double sample_rate, double duration, std::uint64_t seed,
                         int oscillators) {
                 TraceSpec t;
                 t.sample_rate = sample_rate;
                 t.duration = duration;
                 t.seed = seed;
                 t.oscillators = oscillators;
                 return t;
             }),
             py::arg("sample_rate"), py::arg("duration"), py::arg("seed") = 1,
             py::arg("oscillators") = 32)
        .def_readwrite("sample_rate", &TraceSpec::sample_rate)
        .def_readwrite("duration", &TraceSpec::duration)
        .def_readwrite("seed", &TraceSpec::seed)
        .def_readwrite("oscillators", &TraceSpec::oscillators)
        .def("validate", &TraceSpec::validate);

    py::class_<FadingTrace>(m, "FadingTrace")
        .def_readonly("sample_rate", &FadingTrace::sample_rate)
        .def_readonly("samples", &FadingTrace::samples)
        .def("duration", &FadingTrace::duration);

    py::class_<SimEstimate>(m, "SimEstimate")
        .def_readonly("threshold", &SimEstimate::threshold)
        .def_readonly("crossings", &SimEstimate::crossings)
        .def_readonly("time_below", &SimEstimate::time_below)
        .def_readonly("lcr", &SimEstimate::lcr)
        .def_readonly("afd", &SimEstimate::afd)
        .def_readonly("lcr_se", &SimEstimate::lcr_se)
        .def_readonly("afd_se", &SimEstimate::afd_se)
        .def_readonly("duration", &SimEstimate::duration)
        .def_readonly("mean_power", &SimEstimate::mean_power);

    m.def("default_sample_rate", &default_sample_rate, py::arg("cascade"));
    m.def("derive_stream_seed", &derive_stream_seed, py::arg("master"), py::arg("index"));
    m.def("gen_f2m_trace", &gen_f2m_trace, py::arg("omega"), py::arg("fm"), py::arg("spec"));
    m.def("gen_m2m_trace", &gen_m2m_trace, py::arg("omega"), py::arg("fm_tx"),
          py::arg("fm_rx"), py::arg("spec"));
    m.def("cascade_trace", &cascade_trace, py::arg("cascade"), py::arg("spec"));
    m.def("estimate_lcr_afd", &estimate_lcr_afd, py::arg("trace"), py::arg("grid"));
    m.def("estimate_cascade_taps", &estimate_cascade_taps, py::arg("cascade"),
          py::arg("taps"), py::arg("grids"), py::arg("spec"), py::arg("n_blocks") = 1);

    // Scenario plumbing.
    py::class_<ScenarioConfig>(m, "ScenarioConfig")
        .def(py::init<>())
        .def_readwrite("name", &ScenarioConfig::name)
        .def_readwrite("cascade", &ScenarioConfig::cascade)
        .def_readwrite("grid_lo_db", &ScenarioConfig::grid_lo_db)
        .def_readwrite("grid_hi_db", &ScenarioConfig::grid_hi_db)
        .def_readwrite("grid_step_db", &ScenarioConfig::grid_step_db)
        .def_readwrite("methods", &ScenarioConfig::methods)
        .def_readwrite("duration", &ScenarioConfig::duration)
        .def_readwrite("sample_rate", &ScenarioConfig::sample_rate)
        .def_readwrite("seed", &ScenarioConfig::seed)
        .def_readwrite("oscillators", &ScenarioConfig::oscillators)
        .def_readwrite("fm_ref", &ScenarioConfig::fm_ref)
        .def("grid", &ScenarioConfig::grid)
        .def("resolve_fm_ref", &ScenarioConfig::resolve_fm_ref);

    py::class_<CurveRow>(m, "CurveRow")
        .def_readonly("threshold_db", &CurveRow::threshold_db)
        .def_readonly("threshold_lin", &CurveRow::threshold_lin)
        .def_readonly("lcr_normalized", &CurveRow::lcr_normalized)
        .def_readonly("afd_normalized", &CurveRow::afd_normalized)
        .def_readonly("lcr_se_normalized", &CurveRow::lcr_se_normalized)
        .def_readonly("afd_se_normalized", &CurveRow::afd_se_normalized)
        .def_readonly("method", &CurveRow::method);

    m.def("parse_scenario_string", &parse_scenario_string, py::arg("text"), py::arg("name"));
    m.def("load_scenario_file", &load_scenario_file, py::arg("path"));
    m.def("compute_curve", &compute_curve, py::arg("config"), py::arg("method"));
    m.def("compute_curves", &compute_curves, py::arg("config"), py::arg("methods"));
    m.def(
        "curve_csv",
        [](const std::vector<CurveRow>& rows) {
            std::ostringstream out;
            write_curve_csv(rows, out);
            return out.str();
        },
        py::arg("rows"));

    py::class_<FigureSpec>(m, "FigureSpec")
        .def_readonly("id", &FigureSpec::id)
        .def_readonly("is_lcr", &FigureSpec::is_lcr)
        .def_readonly("hop_snr_db", &FigureSpec::hop_snr_db);

    py::class_<FigureTapCurve>(m, "FigureTapCurve")
        .def_readonly("n_hops", &FigureTapCurve::n_hops)
        .def_readonly("threshold_db", &FigureTapCurve::threshold_db)
        .def_readonly("threshold_lin", &FigureTapCurve::threshold_lin)
        .def_readonly("analytic", &FigureTapCurve::analytic)
        .def_readonly("simulated", &FigureTapCurve::simulated)
        .def_readonly("simulated_se", &FigureTapCurve::simulated_se);

    py::class_<FigureResult>(m, "FigureResult")
        .def_readonly("spec", &FigureResult::spec)
        .def_readonly("fm", &FigureResult::fm)
        .def_readonly("curves", &FigureResult::curves);

    m.def("figure_spec", &figure_spec, py::arg("figure_id"));
    m.def("figure_cascade", &figure_cascade, py::arg("spec"), py::arg("fm"));
    m.def("truncate_cascade", &truncate_cascade, py::arg("cascade"), py::arg("n_hops"));
    m.def("compute_figure", &compute_figure, py::arg("figure_id"), py::arg("fm"),
          py::arg("duration"), py::arg("seed"), py::arg("lo_db"), py::arg("hi_db"),
          py::arg("step_db"), py::arg("oscillators") = 32);
    m.def("write_figure_csvs", &write_figure_csvs, py::arg("result"), py::arg("out_dir"));
}
