#include "nrayleigh/scenario.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include "nrayleigh/analytic.hpp"
#include "nrayleigh/exact.hpp"
#include "nrayleigh/specialfn.hpp"

namespace nray {

namespace {

namespace fs = std::filesystem;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_ws(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream in(s);
    std::string tok;
    while (in >> tok) out.push_back(tok);
    return out;
}

std::string fmt(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

/// Inclusive dB grid lo, lo+step, ..., hi (tolerant endpoint).
std::vector<double> db_points(double lo, double hi, double step) {
    if (!(step > 0.0) || !std::isfinite(step)) {
        throw std::invalid_argument("grid: step must be > 0");
    }
    if (!(hi >= lo) || !std::isfinite(lo) || !std::isfinite(hi)) {
        throw std::invalid_argument("grid: need hi_db >= lo_db");
    }
    const double span = (hi - lo) / step;
    if (span > 200000.0) throw std::invalid_argument("grid: more than 200000 points");
    const auto n = static_cast<std::size_t>(std::floor(span + 1e-9)) + 1;
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = lo + static_cast<double>(i) * step;
    return out;
}

const std::set<std::string> kKnownKeys = {
    "hops",         "omega_hat",   "snr_db",        "noise_w0",   "gains",
    "gain_values",  "c_values",    "node_doppler_hz", "node_mobility",
    "grid_db",      "methods",     "duration_s",    "sample_rate_hz",
    "seed",         "oscillators", "fm_ref_hz",
};

struct RawEntry {
    std::string value;
    int line = 0;
};

class Parser {
  public:
    Parser(std::istream& in, std::string name) : name_(std::move(name)) {
        std::string line;
        int ln = 0;
        while (std::getline(in, line)) {
            ++ln;
            const auto hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            const std::string t = trim(line);
            if (t.empty()) continue;
            const auto eq = t.find('=');
            if (eq == std::string::npos) {
                throw ScenarioParseError(name_, ln, "expected `key = value`");
            }
            const std::string key = trim(t.substr(0, eq));
            const std::string value = trim(t.substr(eq + 1));
            if (key.empty()) throw ScenarioParseError(name_, ln, "empty key");
            if (value.empty()) {
                throw ScenarioParseError(name_, ln, "empty value for key `" + key + "`");
            }
            if (!kKnownKeys.count(key)) {
                throw ScenarioParseError(name_, ln, "unknown key `" + key + "`");
            }
            const auto [it, fresh] = entries_.emplace(key, RawEntry{value, ln});
            if (!fresh) {
                throw ScenarioParseError(
                    name_, ln,
                    "duplicate key `" + key + "` (first at line " +
                        std::to_string(it->second.line) + ")");
            }
        }
    }

    ScenarioConfig build() {
        ScenarioConfig cfg;
        cfg.name = name_;

        const int n_hops = get_int("hops", 1, 64);
        const auto n = static_cast<std::size_t>(n_hops);

        std::vector<double> omega(n, 1.0);
        if (has("omega_hat")) {
            omega = get_doubles("omega_hat", n);
            require_positive("omega_hat", omega);
        }

        std::vector<double> noise;  // per-hop noise variance, empty if unknown
        if (has("snr_db") && has("noise_w0")) {
            fail("snr_db", "give snr_db or noise_w0, not both");
        }
        if (has("snr_db")) {
            const auto snr_db = get_doubles("snr_db", n);
            noise.resize(n);
            for (std::size_t i = 0; i < n; ++i) {
                noise[i] = omega[i] / snr_db_to_linear(snr_db[i]);
            }
        } else if (has("noise_w0")) {
            noise = get_doubles("noise_w0", n);
            require_positive("noise_w0", noise);
        }

        const auto dopplers = get_doubles("node_doppler_hz", n + 1);
        for (double d : dopplers) {
            if (!(d >= 0.0) || !std::isfinite(d)) {
                fail("node_doppler_hz", "node Doppler shifts must be >= 0");
            }
        }
        if (has("node_mobility")) {
            const auto toks = split_ws(entries_.at("node_mobility").value);
            if (toks.size() != n + 1) {
                fail("node_mobility", "expected " + std::to_string(n + 1) + " flags");
            }
            for (std::size_t i = 0; i < toks.size(); ++i) {
                bool mobile;
                if (toks[i] == "mobile" || toks[i] == "m") {
                    mobile = true;
                } else if (toks[i] == "fixed" || toks[i] == "f") {
                    mobile = false;
                } else {
                    fail("node_mobility", "flag `" + toks[i] + "` is not fixed/mobile");
                    return cfg;  // unreachable
                }
                if (mobile != (dopplers[i] > 0.0)) {
                    fail("node_mobility",
                         "node " + std::to_string(i) + " flagged " + toks[i] +
                             " but its Doppler shift is " + fmt(dopplers[i]) + " Hz");
                }
            }
        }

        std::string gains_mode = noise.empty() ? "unity" : "semiblind";
        if (has("gains")) {
            gains_mode = entries_.at("gains").value;
            if (gains_mode != "unity" && gains_mode != "semiblind" &&
                gains_mode != "explicit" && gains_mode != "fixedc") {
                fail("gains", "must be unity, semiblind, explicit, or fixedc");
            }
        }
        if (has("gain_values") && gains_mode != "explicit") {
            fail("gain_values", "only meaningful with gains = explicit");
        }
        if (has("c_values") && gains_mode != "fixedc") {
            fail("c_values", "only meaningful with gains = fixedc");
        }
        if ((gains_mode == "semiblind" || gains_mode == "fixedc") && noise.empty()) {
            fail("gains", gains_mode + " gains need snr_db or noise_w0");
        }

        std::vector<RelayGainSpec> gains(n, RelayGainSpec::unity());
        if (gains_mode == "semiblind") {
            for (std::size_t i = 1; i < n; ++i) gains[i] = RelayGainSpec::semi_blind();
        } else if (gains_mode == "explicit") {
            const auto values = get_doubles("gain_values", n);
            if (values[0] != 1.0) fail("gain_values", "the source gain must be 1");
            for (std::size_t i = 1; i < n; ++i) {
                if (!(values[i] > 0.0)) fail("gain_values", "gains must be > 0");
                gains[i] = RelayGainSpec::explicit_gain(values[i]);
            }
        } else if (gains_mode == "fixedc") {
            const auto values = get_doubles("c_values", n);
            if (values[0] != 1.0) fail("c_values", "the source constant must be 1");
            for (std::size_t i = 1; i < n; ++i) {
                if (!(values[i] > 0.0)) fail("c_values", "constants must be > 0");
                gains[i] = RelayGainSpec::fixed_c(values[i]);
            }
        }

        cfg.cascade.hops.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            cfg.cascade.hops[i].omega_hat = omega[i];
            if (!noise.empty()) cfg.cascade.hops[i].noise_variance = noise[i];
        }
        cfg.cascade.gains = std::move(gains);
        cfg.cascade.node_dopplers = dopplers;
        cfg.cascade.validate();

        if (has("grid_db")) {
            try {
                parse_grid_spec(entries_.at("grid_db").value, cfg.grid_lo_db, cfg.grid_hi_db,
                                cfg.grid_step_db);
            } catch (const std::exception& e) {
                fail("grid_db", e.what());
            }
        }

        if (has("methods")) {
            cfg.methods.clear();
            for (const auto& tok : split_ws(entries_.at("methods").value)) {
                if (tok == "exact") {
                    push_method(cfg.methods, Method::Exact);
                } else if (tok == "laplace") {
                    push_method(cfg.methods, Method::Laplace);
                } else if (tok == "simulate" || tok == "simulated") {
                    push_method(cfg.methods, Method::Simulated);
                } else if (tok == "all") {
                    if (n <= 4) push_method(cfg.methods, Method::Exact);
                    push_method(cfg.methods, Method::Laplace);
                    push_method(cfg.methods, Method::Simulated);
                } else {
                    fail("methods", "unknown method `" + tok + "`");
                }
            }
        }

        if (has("duration_s")) {
            cfg.duration = get_double("duration_s");
            if (!(cfg.duration > 0.0)) fail("duration_s", "must be > 0");
        }
        if (has("sample_rate_hz")) {
            cfg.sample_rate = get_double("sample_rate_hz");
            if (!(cfg.sample_rate > 0.0)) fail("sample_rate_hz", "must be > 0");
        }
        if (has("seed")) cfg.seed = get_uint64("seed");
        if (has("oscillators")) cfg.oscillators = get_int("oscillators", 2, 4096);
        if (has("fm_ref_hz")) {
            cfg.fm_ref = get_double("fm_ref_hz");
            if (!(cfg.fm_ref > 0.0)) fail("fm_ref_hz", "must be > 0");
        }
        return cfg;
    }

  private:
    bool has(const std::string& key) const { return entries_.count(key) != 0; }

    [[noreturn]] void fail(const std::string& key, const std::string& msg) const {
        const int line = has(key) ? entries_.at(key).line : 0;
        throw ScenarioParseError(name_, line, "key `" + key + "`: " + msg);
    }

    double parse_one_double(const std::string& tok, const std::string& key) const {
        char* end = nullptr;
        const double v = std::strtod(tok.c_str(), &end);
        if (end != tok.c_str() + tok.size() || !std::isfinite(v)) {
            fail(key, "`" + tok + "` is not a finite number");
        }
        return v;
    }

    double get_double(const std::string& key) const {
        const auto toks = split_ws(entries_.at(key).value);
        if (toks.size() != 1) fail(key, "expected a single number");
        return parse_one_double(toks[0], key);
    }

    std::vector<double> get_doubles(const std::string& key, std::size_t expect) const {
        if (!has(key)) {
            throw ScenarioParseError(name_, 0, "missing required key `" + key + "`");
        }
        const auto toks = split_ws(entries_.at(key).value);
        if (toks.size() != expect) {
            fail(key, "expected " + std::to_string(expect) + " values, got " +
                          std::to_string(toks.size()));
        }
        std::vector<double> out;
        out.reserve(toks.size());
        for (const auto& t : toks) out.push_back(parse_one_double(t, key));
        return out;
    }

    void require_positive(const std::string& key, const std::vector<double>& v) const {
        for (double x : v) {
            if (!(x > 0.0)) fail(key, "values must be > 0");
        }
    }

    int get_int(const std::string& key, int lo, int hi) const {
        if (!has(key)) {
            throw ScenarioParseError(name_, 0, "missing required key `" + key + "`");
        }
        const double v = get_double(key);
        if (v != std::floor(v) || v < lo || v > hi) {
            fail(key, "expected an integer in [" + std::to_string(lo) + ", " +
                          std::to_string(hi) + "]");
        }
        return static_cast<int>(v);
    }

    std::uint64_t get_uint64(const std::string& key) const {
        const auto toks = split_ws(entries_.at(key).value);
        if (toks.size() != 1) fail(key, "expected a single integer");
        const std::string& tok = toks[0];
        if (tok.empty() || tok.find_first_not_of("0123456789") != std::string::npos) {
            fail(key, "`" + tok + "` is not an unsigned integer");
        }
        errno = 0;
        char* end = nullptr;
        const unsigned long long v = std::strtoull(tok.c_str(), &end, 10);
        if (errno != 0 || end != tok.c_str() + tok.size()) {
            fail(key, "`" + tok + "` is out of range");
        }
        return static_cast<std::uint64_t>(v);
    }

    static void push_method(std::vector<Method>& methods, Method m) {
        if (std::find(methods.begin(), methods.end(), m) == methods.end()) {
            methods.push_back(m);
        }
    }

    std::string name_;
    std::map<std::string, RawEntry> entries_;
};

}  // namespace

ThresholdGrid ScenarioConfig::grid() const {
    ThresholdGrid g;
    if (cascade.hops.empty()) throw std::invalid_argument("scenario has no hops");
    g.normalization = cascade.hops.front().omega_hat;
    for (double db : db_points(grid_lo_db, grid_hi_db, grid_step_db)) {
        g.values.push_back(threshold_db_to_amplitude(db, g.normalization));
    }
    g.validate();
    return g;
}

double ScenarioConfig::resolve_fm_ref() const {
    if (fm_ref > 0.0) return fm_ref;
    std::vector<double> mobile;
    if (!cascade.node_dopplers.empty()) {
        for (double d : cascade.node_dopplers) {
            if (d > 0.0) mobile.push_back(d);
        }
    } else {
        for (std::size_t i = 0; i < cascade.size(); ++i) {
            const DopplerSpec d = hop_doppler(cascade, i);
            if (d.fm_tx > 0.0) mobile.push_back(d.fm_tx);
            if (d.kind == DopplerSpec::Kind::MobileToMobile && d.fm_rx > 0.0) {
                mobile.push_back(d.fm_rx);
            }
        }
    }
    if (mobile.empty()) {
        throw std::invalid_argument(
            "normalization Doppler undefined: no mobile nodes; set fm_ref_hz");
    }
    const double common = mobile.front();
    for (double d : mobile) {
        if (std::fabs(d - common) > 1e-9 * common) {
            throw std::invalid_argument(
                "normalization Doppler ambiguous: mobile Doppler shifts differ; set "
                "fm_ref_hz");
        }
    }
    return common;
}

TraceSpec ScenarioConfig::trace_spec() const {
    TraceSpec t;
    t.sample_rate = sample_rate > 0.0 ? sample_rate : default_sample_rate(cascade);
    if (duration > 0.0) {
        t.duration = duration;
    } else {
        double min_eff = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < cascade.size(); ++i) {
            min_eff = std::min(min_eff, effective_doppler(hop_doppler(cascade, i)));
        }
        if (!(min_eff > 0.0)) {
            throw std::invalid_argument(
                "cannot pick an automatic duration for a cascade with a static hop; set "
                "duration_s");
        }
        t.duration = 2000.0 / min_eff;  // ~2000 fade cycles of the slowest hop
    }
    t.seed = seed;
    t.oscillators = oscillators;
    return t;
}

ScenarioConfig parse_scenario(std::istream& in, const std::string& name) {
    Parser p(in, name);
    return p.build();
}

ScenarioConfig parse_scenario_string(const std::string& text, const std::string& name) {
    std::istringstream in(text);
    return parse_scenario(in, name);
}

ScenarioConfig load_scenario_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open scenario file: " + path);
    return parse_scenario(in, path);
}

void parse_grid_spec(const std::string& text, double& lo_db, double& hi_db, double& step_db) {
    const auto c1 = text.find(':');
    const auto c2 = c1 == std::string::npos ? std::string::npos : text.find(':', c1 + 1);
    if (c1 == std::string::npos || c2 == std::string::npos ||
        text.find(':', c2 + 1) != std::string::npos) {
        throw std::invalid_argument("grid spec must be lo_db:hi_db:step_db");
    }
    const std::string parts[3] = {trim(text.substr(0, c1)),
                                  trim(text.substr(c1 + 1, c2 - c1 - 1)),
                                  trim(text.substr(c2 + 1))};
    double vals[3];
    for (int i = 0; i < 3; ++i) {
        char* end = nullptr;
        vals[i] = std::strtod(parts[i].c_str(), &end);
        if (parts[i].empty() || end != parts[i].c_str() + parts[i].size() ||
            !std::isfinite(vals[i])) {
            throw std::invalid_argument("grid spec: `" + parts[i] + "` is not a number");
        }
    }
    db_points(vals[0], vals[1], vals[2]);  // validates range/step
    lo_db = vals[0];
    hi_db = vals[1];
    step_db = vals[2];
}

std::vector<CurveRow> compute_curve(const ScenarioConfig& config, Method method) {
    const CascadeSpec& c = config.cascade;
    c.validate();
    const auto dbs = db_points(config.grid_lo_db, config.grid_hi_db, config.grid_step_db);
    const ThresholdGrid grid = config.grid();
    const double fm = config.resolve_fm_ref();

    std::vector<CurveRow> rows;
    rows.reserve(dbs.size());

    if (method == Method::Simulated) {
        const auto est = estimate_cascade_taps(c, {c.size()}, {grid}, config.trace_spec(), 16);
        const SimEstimate& e = est.front();
        for (std::size_t j = 0; j < dbs.size(); ++j) {
            CurveRow row;
            row.threshold_db = dbs[j];
            row.threshold_lin = grid.values[j];
            row.lcr_normalized = e.lcr[j] / fm;
            row.afd_normalized = e.afd[j] * fm;
            row.lcr_se_normalized = e.lcr_se[j] / fm;
            row.afd_se_normalized = e.afd_se[j] * fm;
            row.method = method;
            rows.push_back(row);
        }
        return rows;
    }

    for (std::size_t j = 0; j < dbs.size(); ++j) {
        const double y = grid.values[j];
        double lcr;
        if (method == Method::Exact) {
            // One hop has a closed form that the approximation reproduces
            // exactly, so "exact" is honored there without the tensor rule.
            lcr = c.size() == 1 ? laplace_lcr(c, y) : exact_lcr(c, y);
        } else {
            lcr = laplace_lcr(c, y);
        }
        const double cdf = cdf_product_rayleigh(y, c);
        CurveRow row;
        row.threshold_db = dbs[j];
        row.threshold_lin = y;
        row.lcr_normalized = lcr / fm;
        row.afd_normalized = (cdf / lcr) * fm;
        row.lcr_se_normalized = kNaN;
        row.afd_se_normalized = kNaN;
        row.method = method;
        rows.push_back(row);
    }
    return rows;
}

std::vector<CurveRow> compute_curves(const ScenarioConfig& config,
                                     const std::vector<Method>& methods) {
    std::vector<CurveRow> rows;
    for (Method m : methods) {
        auto part = compute_curve(config, m);
        rows.insert(rows.end(), part.begin(), part.end());
    }
    return rows;
}

void write_curve_csv(const std::vector<CurveRow>& rows, std::ostream& out) {
    out << "threshold_db,threshold_lin,lcr_normalized,afd_normalized,method\n";
    for (const auto& r : rows) {
        out << fmt(r.threshold_db) << ',' << fmt(r.threshold_lin) << ','
            << fmt(r.lcr_normalized) << ',' << fmt(r.afd_normalized) << ','
            << method_name(r.method) << '\n';
    }
}

void write_cdf_csv(const ScenarioConfig& config, std::ostream& out) {
    const auto dbs = db_points(config.grid_lo_db, config.grid_hi_db, config.grid_step_db);
    const ThresholdGrid grid = config.grid();
    out << "threshold_db,threshold_lin,cdf\n";
    for (std::size_t j = 0; j < dbs.size(); ++j) {
        out << fmt(dbs[j]) << ',' << fmt(grid.values[j]) << ','
            << fmt(cdf_product_rayleigh(grid.values[j], config.cascade)) << '\n';
    }
}

FigureSpec figure_spec(int figure_id) {
    FigureSpec spec;
    spec.id = figure_id;
    spec.is_lcr = (figure_id % 2) == 0;
    switch (figure_id) {
        case 2:
        case 3:
            spec.hop_snr_db = {5.0, 5.0, 5.0, 5.0, 5.0};
            break;
        case 4:
        case 5:
            spec.hop_snr_db = {20.0, 20.0, 20.0, 20.0, 20.0};
            break;
        case 6:
        case 7:
            spec.hop_snr_db = {0.0, 10.0, 15.0, 15.0, 20.0};
            break;
        default:
            throw std::invalid_argument("unknown figure id (valid ids: 2..7)");
    }
    return spec;
}

CascadeSpec figure_cascade(const FigureSpec& spec, double fm) {
    if (!(fm > 0.0) || !std::isfinite(fm)) {
        throw std::invalid_argument("figure_cascade: fm must be > 0");
    }
    const std::size_t n = spec.hop_snr_db.size();
    CascadeSpec c;
    c.hops.resize(n);
    c.gains.assign(n, RelayGainSpec::unity());
    for (std::size_t i = 0; i < n; ++i) {
        c.hops[i].omega_hat = 1.0;
        c.hops[i].noise_variance = 1.0 / snr_db_to_linear(spec.hop_snr_db[i]);
        if (i > 0) c.gains[i] = RelayGainSpec::semi_blind();
    }
    c.node_dopplers.assign(n + 1, fm);
    c.node_dopplers.back() = 0.0;  // fixed destination
    c.validate();
    return c;
}

CascadeSpec truncate_cascade(const CascadeSpec& cascade, std::size_t n_hops) {
    if (n_hops < 1 || n_hops > cascade.size()) {
        throw std::invalid_argument("truncate_cascade: n_hops out of range");
    }
    CascadeSpec c;
    c.hops.assign(cascade.hops.begin(), cascade.hops.begin() + static_cast<long>(n_hops));
    c.gains.assign(cascade.gains.begin(), cascade.gains.begin() + static_cast<long>(n_hops));
    if (!cascade.node_dopplers.empty()) {
        c.node_dopplers.assign(cascade.node_dopplers.begin(),
                               cascade.node_dopplers.begin() + static_cast<long>(n_hops) + 1);
    }
    c.validate();
    return c;
}

FigureResult compute_figure(int figure_id, double fm, double duration, std::uint64_t seed,
                            double lo_db, double hi_db, double step_db, int oscillators) {
    FigureResult result;
    result.spec = figure_spec(figure_id);
    result.fm = fm;
    const CascadeSpec cascade = figure_cascade(result.spec, fm);

    const auto dbs = db_points(lo_db, hi_db, step_db);
    ThresholdGrid grid;
    grid.normalization = 1.0;
    for (double db : dbs) grid.values.push_back(threshold_db_to_amplitude(db, 1.0));
    grid.validate();

    TraceSpec t;
    t.sample_rate = default_sample_rate(cascade);
    t.duration = duration;
    t.seed = seed;
    t.oscillators = oscillators;

    const std::vector<std::size_t> taps = {2, 3, 5};
    const auto sims = estimate_cascade_taps(cascade, taps, {grid, grid, grid}, t, 16);

    for (std::size_t k = 0; k < taps.size(); ++k) {
        const CascadeSpec sub = truncate_cascade(cascade, taps[k]);
        FigureTapCurve curve;
        curve.n_hops = taps[k];
        curve.threshold_db = dbs;
        curve.threshold_lin = grid.values;
        curve.analytic.resize(dbs.size());
        curve.simulated.resize(dbs.size());
        curve.simulated_se.resize(dbs.size());
        const SimEstimate& e = sims[k];
        for (std::size_t j = 0; j < dbs.size(); ++j) {
            const double y = grid.values[j];
            const double lcr = laplace_lcr(sub, y);
            if (result.spec.is_lcr) {
                curve.analytic[j] = lcr / fm;
                curve.simulated[j] = e.lcr[j] / fm;
                curve.simulated_se[j] = e.lcr_se[j] / fm;
            } else {
                const double cdf = cdf_product_rayleigh(y, sub);
                curve.analytic[j] = (cdf / lcr) * fm;
                curve.simulated[j] = e.afd[j] * fm;
                curve.simulated_se[j] = e.afd_se[j] * fm;
            }
        }
        result.curves.push_back(std::move(curve));
    }
    return result;
}

std::string figure_csv_name(int figure_id, std::size_t n_hops) {
    return "figure" + std::to_string(figure_id) + "_n" + std::to_string(n_hops) + ".csv";
}

std::vector<std::string> write_figure_csvs(const FigureResult& result,
                                           const std::string& out_dir) {
    if (!out_dir.empty()) fs::create_directories(out_dir);
    const std::string metric = result.spec.is_lcr ? "lcr" : "afd";
    std::vector<std::string> paths;
    for (const auto& curve : result.curves) {
        std::ostringstream body;
        body << "threshold_db,threshold_lin," << metric << "_norm_laplace," << metric
             << "_norm_sim," << metric << "_sim_se\n";
        for (std::size_t j = 0; j < curve.threshold_db.size(); ++j) {
            body << fmt(curve.threshold_db[j]) << ',' << fmt(curve.threshold_lin[j]) << ','
                 << fmt(curve.analytic[j]) << ',' << fmt(curve.simulated[j]) << ','
                 << fmt(curve.simulated_se[j]) << '\n';
        }
        const fs::path path =
            fs::path(out_dir.empty() ? "." : out_dir) / figure_csv_name(result.spec.id, curve.n_hops);
        write_file_atomic(path.string(), body.str());
        paths.push_back(path.string());
    }
    return paths;
}

void write_file_atomic(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open for writing: " + tmp);
        out << content;
        out.flush();
        if (!out) throw std::runtime_error("write failed: " + tmp);
    }
    fs::rename(tmp, path);
}

}  // namespace nray
