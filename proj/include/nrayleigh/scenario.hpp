#pragma once
// Scenario plumbing: the flat key-value scenario file format, curve
// computation by any method with normalized columns, the built-in
// published figure scenarios (semi-blind five-hop relay chain observed
// at three tap points), and atomic CSV emission.

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "nrayleigh/core.hpp"
#include "nrayleigh/simulator.hpp"

namespace nray {

/// Parse error carrying the scenario name and 1-based line number.
class ScenarioParseError : public std::runtime_error {
  public:
    ScenarioParseError(const std::string& name, int line, const std::string& what)
        : std::runtime_error(name + ":" + std::to_string(line) + ": " + what),
          line_number(line) {}
    int line_number;
};

/// A fully resolved scenario: cascade, grid, methods, and simulation
/// settings.  Defaults: unit per-hop power, unity gains (semi-blind when
/// mean SNRs are given), grid -30..+10 dB step 0.5, laplace method,
/// automatic sample rate and duration, seed 1, 32 oscillators.
struct ScenarioConfig {
    std::string name = "scenario";
    CascadeSpec cascade;
    double grid_lo_db = -30.0;
    double grid_hi_db = 10.0;
    double grid_step_db = 0.5;
    std::vector<Method> methods{Method::Laplace};
    double duration = 0.0;      ///< seconds; 0 = auto (2000 fade cycles)
    double sample_rate = 0.0;   ///< Hz; 0 = auto (default_sample_rate)
    std::uint64_t seed = 1;
    int oscillators = 32;
    double fm_ref = 0.0;        ///< Hz; 0 = derive (common mobile Doppler)

    /// Threshold grid in amplitude units, normalized so that 0 dB is the
    /// square root of the first hop's nominal mean power.
    ThresholdGrid grid() const;

    /// Normalization Doppler: fm_ref if set, else the common mobile-node
    /// Doppler shift (error if the mobile nodes disagree).
    double resolve_fm_ref() const;

    /// Simulation parameters with the automatic defaults resolved.
    TraceSpec trace_spec() const;
};

/// Parse the flat key-value scenario grammar (see README): `key = value`
/// lines, `#` comments, space-separated arrays.  Errors carry 1-based
/// line numbers.
ScenarioConfig parse_scenario(std::istream& in, const std::string& name);
ScenarioConfig parse_scenario_string(const std::string& text, const std::string& name);
ScenarioConfig load_scenario_file(const std::string& path);

/// Parse "lo_db:hi_db:step_db" (used by the grid file key and the
/// --grid flag); throws std::invalid_argument on malformed input.
void parse_grid_spec(const std::string& text, double& lo_db, double& hi_db, double& step_db);

/// One emitted curve row.  Normalized columns divide the LCR by fm_ref
/// and multiply the AFD by fm_ref.  SE columns are NaN for analytic
/// methods.
struct CurveRow {
    double threshold_db = 0.0;
    double threshold_lin = 0.0;
    double lcr_normalized = 0.0;
    double afd_normalized = 0.0;
    double lcr_se_normalized = 0.0;
    double afd_se_normalized = 0.0;
    Method method = Method::Laplace;
};

/// Compute the scenario's curve with one method.  Exact integration is
/// limited to cascades of two to four hops and refuses longer ones.
std::vector<CurveRow> compute_curve(const ScenarioConfig& config, Method method);

/// Expand `all` / the scenario's method list into concrete rows, one
/// method after another (identical threshold columns per method).
std::vector<CurveRow> compute_curves(const ScenarioConfig& config,
                                     const std::vector<Method>& methods);

/// `threshold_db,threshold_lin,lcr_normalized,afd_normalized,method`
void write_curve_csv(const std::vector<CurveRow>& rows, std::ostream& out);

/// CDF rows `threshold_db,threshold_lin,cdf` for the scenario cascade.
void write_cdf_csv(const ScenarioConfig& config, std::ostream& out);

// ---------------------------------------------------------------------
// Published figure scenarios: source, four fixed-gain semi-blind relays,
// fixed destination; every node except the destination moves with the
// same maximum Doppler shift fm.  Curves are observed at taps after 2,
// 3, and 5 hops.  Figures 2/3 use equal 5 dB mean SNR per hop, 4/5 equal
// 20 dB, 6/7 the mixed set {0, 10, 15, 15, 20} dB; even figure ids plot
// LCR, odd ids AFD.
// ---------------------------------------------------------------------

struct FigureSpec {
    int id = 2;
    bool is_lcr = true;
    std::vector<double> hop_snr_db;  ///< five per-hop mean SNRs
};

/// Figure id -> scenario description (throws on ids outside 2..7).
FigureSpec figure_spec(int figure_id);

/// The five-hop cascade of a figure scenario at mobile Doppler fm.
CascadeSpec figure_cascade(const FigureSpec& spec, double fm);

/// First `n_hops` hops of a cascade as a standalone cascade (gains and
/// node Doppler list truncated consistently).
CascadeSpec truncate_cascade(const CascadeSpec& cascade, std::size_t n_hops);

struct FigureTapCurve {
    std::size_t n_hops = 0;
    std::vector<double> threshold_db;
    std::vector<double> threshold_lin;
    std::vector<double> analytic;      ///< Laplace metric, normalized
    std::vector<double> simulated;     ///< simulated metric, normalized
    std::vector<double> simulated_se;  ///< block standard error, normalized
};

struct FigureResult {
    FigureSpec spec;
    double fm = 0.0;
    std::vector<FigureTapCurve> curves;  ///< taps N = 2, 3, 5
};

/// Compute one figure's three tap curves: Laplace closed form plus one
/// streaming simulation tapped at 2/3/5 hops (16 SE blocks).
FigureResult compute_figure(int figure_id, double fm, double duration, std::uint64_t seed,
                            double lo_db, double hi_db, double step_db,
                            int oscillators = 32);

/// figure<id>_n<hops>.csv
std::string figure_csv_name(int figure_id, std::size_t n_hops);

/// Write the three per-tap CSVs (columns threshold_db, threshold_lin,
/// <metric>_norm_laplace, <metric>_norm_sim, <metric>_sim_se) atomically
/// into out_dir; returns the written paths.
std::vector<std::string> write_figure_csvs(const FigureResult& result,
                                           const std::string& out_dir);

/// Write `content` to `path` via a temp file + rename (atomic on POSIX).
void write_file_atomic(const std::string& path, const std::string& content);

}  // namespace nray
