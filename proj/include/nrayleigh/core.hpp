#pragma once
// Domain types and derived channel parameters for cascaded (multihop)
// Rayleigh fading: per-hop Doppler environments, relay gain resolution,
// effective powers, and the scalar aggregates used by every other module.

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace nray {

// ---------------------------------------------------------------- Doppler

/// Doppler environment of a single hop: either one terminal moves
/// (FixedToMobile) or both do (MobileToMobile).
struct DopplerSpec {
    enum class Kind { FixedToMobile, MobileToMobile };

    Kind kind = Kind::FixedToMobile;
    double fm_tx = 0.0;  ///< max Doppler of the (first) mobile terminal, Hz
    double fm_rx = 0.0;  ///< max Doppler of the second terminal (MobileToMobile only), Hz

    static DopplerSpec fixed_to_mobile(double fm);
    static DopplerSpec mobile_to_mobile(double fm_tx, double fm_rx);

    /// Throws std::invalid_argument on negative or non-finite frequencies.
    void validate() const;
};

/// Effective Doppler frequency f of one hop: fm for FixedToMobile,
/// sqrt(fm_tx^2 + fm_rx^2) for MobileToMobile.
double effective_doppler(const DopplerSpec& d);

/// Largest instantaneous Doppler shift the hop can produce: fm for
/// FixedToMobile, fm_tx + fm_rx for MobileToMobile.  Sets simulator
/// bandwidth and sampling requirements.
double max_doppler(const DopplerSpec& d);

/// Variance of the envelope time-derivative for a hop with mean power
/// `omega` and effective Doppler `f`:  pi^2 * omega * f^2.
double derivative_variance(double omega, double f);

// ------------------------------------------------------------------- hops

/// One hop of the cascade.  `doppler` is set in per-hop mode and left
/// empty when the owning cascade carries a node Doppler list instead.
/// `noise_variance` is required only when relay gains derive from SNR.
struct HopSpec {
    double omega_hat = 1.0;                 ///< mean fading power, > 0
    std::optional<DopplerSpec> doppler;     ///< per-hop Doppler (one input mode)
    std::optional<double> noise_variance;   ///< receiver noise power, > 0

    /// Mean SNR omega_hat / noise_variance; throws std::invalid_argument
    /// when no noise variance was provided.
    double mean_snr() const;
};

// ------------------------------------------------------------ relay gains

/// Amplification applied by the node feeding a hop.  Unity is mandatory
/// for the source; FixedC resolves as G^2 = 1 / (c * W0) against the
/// previous hop's noise variance; SemiBlind matches the mean-power
/// inversion gain of a fixed-gain relay; Explicit pins the amplitude.
struct RelayGainSpec {
    enum class Mode { Unity, FixedC, SemiBlind, Explicit };

    Mode mode = Mode::Unity;
    double value = 0.0;  ///< C for FixedC, amplitude gain for Explicit

    static RelayGainSpec unity();
    static RelayGainSpec fixed_c(double c);
    static RelayGainSpec semi_blind();
    static RelayGainSpec explicit_gain(double g);
};

/// Squared semi-blind relay gain (1/omega_hat) * exp(1/snr) * E1(1/snr),
/// where E1 is the upper incomplete gamma of order zero and both
/// parameters describe the hop feeding the relay.
double semi_blind_gain_sq(double mean_snr, double omega_hat);

// ---------------------------------------------------------------- cascade

/// A chain of N hops with the N relay/source gains that precede them.
/// Doppler comes in exactly one of two modes: every hop carries its own
/// DopplerSpec, or `node_dopplers` lists the N+1 node maximum Doppler
/// shifts (source, relays, destination) and hop i composes as
/// f_i^2 = f_node(i-1)^2 + f_node(i)^2.
struct CascadeSpec {
    std::vector<HopSpec> hops;              ///< length N >= 1
    std::vector<RelayGainSpec> gains;       ///< length N, gains[0] Unity
    std::vector<double> node_dopplers;      ///< length N+1 when used, else empty

    std::size_t size() const { return hops.size(); }

    /// Throws std::invalid_argument describing the first violated rule.
    void validate() const;
};

/// Doppler environment of hop `i` (0-based), resolving either input mode.
DopplerSpec hop_doppler(const CascadeSpec& c, std::size_t i);

/// Resolved amplitude gain G_i preceding hop i (0-based); G_0 = 1.
double resolved_gain(const CascadeSpec& c, std::size_t i);

/// Effective per-hop powers Omega_i = omega_hat_i * G_{i-1}^2.
std::vector<double> effective_powers(const CascadeSpec& c);

/// Effective per-hop Doppler frequencies f_i.
std::vector<double> effective_dopplers(const CascadeSpec& c);

/// Product of effective powers.
double phi(const std::vector<double>& omegas);
double phi(const CascadeSpec& c);

/// Sum of squared effective hop Dopplers, composed from a node Doppler
/// list (f_node0^2 + 2*sum of interior^2 + f_nodeN^2) ...
double doppler_sum_sq(const std::vector<double>& node_dopplers);
/// ... or accumulated over the cascade's resolved hops.
double doppler_sum_sq(const CascadeSpec& c);

// ------------------------------------------------------- thresholds/curves

/// Strictly increasing positive amplitude thresholds plus the reference
/// power used to display them in dB (20*log10(y/sqrt(normalization))).
struct ThresholdGrid {
    std::vector<double> values;
    double normalization = 1.0;

    void validate() const;

    /// Build from an inclusive dB range; throws on a non-positive step or
    /// an empty range.
    static ThresholdGrid from_db_range(double lo_db, double hi_db, double step_db,
                                       double normalization = 1.0);
};

enum class Method { Exact, Laplace, Simulated };

/// Canonical lowercase tag: "exact", "laplace", "simulated".
const char* method_name(Method m);

/// One threshold row of a second-order statistics curve.  `afd` is NaN
/// when undefined (no crossings observed / rate identically zero).
struct CurvePoint {
    double threshold = 0.0;  ///< linear amplitude
    double lcr = 0.0;        ///< crossings per second
    double afd = 0.0;        ///< seconds, NaN when lcr == 0
};

struct SecondOrderCurve {
    Method method = Method::Exact;
    std::vector<CurvePoint> points;
};

// ------------------------------------------------------------ dB helpers

/// Power ratio from dB: 10^(db/10).
double snr_db_to_linear(double db);

/// Amplitude threshold from its dB position relative to a reference
/// power: 10^(db/20) * sqrt(normalization).
double threshold_db_to_amplitude(double db, double normalization);

/// Inverse of threshold_db_to_amplitude.
double amplitude_to_threshold_db(double y, double normalization);

}  // namespace nray
