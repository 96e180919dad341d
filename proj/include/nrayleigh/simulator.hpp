#pragma once
// Time-domain Monte-Carlo machinery: sum-of-sinusoids Rayleigh hop
// generators (single-mobile and dual-mobile variants), the cascaded
// product process, semi-blind gain helpers, and empirical LCR/AFD
// estimation.
//
// Determinism contract: all randomness flows from std::mt19937_64 seeded
// per hop via derive_stream_seed, with uniform deviates mapped as
// ((word >> 11) + 0.5) * 2^-53, so identical (spec, seed) inputs give
// bit-identical traces on any conforming platform.

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "nrayleigh/core.hpp"

namespace nray {

/// Sampling/length/seed parameters for trace synthesis.  `oscillators`
/// is the ring size M: single-mobile hops run two independent M-tone
/// rings (in-phase and quadrature), dual-mobile hops an MxM double ring.
struct TraceSpec {
    double sample_rate = 0.0;  ///< Hz
    double duration = 0.0;     ///< seconds
    std::uint64_t seed = 1;
    int oscillators = 32;

    void validate() const;
};

/// Hard floor on sample_rate relative to the summed per-hop maximum
/// Doppler; the default builder uses 128x, validated by rate
/// halving/doubling tests, while anything below the floor raises an
/// error at generation time.
inline constexpr double kMinOversample = 8.0;
inline constexpr double kDefaultOversample = 128.0;

/// sample_rate = 128 x (sum over hops of max Doppler).
double default_sample_rate(const CascadeSpec& cascade);

/// A synthesized envelope trace.
struct FadingTrace {
    double sample_rate = 0.0;
    std::vector<double> samples;
    TraceSpec spec;

    double duration() const {
        return static_cast<double>(samples.size()) / sample_rate;
    }
};

/// Per-threshold crossing statistics of one trace.  The standard-error
/// vectors are filled only when estimation ran with two or more time
/// blocks (see estimate_cascade_taps); otherwise they hold NaN.
struct SimEstimate {
    std::vector<double> threshold;
    std::vector<long long> crossings;
    std::vector<double> time_below;  ///< seconds spent strictly below
    std::vector<double> lcr;         ///< crossings / duration
    std::vector<double> afd;         ///< time_below / crossings, NaN when 0 crossings
    std::vector<double> lcr_se;      ///< block-wise standard error of lcr
    std::vector<double> afd_se;      ///< block-wise standard error of afd
    double duration = 0.0;
    double mean_power = 0.0;         ///< time-averaged squared amplitude
};

/// Deterministic per-stream seed derivation (splitmix64 finalizer over
/// master + golden-ratio increments; index 0 returns the master seed so
/// a one-hop cascade reproduces the bare generator).  Stable across
/// versions - figure reproducibility depends on it.
std::uint64_t derive_stream_seed(std::uint64_t master, std::uint64_t index);

/// Amplitude gain of a semi-blind fixed-gain relay fed by a hop with the
/// given mean SNR and mean power: sqrt((1/omega_hat) e^{1/snr} E1(1/snr)).
double semi_blind_gain(double mean_snr, double omega_hat);

/// Power product Phi of the semi-blind figure scenarios, from the common
/// per-hop mean power and the mean SNRs of the N-1 relay-feeding hops
/// (empty list = single hop, Phi = omega_hat).  EqualSnr requires all
/// entries identical and uses the collapsed closed form; both tags must
/// agree with phi() of the equivalently built semi-blind cascade.
enum class SnrScenario { EqualSnr, UnequalSnr };
double scenario_phi(SnrScenario scenario, double omega_hat, const std::vector<double>& relay_snrs);

/// Rayleigh envelope with mean power `omega` for a hop where only one
/// terminal moves (max Doppler fm): two independent M-tone rings with
/// half-circle arrival-angle grids (random per-seed offset and phases)
/// feed the in-phase and quadrature components.
FadingTrace gen_f2m_trace(double omega, double fm, const TraceSpec& t);

/// Rayleigh envelope for a hop where both terminals move: complex MxM
/// double ring combining both maximum Doppler shifts with independent
/// per-pair phases and per-seed ring rotations.  A zero frequency on
/// either side degenerates to the single-mobile construction.
FadingTrace gen_m2m_trace(double omega, double fm_tx, double fm_rx, const TraceSpec& t);

/// Samplewise product of independently seeded per-hop traces (hop i
/// seeded with derive_stream_seed(seed, i)) scaled by the resolved relay
/// gains.  Every hop must be time-varying: a static hop would freeze one
/// Rayleigh draw and break ergodicity of single-trace statistics.
FadingTrace cascade_trace(const CascadeSpec& cascade, const TraceSpec& t);

/// Downward-crossing count and time-below accumulation per threshold.
/// A sample equal to the threshold counts as above (deterministic
/// tie-break); afd = time_below/crossings is NaN where crossings = 0.
SimEstimate estimate_lcr_afd(const FadingTrace& trace, const ThresholdGrid& grid);

/// Streaming multi-tap cascade estimator: synthesizes the cascade once
/// in chunks (hop synthesis threaded), estimating the partial products
/// after `taps[j]` hops against grids[j] without materializing any
/// trace.  taps must be strictly increasing hop counts in [1, N].
/// Memory stays O(chunk + thresholds) regardless of duration.  With
/// n_blocks >= 2 the trace is split into equal time blocks and the
/// estimates gain block-wise standard errors (crossing events cluster,
/// so Poisson errors would be optimistic; block SEs are honest).
std::vector<SimEstimate> estimate_cascade_taps(const CascadeSpec& cascade,
                                               const std::vector<std::size_t>& taps,
                                               const std::vector<ThresholdGrid>& grids,
                                               const TraceSpec& t, int n_blocks = 1);

/// Plain-CSV trace export, header `t_seconds,amplitude`, LF line ends.
void write_trace_csv(const FadingTrace& trace, std::ostream& out);

}  // namespace nray
