#include "nrayleigh/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <future>
#include <limits>
#include <memory>
#include <ostream>
#include <random>

#include "nrayleigh/specialfn.hpp"

namespace nray {

namespace {

constexpr double kTwoPi = 6.2831853071795864769252867665590;
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
constexpr std::size_t kChunk = std::size_t{1} << 20;
constexpr std::uint64_t kRenormEvery = std::uint64_t{1} << 20;

double next_uniform(std::mt19937_64& rng) {
    // Top 53 bits, offset to (0,1); identical across conforming platforms.
    return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

// A bank of phasors advancing at fixed per-sample rotations.
struct ToneBank {
    std::vector<double> re, im, rot_re, rot_im;

    void add_tone(double freq_hz, double phase, double sample_rate) {
        const double step = kTwoPi * freq_hz / sample_rate;
        re.push_back(std::cos(phase));
        im.push_back(std::sin(phase));
        rot_re.push_back(std::cos(step));
        rot_im.push_back(std::sin(step));
    }

    // Rotate every tone one sample and return the sums of the real and
    // imaginary parts.
    void step(double& sum_re, double& sum_im) {
        double sr = 0.0, si = 0.0;
        const std::size_t n = re.size();
        for (std::size_t k = 0; k < n; ++k) {
            const double r = re[k] * rot_re[k] - im[k] * rot_im[k];
            const double i = re[k] * rot_im[k] + im[k] * rot_re[k];
            re[k] = r;
            im[k] = i;
            sr += r;
            si += i;
        }
        sum_re = sr;
        sum_im = si;
    }

    void renormalize() {
        for (std::size_t k = 0; k < re.size(); ++k) {
            const double scale = 1.0 / std::hypot(re[k], im[k]);
            re[k] *= scale;
            im[k] *= scale;
        }
    }
};

// Streaming envelope synthesizer for one hop.
//
// Single-mobile construction ("quadrature model"): the in-phase and
// quadrature components are independent rings of M real tones at
// frequencies fd*cos(theta_m), theta_m = pi*(m + r)/M over the half
// circle with a per-seed uniform offset r and i.i.d. phases.  The
// half-circle grid keeps the M tone frequencies distinct (a real cosine
// cannot tell +f from -f, so a full-circle grid would collapse pairs)
// and makes the per-seed time-averaged power and Doppler second moment
// exact.
//
// Dual-mobile construction ("double ring"): M x M complex tone pairs at
// f_tx*cos(theta_m) + f_rx*cos(psi_n) on full-circle grids with per-seed
// random ring rotations and an independent phase per pair.
//
// Draw order from the hop's mt19937_64 stream (stable, documented):
//   quadrature: r_I, M phases (I ring), r_Q, M phases (Q ring)
//   double ring: theta_0, psi_0, M*M phases in row-major (tx, rx) order
class HopSynth {
  public:
    HopSynth(double omega, const DopplerSpec& d, double sample_rate, int m,
             std::uint64_t seed) {
        if (!(omega > 0.0)) throw std::invalid_argument("HopSynth: omega must be > 0");
        const double f_tx = d.fm_tx;
        const double f_rx = (d.kind == DopplerSpec::Kind::MobileToMobile) ? d.fm_rx : 0.0;
        if (!(f_tx + f_rx > 0.0)) {
            throw std::invalid_argument("HopSynth: hop must be time-varying");
        }

        std::mt19937_64 rng(seed);
        const std::size_t mm = static_cast<std::size_t>(m);
        if (f_tx == 0.0 || f_rx == 0.0) {
            quadrature_ = true;
            const double fd = f_tx + f_rx;
            for (ToneBank* bank : {&bank_a_, &bank_b_}) {
                const double offset = next_uniform(rng);
                for (std::size_t k = 0; k < mm; ++k) {
                    const double theta =
                        (kTwoPi / 2.0) * (static_cast<double>(k) + offset) / static_cast<double>(m);
                    const double phase = kTwoPi * next_uniform(rng);
                    bank->add_tone(fd * std::cos(theta), phase, sample_rate);
                }
            }
            amp_ = std::sqrt(omega / static_cast<double>(m));
        } else {
            quadrature_ = false;
            const double theta0 = next_uniform(rng) * kTwoPi / static_cast<double>(m);
            const double psi0 = next_uniform(rng) * kTwoPi / static_cast<double>(m);
            for (std::size_t a = 0; a < mm; ++a) {
                const double ftx_a =
                    f_tx * std::cos(kTwoPi * static_cast<double>(a) / static_cast<double>(m) + theta0);
                for (std::size_t b = 0; b < mm; ++b) {
                    const double frx_b =
                        f_rx * std::cos(kTwoPi * static_cast<double>(b) / static_cast<double>(m) + psi0);
                    const double phase = kTwoPi * next_uniform(rng);
                    bank_a_.add_tone(ftx_a + frx_b, phase, sample_rate);
                }
            }
            amp_ = std::sqrt(omega) / static_cast<double>(m);
        }
    }

    void generate(double* out, std::size_t count) {
        double sr, si, qr, qi;
        for (std::size_t s = 0; s < count; ++s) {
            if (quadrature_) {
                bank_a_.step(sr, si);
                bank_b_.step(qr, qi);
                out[s] = amp_ * std::hypot(sr, qr);  // real parts of the two rings
            } else {
                bank_a_.step(sr, si);
                out[s] = amp_ * std::hypot(sr, si);
            }
            if (++since_renorm_ >= kRenormEvery) {
                bank_a_.renormalize();
                bank_b_.renormalize();
                since_renorm_ = 0;
            }
        }
    }

  private:
    ToneBank bank_a_, bank_b_;
    double amp_ = 0.0;
    bool quadrature_ = true;
    std::uint64_t since_renorm_ = 0;
};

// Incremental downward-crossing / time-below tally against a sorted
// threshold list, fed chunk by chunk.  When built with n_blocks >= 2 the
// stream is partitioned into equal time blocks whose per-block rates
// yield standard errors (crossings cluster, so Poisson errors would be
// optimistic).
class CrossingTally {
  public:
    CrossingTally(std::vector<double> thresholds, double scale, std::uint64_t n_total,
                  int n_blocks)
        : thr_(std::move(thresholds)),
          scale_(scale),
          n_total_(n_total),
          blocks_(static_cast<std::uint64_t>(std::max(1, n_blocks))),
          cross_diff_(blocks_, std::vector<long long>(thr_.size() + 1, 0)),
          below_at_(blocks_, std::vector<long long>(thr_.size() + 1, 0)) {}

    void consume(const double* raw, std::size_t count) {
        for (std::size_t s = 0; s < count; ++s) {
            const double x = raw[s] * scale_;
            power_ += x * x;
            const std::size_t blk = static_cast<std::size_t>(samples_ * blocks_ / n_total_);
            // First index with threshold > x: x is below every threshold
            // from there on (ties count as above).
            const std::size_t ub = static_cast<std::size_t>(
                std::upper_bound(thr_.begin(), thr_.end(), x) - thr_.begin());
            ++below_at_[blk][ub];
            if (have_prev_ && prev_ > x) {
                // Downward crossings at thresholds in (x, prev_].
                const std::size_t lo = ub;
                const std::size_t hi = static_cast<std::size_t>(
                    std::upper_bound(thr_.begin(), thr_.end(), prev_) - thr_.begin());
                if (lo < hi) {
                    ++cross_diff_[blk][lo];
                    --cross_diff_[blk][hi];
                }
            }
            prev_ = x;
            have_prev_ = true;
            ++samples_;
        }
    }

    SimEstimate finalize(double sample_rate) const {
        const std::size_t k = thr_.size();
        SimEstimate est;
        est.threshold = thr_;
        est.duration = static_cast<double>(samples_) / sample_rate;
        est.mean_power = power_ / static_cast<double>(samples_);
        est.crossings.assign(k, 0);
        est.time_below.assign(k, 0.0);
        est.lcr.assign(k, 0.0);
        est.afd.assign(k, 0.0);
        const double nan = std::numeric_limits<double>::quiet_NaN();
        est.lcr_se.assign(k, nan);
        est.afd_se.assign(k, nan);
        const double dt = 1.0 / sample_rate;

        // Per-block prefix sums -> per-block counts per threshold.
        std::vector<std::vector<long long>> bc(blocks_, std::vector<long long>(k, 0));
        std::vector<std::vector<long long>> bb(blocks_, std::vector<long long>(k, 0));
        for (std::size_t b = 0; b < blocks_; ++b) {
            long long cross = 0, below = 0;
            for (std::size_t j = 0; j < k; ++j) {
                cross += cross_diff_[b][j];
                below += below_at_[b][j];
                bc[b][j] = cross;
                bb[b][j] = below;
            }
        }
        for (std::size_t j = 0; j < k; ++j) {
            long long cross = 0, below = 0;
            for (std::size_t b = 0; b < blocks_; ++b) {
                cross += bc[b][j];
                below += bb[b][j];
            }
            est.crossings[j] = cross;
            est.time_below[j] = static_cast<double>(below) * dt;
            est.lcr[j] = static_cast<double>(cross) / est.duration;
            est.afd[j] = cross > 0 ? est.time_below[j] / static_cast<double>(cross) : nan;
        }
        if (blocks_ >= 2) {
            for (std::size_t j = 0; j < k; ++j) {
                double lcr_mean = 0.0, lcr_m2 = 0.0, afd_mean = 0.0, afd_m2 = 0.0;
                std::size_t n_lcr = 0, n_afd = 0;
                for (std::size_t b = 0; b < blocks_; ++b) {
                    const std::uint64_t lo = n_total_ * b / blocks_;
                    const std::uint64_t hi = n_total_ * (b + 1) / blocks_;
                    const double dur_b = static_cast<double>(hi - lo) * dt;
                    if (dur_b <= 0.0) continue;
                    const double lcr_b = static_cast<double>(bc[b][j]) / dur_b;
                    ++n_lcr;
                    const double d = lcr_b - lcr_mean;
                    lcr_mean += d / static_cast<double>(n_lcr);
                    lcr_m2 += d * (lcr_b - lcr_mean);
                    if (bc[b][j] > 0) {
                        const double afd_b =
                            static_cast<double>(bb[b][j]) * dt / static_cast<double>(bc[b][j]);
                        ++n_afd;
                        const double e = afd_b - afd_mean;
                        afd_mean += e / static_cast<double>(n_afd);
                        afd_m2 += e * (afd_b - afd_mean);
                    }
                }
                if (n_lcr >= 2) {
                    est.lcr_se[j] = std::sqrt(lcr_m2 / static_cast<double>(n_lcr - 1)) /
                                    std::sqrt(static_cast<double>(n_lcr));
                }
                if (n_afd >= 2) {
                    est.afd_se[j] = std::sqrt(afd_m2 / static_cast<double>(n_afd - 1)) /
                                    std::sqrt(static_cast<double>(n_afd));
                }
            }
        }
        return est;
    }

  private:
    std::vector<double> thr_;
    double scale_ = 1.0;
    std::uint64_t n_total_ = 1;
    std::uint64_t blocks_ = 1;
    std::vector<std::vector<long long>> cross_diff_;
    std::vector<std::vector<long long>> below_at_;
    double prev_ = 0.0;
    bool have_prev_ = false;
    std::uint64_t samples_ = 0;
    double power_ = 0.0;
};

void check_trace_feasible(double sample_rate, double duration, double sum_max_doppler,
                          double min_cycle_doppler) {
    if (sample_rate < kMinOversample * sum_max_doppler) {
        throw std::invalid_argument(
            "trace generation: sample_rate below " + std::to_string(kMinOversample) +
            "x the summed max Doppler (aliased crossings)");
    }
    if (duration * min_cycle_doppler < 100.0) {
        throw std::invalid_argument(
            "trace generation: need duration x Doppler >= 100 fade cycles for stable "
            "statistics");
    }
}

std::size_t sample_count(const TraceSpec& t) {
    const auto n = static_cast<long long>(std::llround(t.duration * t.sample_rate));
    if (n < 2) throw std::invalid_argument("trace generation: fewer than two samples");
    return static_cast<std::size_t>(n);
}

}  // namespace

void TraceSpec::validate() const {
    if (!(sample_rate > 0.0) || !std::isfinite(sample_rate)) {
        throw std::invalid_argument("TraceSpec: sample_rate must be > 0");
    }
    if (!(duration > 0.0) || !std::isfinite(duration)) {
        throw std::invalid_argument("TraceSpec: duration must be > 0");
    }
    if (oscillators < 2) {
        throw std::invalid_argument("TraceSpec: need at least 2 oscillators per ring");
    }
}

double default_sample_rate(const CascadeSpec& cascade) {
    cascade.validate();
    double sum = 0.0;
    for (std::size_t i = 0; i < cascade.size(); ++i) {
        sum += max_doppler(hop_doppler(cascade, i));
    }
    if (!(sum > 0.0)) {
        throw std::invalid_argument("default_sample_rate: static cascade");
    }
    return kDefaultOversample * sum;
}

std::uint64_t derive_stream_seed(std::uint64_t master, std::uint64_t index) {
    if (index == 0) return master;
    std::uint64_t z = master + kGolden * index;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

double semi_blind_gain(double mean_snr, double omega_hat) {
    return std::sqrt(semi_blind_gain_sq(mean_snr, omega_hat));
}

double scenario_phi(SnrScenario scenario, double omega_hat, const std::vector<double>& relay_snrs) {
    if (!(omega_hat > 0.0)) throw std::invalid_argument("scenario_phi: omega_hat must be > 0");
    for (double s : relay_snrs) {
        if (!(s > 0.0)) throw std::invalid_argument("scenario_phi: SNRs must be > 0");
    }
    if (relay_snrs.empty()) return omega_hat;

    if (scenario == SnrScenario::EqualSnr) {
        const double snr = relay_snrs.front();
        for (double s : relay_snrs) {
            if (std::fabs(s - snr) > 1e-12 * snr) {
                throw std::invalid_argument("scenario_phi: equal-snr scenario needs identical SNRs");
            }
        }
        const double k = static_cast<double>(relay_snrs.size());
        return omega_hat * std::exp(k / snr) * std::pow(gamma_upper_zero(1.0 / snr), k);
    }

    double phi_value = omega_hat;
    for (double s : relay_snrs) {
        phi_value *= std::exp(1.0 / s) * gamma_upper_zero(1.0 / s);
    }
    return phi_value;
}

FadingTrace gen_f2m_trace(double omega, double fm, const TraceSpec& t) {
    t.validate();
    if (!(fm > 0.0)) throw std::domain_error("gen_f2m_trace: fm must be > 0");
    check_trace_feasible(t.sample_rate, t.duration, fm, fm);

    FadingTrace trace;
    trace.sample_rate = t.sample_rate;
    trace.spec = t;
    trace.samples.resize(sample_count(t));
    HopSynth synth(omega, DopplerSpec::fixed_to_mobile(fm), t.sample_rate, t.oscillators,
                   t.seed);
    synth.generate(trace.samples.data(), trace.samples.size());
    return trace;
}

FadingTrace gen_m2m_trace(double omega, double fm_tx, double fm_rx, const TraceSpec& t) {
    t.validate();
    if (!(fm_tx + fm_rx > 0.0)) {
        throw std::domain_error("gen_m2m_trace: fm_tx + fm_rx must be > 0");
    }
    const DopplerSpec d = DopplerSpec::mobile_to_mobile(fm_tx, fm_rx);
    check_trace_feasible(t.sample_rate, t.duration, max_doppler(d), effective_doppler(d));

    FadingTrace trace;
    trace.sample_rate = t.sample_rate;
    trace.spec = t;
    trace.samples.resize(sample_count(t));
    HopSynth synth(omega, d, t.sample_rate, t.oscillators, t.seed);
    synth.generate(trace.samples.data(), trace.samples.size());
    return trace;
}

FadingTrace cascade_trace(const CascadeSpec& cascade, const TraceSpec& t) {
    cascade.validate();
    t.validate();

    double sum_max = 0.0;
    double min_eff = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < cascade.size(); ++i) {
        const DopplerSpec d = hop_doppler(cascade, i);
        const double eff = effective_doppler(d);
        if (!(eff > 0.0)) {
            throw std::invalid_argument(
                "cascade_trace: every hop must be time-varying (a static hop freezes one "
                "Rayleigh draw and the trace statistics stop being ergodic)");
        }
        sum_max += max_doppler(d);
        min_eff = std::min(min_eff, eff);
    }
    check_trace_feasible(t.sample_rate, t.duration, sum_max, min_eff);

    double gain_product = 1.0;
    for (std::size_t i = 0; i < cascade.size(); ++i) gain_product *= resolved_gain(cascade, i);

    FadingTrace trace;
    trace.sample_rate = t.sample_rate;
    trace.spec = t;
    const std::size_t n = sample_count(t);
    trace.samples.assign(n, gain_product);

    std::vector<double> tmp(std::min(n, kChunk));
    for (std::size_t i = 0; i < cascade.size(); ++i) {
        HopSynth synth(cascade.hops[i].omega_hat, hop_doppler(cascade, i), t.sample_rate,
                       t.oscillators, derive_stream_seed(t.seed, i));
        for (std::size_t off = 0; off < n; off += tmp.size()) {
            const std::size_t len = std::min(tmp.size(), n - off);
            synth.generate(tmp.data(), len);
            double* dst = trace.samples.data() + off;
            for (std::size_t s = 0; s < len; ++s) dst[s] *= tmp[s];
        }
    }
    return trace;
}

SimEstimate estimate_lcr_afd(const FadingTrace& trace, const ThresholdGrid& grid) {
    grid.validate();
    if (trace.samples.size() < 2) {
        throw std::invalid_argument("estimate_lcr_afd: need at least two samples");
    }
    if (!(trace.sample_rate > 0.0)) {
        throw std::invalid_argument("estimate_lcr_afd: sample_rate must be > 0");
    }
    CrossingTally tally(grid.values, 1.0, trace.samples.size(), 1);
    tally.consume(trace.samples.data(), trace.samples.size());
    return tally.finalize(trace.sample_rate);
}

std::vector<SimEstimate> estimate_cascade_taps(const CascadeSpec& cascade,
                                               const std::vector<std::size_t>& taps,
                                               const std::vector<ThresholdGrid>& grids,
                                               const TraceSpec& t, int n_blocks) {
    cascade.validate();
    t.validate();
    if (taps.empty() || taps.size() != grids.size()) {
        throw std::invalid_argument("estimate_cascade_taps: taps/grids size mismatch");
    }
    if (n_blocks < 1) {
        throw std::invalid_argument("estimate_cascade_taps: n_blocks must be >= 1");
    }
    for (std::size_t j = 0; j < taps.size(); ++j) {
        if (taps[j] < 1 || taps[j] > cascade.size() ||
            (j > 0 && taps[j] <= taps[j - 1])) {
            throw std::invalid_argument(
                "estimate_cascade_taps: taps must be strictly increasing hop counts in "
                "[1, N]");
        }
        grids[j].validate();
    }

    double sum_max = 0.0;
    double min_eff = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < cascade.size(); ++i) {
        const DopplerSpec d = hop_doppler(cascade, i);
        const double eff = effective_doppler(d);
        if (!(eff > 0.0)) {
            throw std::invalid_argument("estimate_cascade_taps: every hop must be time-varying");
        }
        sum_max += max_doppler(d);
        min_eff = std::min(min_eff, eff);
    }
    check_trace_feasible(t.sample_rate, t.duration, sum_max, min_eff);

    const std::size_t n_hops = cascade.size();
    std::vector<std::unique_ptr<HopSynth>> synths;
    synths.reserve(n_hops);
    for (std::size_t i = 0; i < n_hops; ++i) {
        synths.push_back(std::make_unique<HopSynth>(cascade.hops[i].omega_hat,
                                                    hop_doppler(cascade, i), t.sample_rate,
                                                    t.oscillators,
                                                    derive_stream_seed(t.seed, i)));
    }

    std::vector<CrossingTally> tallies;
    tallies.reserve(taps.size());
    double gain_partial = 1.0;
    std::size_t tap_idx = 0;
    std::vector<double> tap_scale(taps.size(), 1.0);
    for (std::size_t i = 0; i < n_hops && tap_idx < taps.size(); ++i) {
        gain_partial *= resolved_gain(cascade, i);
        if (taps[tap_idx] == i + 1) {
            tap_scale[tap_idx] = gain_partial;
            ++tap_idx;
        }
    }
    const std::size_t n = sample_count(t);
    for (std::size_t j = 0; j < taps.size(); ++j) {
        tallies.emplace_back(grids[j].values, tap_scale[j], n, n_blocks);
    }

    const std::size_t chunk = std::min(n, kChunk);
    std::vector<std::vector<double>> hop_buf(n_hops, std::vector<double>(chunk));
    std::vector<double> partial(chunk);

    for (std::size_t off = 0; off < n; off += chunk) {
        const std::size_t len = std::min(chunk, n - off);

        std::vector<std::future<void>> work;
        work.reserve(n_hops);
        for (std::size_t i = 0; i < n_hops; ++i) {
            work.push_back(std::async(std::launch::async, [&, i] {
                synths[i]->generate(hop_buf[i].data(), len);
            }));
        }
        for (auto& w : work) w.get();

        tap_idx = 0;
        for (std::size_t h = 0; h < n_hops && tap_idx < taps.size(); ++h) {
            if (h == 0) {
                std::copy_n(hop_buf[0].data(), len, partial.data());
            } else {
                const double* src = hop_buf[h].data();
                for (std::size_t s = 0; s < len; ++s) partial[s] *= src[s];
            }
            if (taps[tap_idx] == h + 1) {
                tallies[tap_idx].consume(partial.data(), len);
                ++tap_idx;
            }
        }
    }

    std::vector<SimEstimate> out;
    out.reserve(taps.size());
    for (const auto& tally : tallies) out.push_back(tally.finalize(t.sample_rate));
    return out;
}

void write_trace_csv(const FadingTrace& trace, std::ostream& out) {
    out << "t_seconds,amplitude\n";
    char line[80];
    for (std::size_t i = 0; i < trace.samples.size(); ++i) {
        const double t = static_cast<double>(i) / trace.sample_rate;
        std::snprintf(line, sizeof(line), "%.10g,%.10g\n", t, trace.samples[i]);
        out << line;
    }
}

}  // namespace nray
