#include "nrayleigh/core.hpp"

#include <cmath>
#include <limits>

#include "nrayleigh/specialfn.hpp"

namespace nray {

namespace {

void require(bool ok, const std::string& message) {
    if (!ok) throw std::invalid_argument(message);
}

bool finite_nonneg(double x) { return std::isfinite(x) && x >= 0.0; }

}  // namespace

// ---------------------------------------------------------------- Doppler

DopplerSpec DopplerSpec::fixed_to_mobile(double fm) {
    DopplerSpec d;
    d.kind = Kind::FixedToMobile;
    d.fm_tx = fm;
    d.validate();
    return d;
}

DopplerSpec DopplerSpec::mobile_to_mobile(double fm_tx, double fm_rx) {
    DopplerSpec d;
    d.kind = Kind::MobileToMobile;
    d.fm_tx = fm_tx;
    d.fm_rx = fm_rx;
    d.validate();
    return d;
}

void DopplerSpec::validate() const {
    require(finite_nonneg(fm_tx), "DopplerSpec: fm_tx must be finite and >= 0");
    if (kind == Kind::MobileToMobile) {
        require(finite_nonneg(fm_rx), "DopplerSpec: fm_rx must be finite and >= 0");
    } else {
        require(fm_rx == 0.0, "DopplerSpec: fm_rx must be 0 for FixedToMobile");
    }
}

double effective_doppler(const DopplerSpec& d) {
    if (d.kind == DopplerSpec::Kind::FixedToMobile) return d.fm_tx;
    return std::hypot(d.fm_tx, d.fm_rx);
}

double max_doppler(const DopplerSpec& d) {
    if (d.kind == DopplerSpec::Kind::FixedToMobile) return d.fm_tx;
    return d.fm_tx + d.fm_rx;
}

double derivative_variance(double omega, double f) {
    require(omega > 0.0 && std::isfinite(omega), "derivative_variance: omega must be > 0");
    require(finite_nonneg(f), "derivative_variance: f must be finite and >= 0");
    const double pi = 3.14159265358979323846;
    return pi * pi * omega * f * f;
}

// ------------------------------------------------------------------- hops

double HopSpec::mean_snr() const {
    if (!noise_variance) {
        throw std::invalid_argument("HopSpec: mean_snr requires noise_variance");
    }
    return omega_hat / *noise_variance;
}

// ------------------------------------------------------------ relay gains

RelayGainSpec RelayGainSpec::unity() { return {Mode::Unity, 0.0}; }

RelayGainSpec RelayGainSpec::fixed_c(double c) {
    RelayGainSpec g{Mode::FixedC, c};
    require(c > 0.0 && std::isfinite(c), "RelayGainSpec: FixedC constant must be > 0");
    return g;
}

RelayGainSpec RelayGainSpec::semi_blind() { return {Mode::SemiBlind, 0.0}; }

RelayGainSpec RelayGainSpec::explicit_gain(double g) {
    RelayGainSpec spec{Mode::Explicit, g};
    require(g > 0.0 && std::isfinite(g), "RelayGainSpec: explicit gain must be > 0");
    return spec;
}

double semi_blind_gain_sq(double mean_snr, double omega_hat) {
    if (!(mean_snr > 0.0) || !std::isfinite(mean_snr)) {
        throw std::invalid_argument("semi_blind_gain_sq: mean_snr must be > 0");
    }
    if (!(omega_hat > 0.0) || !std::isfinite(omega_hat)) {
        throw std::invalid_argument("semi_blind_gain_sq: omega_hat must be > 0");
    }
    const double x = 1.0 / mean_snr;
    return std::exp(x) * gamma_upper_zero(x) / omega_hat;
}

// ---------------------------------------------------------------- cascade

void CascadeSpec::validate() const {
    require(!hops.empty(), "CascadeSpec: at least one hop required");
    const std::size_t n = hops.size();
    require(gains.size() == n, "CascadeSpec: gains list must match hop count");
    require(gains[0].mode == RelayGainSpec::Mode::Unity,
            "CascadeSpec: the first (source) gain must be Unity");

    for (std::size_t i = 0; i < n; ++i) {
        const HopSpec& h = hops[i];
        require(h.omega_hat > 0.0 && std::isfinite(h.omega_hat),
                "CascadeSpec: hop " + std::to_string(i + 1) + " omega_hat must be > 0");
        if (h.noise_variance) {
            require(*h.noise_variance > 0.0 && std::isfinite(*h.noise_variance),
                    "CascadeSpec: hop " + std::to_string(i + 1) +
                        " noise_variance must be > 0");
        }
        const RelayGainSpec& g = gains[i];
        if (g.mode == RelayGainSpec::Mode::FixedC || g.mode == RelayGainSpec::Mode::Explicit) {
            require(g.value > 0.0 && std::isfinite(g.value),
                    "CascadeSpec: gain " + std::to_string(i) + " needs a positive constant");
        }
    }

    const bool node_mode = !node_dopplers.empty();
    if (node_mode) {
        require(node_dopplers.size() == n + 1,
                "CascadeSpec: node Doppler list must have one entry per node (hops + 1)");
        for (double f : node_dopplers) {
            require(finite_nonneg(f), "CascadeSpec: node Doppler shifts must be >= 0");
        }
        for (std::size_t i = 0; i < n; ++i) {
            require(!hops[i].doppler,
                    "CascadeSpec: per-hop Doppler and node Doppler modes are exclusive");
        }
    } else {
        for (std::size_t i = 0; i < n; ++i) {
            require(hops[i].doppler.has_value(),
                    "CascadeSpec: hop " + std::to_string(i + 1) + " is missing its Doppler");
            hops[i].doppler->validate();
        }
    }
}

DopplerSpec hop_doppler(const CascadeSpec& c, std::size_t i) {
    if (i >= c.hops.size()) throw std::invalid_argument("hop_doppler: hop index out of range");
    if (c.node_dopplers.empty()) {
        if (!c.hops[i].doppler) {
            throw std::invalid_argument("hop_doppler: hop has no Doppler specification");
        }
        return *c.hops[i].doppler;
    }
    const double fa = c.node_dopplers[i];
    const double fb = c.node_dopplers[i + 1];
    if (fa > 0.0 && fb > 0.0) return DopplerSpec::mobile_to_mobile(fa, fb);
    return DopplerSpec::fixed_to_mobile(fa > 0.0 ? fa : fb);
}

double resolved_gain(const CascadeSpec& c, std::size_t i) {
    if (i >= c.gains.size()) throw std::invalid_argument("resolved_gain: index out of range");
    const RelayGainSpec& g = c.gains[i];
    if (i == 0) {
        if (g.mode != RelayGainSpec::Mode::Unity) {
            throw std::invalid_argument("resolved_gain: the source gain must be Unity");
        }
        return 1.0;
    }
    switch (g.mode) {
        case RelayGainSpec::Mode::Unity:
            return 1.0;
        case RelayGainSpec::Mode::Explicit:
            return g.value;
        case RelayGainSpec::Mode::FixedC: {
            const HopSpec& prev = c.hops[i - 1];
            if (!prev.noise_variance) {
                throw std::invalid_argument(
                    "resolved_gain: FixedC requires the previous hop's noise_variance");
            }
            return 1.0 / std::sqrt(g.value * *prev.noise_variance);
        }
        case RelayGainSpec::Mode::SemiBlind: {
            const HopSpec& prev = c.hops[i - 1];
            return std::sqrt(semi_blind_gain_sq(prev.mean_snr(), prev.omega_hat));
        }
    }
    throw std::logic_error("resolved_gain: unreachable");
}

std::vector<double> effective_powers(const CascadeSpec& c) {
    std::vector<double> omegas(c.hops.size());
    for (std::size_t i = 0; i < c.hops.size(); ++i) {
        const double g = resolved_gain(c, i);
        omegas[i] = c.hops[i].omega_hat * g * g;
    }
    return omegas;
}

std::vector<double> effective_dopplers(const CascadeSpec& c) {
    std::vector<double> f(c.hops.size());
    for (std::size_t i = 0; i < c.hops.size(); ++i) {
        f[i] = effective_doppler(hop_doppler(c, i));
    }
    return f;
}

double phi(const std::vector<double>& omegas) {
    if (omegas.empty()) throw std::invalid_argument("phi: empty power list");
    double p = 1.0;
    for (double w : omegas) {
        if (!(w > 0.0) || !std::isfinite(w)) {
            throw std::invalid_argument("phi: powers must be > 0");
        }
        p *= w;
    }
    return p;
}

double phi(const CascadeSpec& c) { return phi(effective_powers(c)); }

double doppler_sum_sq(const std::vector<double>& node_dopplers) {
    if (node_dopplers.size() < 2) {
        throw std::invalid_argument("doppler_sum_sq: need at least two nodes");
    }
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < node_dopplers.size(); ++i) {
        const double fa = node_dopplers[i];
        const double fb = node_dopplers[i + 1];
        if (!finite_nonneg(fa) || !finite_nonneg(fb)) {
            throw std::invalid_argument("doppler_sum_sq: node shifts must be >= 0");
        }
        s += fa * fa + fb * fb;
    }
    return s;
}

double doppler_sum_sq(const CascadeSpec& c) {
    double s = 0.0;
    for (std::size_t i = 0; i < c.hops.size(); ++i) {
        const double f = effective_doppler(hop_doppler(c, i));
        s += f * f;
    }
    return s;
}

// ------------------------------------------------------- thresholds/curves

void ThresholdGrid::validate() const {
    if (values.empty()) throw std::invalid_argument("ThresholdGrid: empty grid");
    if (!(normalization > 0.0) || !std::isfinite(normalization)) {
        throw std::invalid_argument("ThresholdGrid: normalization must be > 0");
    }
    double prev = 0.0;
    for (double y : values) {
        if (!(y > prev) || !std::isfinite(y)) {
            throw std::invalid_argument(
                "ThresholdGrid: thresholds must be positive and strictly increasing");
        }
        prev = y;
    }
}

ThresholdGrid ThresholdGrid::from_db_range(double lo_db, double hi_db, double step_db,
                                           double normalization) {
    if (!(step_db > 0.0) || !std::isfinite(step_db)) {
        throw std::invalid_argument("ThresholdGrid: step must be > 0 dB");
    }
    if (!(hi_db >= lo_db)) {
        throw std::invalid_argument("ThresholdGrid: empty dB range");
    }
    ThresholdGrid grid;
    grid.normalization = normalization;
    const int count = static_cast<int>(std::floor((hi_db - lo_db) / step_db + 1e-9)) + 1;
    grid.values.reserve(static_cast<std::size_t>(count));
    for (int k = 0; k < count; ++k) {
        grid.values.push_back(threshold_db_to_amplitude(lo_db + k * step_db, normalization));
    }
    grid.validate();
    return grid;
}

const char* method_name(Method m) {
    switch (m) {
        case Method::Exact: return "exact";
        case Method::Laplace: return "laplace";
        case Method::Simulated: return "simulated";
    }
    return "unknown";
}

// ------------------------------------------------------------ dB helpers

double snr_db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

double threshold_db_to_amplitude(double db, double normalization) {
    if (!(normalization > 0.0)) {
        throw std::invalid_argument("threshold_db_to_amplitude: normalization must be > 0");
    }
    return std::pow(10.0, db / 20.0) * std::sqrt(normalization);
}

double amplitude_to_threshold_db(double y, double normalization) {
    if (!(y > 0.0) || !(normalization > 0.0)) {
        throw std::invalid_argument("amplitude_to_threshold_db: arguments must be > 0");
    }
    return 20.0 * std::log10(y / std::sqrt(normalization));
}

}  // namespace nray
