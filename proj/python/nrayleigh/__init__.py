"""Second-order statistics of cascaded Rayleigh fading channels.

Level crossing rate (LCR) and average fade duration (AFD) of the product
of N Rayleigh envelopes, by closed-form approximation, direct numerical
integration, and sum-of-sinusoids Monte-Carlo simulation.  The heavy
lifting lives in the compiled extension ``nrayleigh._core``.
"""

from nrayleigh._core import (  # noqa: F401
    CascadeSpec,
    CurveRow,
    DopplerKind,
    DopplerSpec,
    FadingTrace,
    FigureResult,
    FigureSpec,
    FigureTapCurve,
    HopSpec,
    Method,
    RelayGainSpec,
    ScenarioConfig,
    SimEstimate,
    ThresholdGrid,
    TraceSpec,
    amplitude_to_threshold_db,
    bessel_k1,
    cascade_trace,
    cdf_product_rayleigh,
    compute_curve,
    compute_curves,
    compute_figure,
    curve_csv,
    default_sample_rate,
    derivative_variance,
    derive_stream_seed,
    effective_doppler,
    effective_dopplers,
    effective_powers,
    estimate_cascade_taps,
    estimate_lcr_afd,
    exact_afd,
    exact_lcr,
    figure_cascade,
    figure_spec,
    gamma_upper_zero,
    gen_f2m_trace,
    gen_m2m_trace,
    hop_doppler,
    laplace_afd,
    laplace_lcr,
    lcr_critical_point,
    load_scenario_file,
    max_doppler,
    parse_scenario_string,
    phi,
    product_exp_cdf,
    rayleigh_lcr,
    resolved_gain,
    semi_blind_gain_sq,
    snr_db_to_linear,
    threshold_db_to_amplitude,
    truncate_cascade,
    write_figure_csvs,
)

__version__ = "1.0.0"


def unit_cascade(n_hops: int, fm: float = 1.0) -> CascadeSpec:
    """N unit-power hops, each with a single mobile terminal at ``fm`` Hz.

    Container fields convert by value at the Python boundary, so the hop
    and gain lists are built first and assigned in one go.
    """
    hops = []
    for _ in range(n_hops):
        hop = HopSpec()
        hop.doppler = DopplerSpec.fixed_to_mobile(fm)
        hops.append(hop)
    cascade = CascadeSpec()
    cascade.hops = hops
    cascade.gains = [RelayGainSpec.unity() for _ in range(n_hops)]
    cascade.validate()
    return cascade
