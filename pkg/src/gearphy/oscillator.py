"""Local-oscillator model: phase-noise PSD, the power it costs to keep the
PSD down, and the residual phase error left after pilot-based tracking.

The oscillator is a PLL-stabilized VCO.  Below the loop bandwidth the
integrated-white-noise (Wiener) component is flattened, yielding a
Lorentzian PSD plus a white floor.  Making the oscillator quieter is
expensive: VCO power grows with the inverse fourth power of the phase
noise standard deviation, which is the central trade-off this module
exposes to the optimizer.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import scipy.integrate
from scipy.constants import k as BOLTZMANN

from .errors import InvalidParameterError, NumericalError

QUAD_REL_TOL = 1e-8
OVERLOAD_KAPPA_DEFAULT = 2.0  # ADC dynamic range multiple, <5% overload


@dataclass(frozen=True)
class LOParams:
    """PLL/VCO technology constants."""

    f_pll: float = 1e6              # loop bandwidth [Hz]
    k_0: float = 10 ** (-125 / 10)  # white phase-noise floor [1/Hz]
    q_osc: float = 10.0             # oscillator quality factor
    delta: float = 1.0              # MOS excess-noise coefficient
    f_ref: float = 54e6             # crystal reference frequency [Hz]
    s_ref: float = 10 ** (-160 / 10)  # reference white PSD [1/Hz]
    s_cp: float = 10 ** (-160 / 10)   # charge-pump white PSD [1/Hz]
    p_ref: float = 198e-6           # reference oscillator power [W]
    gamma: float = 300.0            # temperature [K]

    def __post_init__(self):
        if self.f_pll <= 0.0 or self.q_osc <= 0.0:
            raise InvalidParameterError("f_pll and q_osc must be positive")
        if self.k_0 < 0.0:
            raise InvalidParameterError("noise floor must be non-negative")


@dataclass(frozen=True)
class TrackingContext:
    """Inputs of the residual phase-noise computation.

    ``pilot_spacing`` of ``None`` marks the untracked case (real-valued
    IR schemes), avoiding an explicit infinity.
    """

    sigma_j_sq: float               # Wiener phase-noise power [rad^2]
    bandwidth: float                # system bandwidth [Hz]
    pilot_spacing: float | None     # symbols between pilots; None = untracked
    xi_prime: float                 # quantization-degraded SNR (linear)
    lo: LOParams

    def __post_init__(self):
        if self.sigma_j_sq < 0.0:
            raise InvalidParameterError("sigma_j_sq must be non-negative")
        if self.bandwidth <= 0.0:
            raise InvalidParameterError("bandwidth must be positive")
        if self.pilot_spacing is not None and self.pilot_spacing < 1.0:
            raise InvalidParameterError("pilot spacing must be >= 1")


def k2_from_sigma(sigma_j_sq: float, f_pll: float) -> float:
    """Lorentzian level K2 that integrates to the given total phase power."""
    if sigma_j_sq < 0.0 or f_pll <= 0.0:
        raise InvalidParameterError("need sigma_j_sq >= 0 and f_pll > 0")
    return sigma_j_sq * f_pll / math.pi


def phase_noise_psd(f_m: float, sigma_j_sq: float, lo: LOParams) -> float:
    """Two-oscillator phase-noise PSD at offset ``f_m`` from the carrier.

    Transmitter and receiver run identical oscillators, hence the factor
    two on both the Lorentzian and the floor.
    """
    if f_m < 0.0:
        raise InvalidParameterError("frequency offset must be non-negative")
    k2 = k2_from_sigma(sigma_j_sq, lo.f_pll)
    return 2.0 * k2 / (lo.f_pll ** 2 + f_m ** 2) + 2.0 * lo.k_0


def vco_power(sigma_j: float, f_c: float, lo: LOParams) -> float:
    """VCO power needed to hold the phase noise std at ``sigma_j`` rad."""
    if sigma_j <= 0.0:
        raise InvalidParameterError(
            "sigma_j must be strictly positive (zero phase noise needs infinite power)"
        )
    if f_c <= 0.0:
        raise InvalidParameterError("carrier frequency must be positive")
    prefactor = (
        BOLTZMANN * lo.gamma * (1.0 + lo.delta)
        / (math.pi ** 2 * lo.q_osc ** 2 * lo.f_ref ** 2)
    )
    return prefactor * (lo.s_ref + lo.s_cp) * (2.0 * math.pi * f_c / sigma_j) ** 4


def lo_power(sigma_j: float, f_c: float, lo: LOParams) -> float:
    """Total LO power: VCO plus the constant crystal reference."""
    return vco_power(sigma_j, f_c, lo) + lo.p_ref


def effective_snr(xi: float, b_adc: float, kappa: float = OVERLOAD_KAPPA_DEFAULT) -> float:
    """SNR after adding uniform quantization noise of a ``b_adc``-bit ADC.

    Derived from a dithered-quantizer noise model with dynamic range set
    to ``kappa`` times the input variance.
    """
    if xi <= 0.0:
        raise InvalidParameterError("SNR must be positive")
    if kappa <= 0.0 or b_adc <= 0.0:
        raise InvalidParameterError("kappa and b_adc must be positive")
    inv = 1.0 / xi + kappa * (1.0 + 1.0 / xi) / 2.0 ** b_adc
    return 1.0 / inv


def _integrate(func, lo_f: float, hi_f: float, interior_points) -> float:
    """Adaptive Gauss-Kronrod integration with kink splits and diagnostics."""
    if hi_f <= lo_f:
        return 0.0
    points = sorted(p for p in interior_points if lo_f < p < hi_f)
    value, abserr, info, *rest = scipy.integrate.quad(
        func,
        lo_f,
        hi_f,
        points=points or None,
        epsrel=QUAD_REL_TOL,
        epsabs=0.0,
        limit=200,
        full_output=True,
    )
    if rest:  # quadpack reported a failure message
        raise NumericalError(
            f"phase-noise quadrature failed: {rest[0]}",
            diagnostics={
                "interval": (lo_f, hi_f),
                "estimate": value,
                "abserr": abserr,
                "neval": info.get("neval"),
            },
        )
    return value


def residual_pn_variance(ctx: TrackingContext) -> float:
    """Residual phase-noise variance after LMMSE pilot interpolation.

    Components below ``B/(2F)`` are trackable and get suppressed by the
    estimator; everything above passes through unchanged.  The untracked
    case integrates the raw PSD over the full band.
    """
    lo = ctx.lo
    if ctx.sigma_j_sq == 0.0 and lo.k_0 == 0.0:
        return 0.0

    def psd(f: float) -> float:
        return phase_noise_psd(f, ctx.sigma_j_sq, lo)

    half_band = ctx.bandwidth / 2.0
    if ctx.pilot_spacing is None:
        return 2.0 * _integrate(psd, 0.0, half_band, [lo.f_pll])

    track_edge = min(ctx.bandwidth / (2.0 * ctx.pilot_spacing), half_band)
    gain = ctx.xi_prime * ctx.bandwidth / ctx.pilot_spacing

    def suppressed(f: float) -> float:
        s = psd(f)
        return s / (gain * s + 1.0)

    tracked = _integrate(suppressed, 0.0, track_edge, [lo.f_pll])
    untracked = _integrate(psd, track_edge, half_band, [lo.f_pll])
    return 2.0 * (tracked + untracked)
