"""Pulse shaping: RRC/RC tap generation and the matched-filter cascade.

All time axes are normalized to the Nyquist interval.  Discrete taps are
generated at ``sps_nyq`` samples per Nyquist interval; FTN signaling
places symbols every ``sps_nyq / m_tx`` samples while keeping the pulse
itself designed for the full Nyquist interval.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq
from scipy.signal import fftconvolve

from ..errors import InvalidParameterError
from ..gears import PulseShape


def rrc_taps(alpha: float, sps_nyq: int, span: int) -> np.ndarray:
    """Unit-energy root-raised-cosine taps, ``span`` Nyquist intervals per side."""
    n = span * sps_nyq
    t = np.arange(-n, n + 1) / sps_nyq
    taps = np.empty_like(t)
    for i, ti in enumerate(t):
        if abs(ti) < 1e-12:
            taps[i] = 1.0 - alpha + 4.0 * alpha / math.pi
        elif abs(abs(ti) - 1.0 / (4.0 * alpha)) < 1e-9:
            taps[i] = (alpha / math.sqrt(2.0)) * (
                (1.0 + 2.0 / math.pi) * math.sin(math.pi / (4.0 * alpha))
                + (1.0 - 2.0 / math.pi) * math.cos(math.pi / (4.0 * alpha))
            )
        else:
            num = math.sin(math.pi * ti * (1.0 - alpha)) + 4.0 * alpha * ti * math.cos(
                math.pi * ti * (1.0 + alpha)
            )
            den = math.pi * ti * (1.0 - (4.0 * alpha * ti) ** 2)
            taps[i] = num / den
    return taps / np.linalg.norm(taps)


def rc_taps(alpha: float, sps_nyq: int, span: int) -> np.ndarray:
    """Unit-energy raised-cosine taps."""
    n = span * sps_nyq
    t = np.arange(-n, n + 1) / sps_nyq
    taps = np.empty_like(t)
    for i, ti in enumerate(t):
        if abs(abs(ti) - 1.0 / (2.0 * alpha)) < 1e-9:
            taps[i] = (math.pi / 4.0) * np.sinc(1.0 / (2.0 * alpha))
        else:
            taps[i] = np.sinc(ti) * math.cos(math.pi * alpha * ti) / (
                1.0 - (2.0 * alpha * ti) ** 2
            )
    return taps / np.linalg.norm(taps)


def pulse_taps(pulse: PulseShape, sps_nyq: int) -> np.ndarray:
    if pulse.kind == "rrc":
        return rrc_taps(pulse.alpha, sps_nyq, pulse.span)
    return rc_taps(pulse.alpha, sps_nyq, pulse.span)


@dataclass(frozen=True)
class FilterBank:
    """Tx/Rx filters plus their symbol-spaced cascade, main tap scaled to 1."""

    h_tx: np.ndarray
    h_rx: np.ndarray
    sps: int                 # samples per (FTN) symbol interval
    cascade: np.ndarray      # symbol-spaced cascade taps g[lag], lag in symbols
    cascade_center: int      # index of the lag-0 tap within ``cascade``
    rx_noise_gain: float     # sum of squared rx taps after scaling

    @property
    def g0(self) -> float:
        return float(self.cascade[self.cascade_center])

    def g(self, lag: int) -> float:
        idx = self.cascade_center + lag
        if 0 <= idx < len(self.cascade):
            return float(self.cascade[idx])
        return 0.0


def build_filter_bank(pulse: PulseShape, m_tx: int, sps: int = 8) -> FilterBank:
    """Matched Tx/Rx pair at ``sps`` samples per FTN symbol.

    The receive taps are rescaled so the cascade's main tap is exactly 1;
    with that convention a symbol-level SNR of xi corresponds to additive
    noise of variance 1/xi at the sampler.
    """
    if sps < 4:
        raise InvalidParameterError("need at least 4 samples per symbol")
    sps_nyq = sps * m_tx
    h = pulse_taps(pulse, sps_nyq)
    full = fftconvolve(h, h)
    center = len(full) // 2
    peak = full[center]
    h_rx = h / peak
    full = full / peak
    max_lag = (len(full) - 1 - center) // sps
    lags = np.arange(-max_lag, max_lag + 1)
    cascade = full[center + lags * sps]
    return FilterBank(
        h_tx=h,
        h_rx=h_rx,
        sps=sps,
        cascade=cascade,
        cascade_center=max_lag,
        rx_noise_gain=float(np.sum(h_rx ** 2)),
    )


# --- analytic containment bandwidth for RRC-shaped i.i.d. streams -----------

def b99_rrc_analytic(alpha: float, containment: float = 0.99) -> float:
    """Two-sided power-containment bandwidth of an RRC-filtered i.i.d.
    stream, in units of 1/T_Nyq.

    The transmit PSD equals the squared RRC magnitude, i.e. a raised
    cosine: flat out to (1-alpha)/2 and a cos^2 taper up to (1+alpha)/2.
    """
    if not 0.0 < alpha <= 1.0:
        raise InvalidParameterError("roll-off must be in (0, 1]")
    if not 0.0 < containment < 1.0:
        raise InvalidParameterError("containment must be a fraction in (0, 1)")
    lo = (1.0 - alpha) / 2.0

    def contained(width: float) -> float:
        x = width / 2.0 - lo
        if x <= 0.0:
            return width
        x = min(x, alpha)
        return 2.0 * lo + x + (alpha / math.pi) * math.sin(math.pi * x / alpha)

    return brentq(lambda w: contained(w) - containment, 2.0 * lo, 1.0 + alpha, xtol=1e-12)
