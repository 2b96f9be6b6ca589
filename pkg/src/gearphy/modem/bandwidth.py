"""99% power-containment bandwidth per gear, normalized to 1/T_Nyq.

QAM transmits i.i.d. symbols through the RRC pulse, so its PSD equals
the squared pulse magnitude and the containment bandwidth is analytic.
ZXM (correlated run-length-limited signs at the FTN rate) and IR (sparse
pulse trains, including a DC line for the unipolar scheme) get their PSD
from an averaged periodogram of a long simulated transmit signal; the
bandwidth is independent of SNR and phase noise by construction.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.signal import fftconvolve, welch

from ..errors import InvalidParameterError
from ..gears import Family, Gear
from . import sources
from .pulses import b99_rrc_analytic, pulse_taps
from .simulate import DEFAULT_IR_ON_PROB

DEFAULT_B99_SYMBOLS = 500_000
CONTAINMENT = 0.99


def b99_from_psd(freqs: np.ndarray, psd: np.ndarray, containment: float = CONTAINMENT) -> float:
    """Smallest two-sided bandwidth holding the given power fraction.

    Accumulates power outward from DC over the two-sided spectrum and
    interpolates the crossing frequency.
    """
    order = np.argsort(np.abs(freqs), kind="stable")
    p = np.maximum(psd[order], 0.0)
    cum = np.cumsum(p)
    total = cum[-1]
    if total <= 0.0:
        raise InvalidParameterError("PSD carries no power")
    target = containment * total
    i = int(np.searchsorted(cum, target))
    f_sorted = np.abs(freqs[order])
    if i == 0:
        return 2.0 * f_sorted[0]
    # linear interpolation between the bracketing samples
    f_lo, f_hi = f_sorted[i - 1], f_sorted[i]
    c_lo, c_hi = cum[i - 1], cum[i]
    frac = (target - c_lo) / (c_hi - c_lo) if c_hi > c_lo else 0.0
    return float(2.0 * (f_lo + frac * (f_hi - f_lo)))


def transmit_signal(gear: Gear, n_symbols: int, seed, p_on: float | None = None, sps: int = 8) -> tuple[np.ndarray, float]:
    """Oversampled transmit waveform and its sample rate (units of 1/T_Nyq)."""
    rng = np.random.default_rng(seed)
    sps_nyq = sps * gear.m_tx
    taps = pulse_taps(gear.pulse, sps_nyq)
    if gear.family == Family.ZXM:
        u, _, _ = sources.zxm_symbols(n_symbols, gear.m_tx, rng)
    elif gear.family == Family.IR:
        p = DEFAULT_IR_ON_PROB if p_on is None else p_on
        u = sources.ir_symbols(n_symbols, p, gear.ir_variant, rng)
    else:
        raise InvalidParameterError("simulated PSD applies to ZXM and IR gears")
    x = np.zeros(n_symbols * sps, dtype=complex if gear.family == Family.ZXM else float)
    x[::sps] = u
    return fftconvolve(x, taps), float(sps_nyq)


def b99_bandwidth(
    gear: Gear,
    n_symbols: int = DEFAULT_B99_SYMBOLS,
    seed: int = 12345,
    p_on: float | None = None,
    sps: int = 8,
    nperseg: int = 4096,
) -> float:
    """Two-sided 99% containment bandwidth in units of 1/T_Nyq."""
    if gear.family == Family.QAM:
        return b99_rrc_analytic(gear.pulse.alpha)
    s, fs = transmit_signal(gear, n_symbols, seed, p_on=p_on, sps=sps)
    freqs, psd = welch(
        s,
        fs=fs,
        nperseg=nperseg,
        return_onesided=False,
        detrend=False,
        scaling="density",
    )
    return b99_from_psd(freqs, psd)  # fs was given in 1/T_Nyq units
