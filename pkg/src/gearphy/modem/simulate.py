"""End-to-end sequence simulation through the impaired receive chain.

The chain is: symbol source -> transmit pulse at the FTN rate -> AWGN ->
receive filter -> symbol-rate sampling -> residual phase rotation ->
quantization.  The residual phase error is drawn white per received
symbol (worst case).  SNR convention: the cascade main tap is scaled to
one and the sampled noise variance is exactly 1/xi, so xi is the
symbol-level SNR of a unit-average-energy constellation.

Unipolar impulse radio never draws phase samples: the power detector
squares the magnitude, which cancels any phasor exactly, so its output
is bit-identical across phase-noise settings at a fixed seed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.signal import fftconvolve

from ..errors import InvalidParameterError
from ..gears import Family, Gear
from . import sources
from .pulses import FilterBank, build_filter_bank

DEFAULT_SPS = 8
DEFAULT_IR_ON_PROB = 0.3


@dataclass(frozen=True)
class SimOutput:
    """Simulated transmit/receive symbol streams plus channel bookkeeping."""

    gear: Gear
    xi: float
    sigma_pn_sq: float
    u: np.ndarray                 # transmitted symbols (complex for ZXM, real for IR)
    w: np.ndarray                 # quantized receive symbols
    y0: np.ndarray                # noiseless, rotation-free sampled receive signal
    fb: FilterBank
    noise_var: float              # complex noise variance at the sampler (1/xi)
    threshold: float | None       # quantizer threshold for the IR schemes
    p_on: float | None
    signs_i: np.ndarray | None = None
    signs_q: np.ndarray | None = None


def _sampled(signal: np.ndarray, delay: int, sps: int, n: int) -> np.ndarray:
    idx = delay + sps * np.arange(n)
    return signal[idx]


def simulate_rx_sequence(
    gear: Gear,
    xi: float,
    sigma_pn_sq: float,
    n: int,
    seed,
    p_on: float | None = None,
    sps: int = DEFAULT_SPS,
) -> SimOutput:
    """Simulate ``n`` quantized receive symbols for the given gear."""
    if n < 1:
        raise InvalidParameterError("sequence length must be positive")
    if xi <= 0.0:
        raise InvalidParameterError("SNR must be positive")
    if sigma_pn_sq < 0.0:
        raise InvalidParameterError("phase-noise variance must be non-negative")

    rng = np.random.default_rng(seed)
    pulse = gear.pulse
    fb = build_filter_bank(pulse, gear.m_tx, sps=sps)
    edge = 2 * pulse.span * gear.m_tx  # cascade transient, in symbols
    n_total = n + 2 * edge

    signs_i = signs_q = None
    if gear.family == Family.ZXM:
        u_all, si_all, sq_all = sources.zxm_symbols(n_total, gear.m_tx, rng)
        p_used = None
    elif gear.family == Family.IR:
        p_used = DEFAULT_IR_ON_PROB if p_on is None else p_on
        u_all = sources.ir_symbols(n_total, p_used, gear.ir_variant, rng)
    else:
        raise InvalidParameterError("sequence simulation applies to ZXM and IR gears")

    # Transmit waveform and clean receive samples (cascade main tap = 1).
    x = np.zeros(n_total * sps, dtype=complex if gear.family == Family.ZXM else float)
    x[::sps] = u_all
    s = fftconvolve(x, fb.h_tx)
    v0 = fftconvolve(s, fb.h_rx)
    delay = len(fb.h_tx) - 1  # tx+rx group delay; filters share one odd length
    y0_all = _sampled(v0, delay, sps, n_total)

    noise_var = 1.0 / xi
    if math.isinf(xi):
        nu_all = np.zeros(n_total, dtype=complex)
    else:
        sigma_sample = math.sqrt(noise_var / fb.rx_noise_gain / 2.0)
        eta = sigma_sample * (
            rng.standard_normal(len(s)) + 1j * rng.standard_normal(len(s))
        )
        vn = fftconvolve(eta, fb.h_rx)
        nu_all = _sampled(vn, delay, sps, n_total)

    y_all = y0_all + nu_all

    threshold = None
    if gear.family == Family.ZXM:
        if sigma_pn_sq > 0.0:
            theta = rng.normal(0.0, math.sqrt(sigma_pn_sq), n_total)
            y_all = y_all * np.exp(1j * theta)
        w_all = np.sign(y_all.real) + 1j * np.sign(y_all.imag)
    elif gear.ir_variant == "variable-sign":
        if sigma_pn_sq > 0.0:
            theta = rng.normal(0.0, math.sqrt(sigma_pn_sq), n_total)
            y_rot = (y_all * np.exp(1j * theta)).real
        else:
            y_rot = np.asarray(y_all).real
        amp = 1.0 / math.sqrt(p_used)
        threshold = amp / 2.0
        w_all = np.where(y_rot > threshold, 1.0, np.where(y_rot < -threshold, -1.0, 0.0))
    else:  # unipolar: power detection, immune to the phasor by construction
        power = np.abs(y_all) ** 2
        amp = 1.0 / math.sqrt(p_used)
        threshold = amp ** 2 / 2.0 + (0.0 if math.isinf(xi) else noise_var)
        w_all = (power > threshold).astype(float)

    sl = slice(edge, edge + n)
    if gear.family == Family.ZXM:
        signs_i, signs_q = si_all[sl], sq_all[sl]
    return SimOutput(
        gear=gear,
        xi=xi,
        sigma_pn_sq=sigma_pn_sq,
        u=u_all[sl],
        w=w_all[sl],
        y0=y0_all[sl],
        fb=fb,
        noise_var=noise_var,
        threshold=threshold,
        p_on=p_used,
        signs_i=signs_i,
        signs_q=signs_q,
    )
