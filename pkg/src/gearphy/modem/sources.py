"""Symbol sources for the sequence-based modulation schemes.

Zero-crossing modulation draws run-length-limited sign sequences per I/Q
branch from the maximum-entropy Markov law of the (d, inf) constraint
with d = m_tx - 1: runs shorter than d+1 are forbidden, and once a run
is extendable its continuation is a fair coin weighted by the constraint
capacity.  Impulse radio uses i.i.d. pulse positions with a tunable ON
probability; the variable-sign variant adds an i.i.d. polarity bit.
"""

from __future__ import annotations

import math

import numpy as np

from ..errors import InvalidParameterError


def rll_growth_rate(d: int) -> float:
    """Largest real root of x^(d+1) = x^d + 1 (capacity base of (d, inf))."""
    if d < 0:
        raise InvalidParameterError("run-length parameter must be >= 0")
    if d == 0:
        return 2.0
    coeffs = np.zeros(d + 2)
    coeffs[0] = 1.0
    coeffs[1] = -1.0
    coeffs[-1] = -1.0
    roots = np.roots(coeffs)
    return float(max(abs(r) for r in roots if abs(r.imag) < 1e-9))


def rll_entropy_rate(d: int) -> float:
    """Bits per symbol of the maxentropic (d, inf) sign source."""
    return math.log2(rll_growth_rate(d))


def sample_rll_signs(n: int, d: int, rng: np.random.Generator) -> np.ndarray:
    """Draw n symbols of a maxentropic run-length-limited sign sequence.

    Run lengths are i.i.d. with P(len = l) = lambda^-l for l >= d+1,
    which is (d+1) plus a geometric tail with hazard 1 - 1/lambda.
    """
    lam = rll_growth_rate(d)
    hazard = 1.0 - 1.0 / lam
    mean_run = d + 1 + 1.0 / (lam - 1.0)
    n_runs = int(n / mean_run * 1.3) + 16
    out = np.empty(0, dtype=np.int8)
    sign = 1 if rng.random() < 0.5 else -1
    while len(out) < n:
        runs = d + 1 + rng.geometric(hazard, size=n_runs) - 1
        total = int(runs.sum())
        chunk = np.empty(total, dtype=np.int8)
        pos = 0
        s = sign
        for r in runs:
            chunk[pos : pos + r] = s
            pos += r
            s = -s
        sign = s
        out = np.concatenate([out, chunk]) if len(out) else chunk
    return out[:n]


def zxm_symbols(n: int, m_tx: int, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Complex unit-average-energy ZXM symbols plus the per-axis signs."""
    d = m_tx - 1
    signs_i = sample_rll_signs(n, d, rng)
    signs_q = sample_rll_signs(n, d, rng)
    u = (signs_i.astype(np.float64) + 1j * signs_q.astype(np.float64)) / math.sqrt(2.0)
    return u, signs_i, signs_q


def zxm_entropy_per_symbol(m_tx: int) -> float:
    """Bits per complex FTN symbol (both I/Q branches)."""
    return 2.0 * rll_entropy_rate(m_tx - 1)


def ir_symbols(
    n: int, p_on: float, variant: str, rng: np.random.Generator
) -> np.ndarray:
    """Real unit-average-energy impulse-radio symbols."""
    if not 0.0 < p_on <= 0.5:
        raise InvalidParameterError("ON probability must be in (0, 0.5]")
    amp = 1.0 / math.sqrt(p_on)
    on = rng.random(n) < p_on
    u = np.where(on, amp, 0.0)
    if variant == "variable-sign":
        u = u * np.where(rng.random(n) < 0.5, 1.0, -1.0)
    elif variant != "unipolar":
        raise InvalidParameterError(f"unknown IR variant {variant!r}")
    return u


def ir_entropy_per_symbol(p_on: float, variant: str) -> float:
    """Source entropy in bits per symbol: H(p) plus a polarity bit when signed."""
    if not 0.0 < p_on < 1.0:
        raise InvalidParameterError("ON probability must be in (0, 1)")
    h = -(p_on * math.log2(p_on) + (1.0 - p_on) * math.log2(1.0 - p_on))
    if variant == "variable-sign":
        h += p_on
    return h
