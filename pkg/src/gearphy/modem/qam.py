"""Hard-demapped QAM mutual information under residual phase noise.

The channel is memoryless (Nyquist signaling through matched filters),
so the mutual information is a finite sum over the transition matrix.
Transition probabilities factor per I/Q axis into Gaussian interval
probabilities between the mid-point decision thresholds; residual phase
noise enters by averaging the transition matrix over white Gaussian
phase draws applied to the transmitted constellation point.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.special import ndtr

from ..errors import InvalidParameterError

DEFAULT_PHASE_DRAWS = 200


def qam_axis_levels(m: int) -> np.ndarray:
    """Per-axis amplitude levels of unit-average-energy square M-QAM."""
    root = math.isqrt(m)
    if root * root != m or m < 4:
        raise InvalidParameterError(f"M must be a square >= 4, got {m}")
    levels = np.arange(-(root - 1), root, 2, dtype=float)
    scale = math.sqrt(2.0 * np.mean(levels ** 2))
    return levels / scale


def qam_axis_thresholds(m: int) -> np.ndarray:
    """Decision thresholds (midpoints, outermost at +-inf)."""
    levels = qam_axis_levels(m)
    inner = 0.5 * (levels[:-1] + levels[1:])
    return np.concatenate([[-np.inf], inner, [np.inf]])


def _interval_probs(positions: np.ndarray, thresholds: np.ndarray, sigma: float) -> np.ndarray:
    """P(axis output region | axis input position) for all regions."""
    if sigma == 0.0:
        # noiseless: indicator of the containing region
        idx = np.searchsorted(thresholds[1:-1], positions, side="left")
        out = np.zeros((len(positions), len(thresholds) - 1))
        out[np.arange(len(positions)), idx] = 1.0
        return out
    z = (thresholds[None, :] - positions[:, None]) / sigma
    cdf = ndtr(z)
    return np.diff(cdf, axis=1)


def qam_mi_hard(
    m: int,
    xi: float,
    sigma_pn_sq: float,
    n_phase: int = DEFAULT_PHASE_DRAWS,
    seed: int = 0,
) -> float:
    """Mutual information (bits/symbol) of hard-detected M-QAM.

    ``xi`` is the symbol SNR of the unit-average-energy constellation;
    ``sigma_pn_sq`` the residual phase-noise variance in rad^2, averaged
    over ``n_phase`` Gaussian draws (skipped entirely when zero, making
    the result deterministic).
    """
    if xi <= 0.0 and not math.isinf(xi):
        raise InvalidParameterError("SNR must be positive")
    if n_phase < 1:
        raise InvalidParameterError("need at least one phase draw")
    levels = qam_axis_levels(m)
    thresholds = qam_axis_thresholds(m)
    root = len(levels)
    points = (levels[:, None] + 1j * levels[None, :]).ravel()  # index = i*root + q
    sigma_axis = 0.0 if math.isinf(xi) else math.sqrt(0.5 / xi)

    if sigma_pn_sq == 0.0:
        thetas = np.zeros(1)
    else:
        rng = np.random.default_rng(seed)
        thetas = rng.normal(0.0, math.sqrt(sigma_pn_sq), n_phase)

    p_wu = np.zeros((m, m))
    for theta in thetas:
        rotated = points * np.exp(1j * theta)
        p_i = _interval_probs(rotated.real, thresholds, sigma_axis)
        p_q = _interval_probs(rotated.imag, thresholds, sigma_axis)
        p_wu += (p_i[:, :, None] * p_q[:, None, :]).reshape(m, m)
    p_wu /= len(thetas)

    p_w = p_wu.mean(axis=0)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(p_wu > 0.0, p_wu / p_w[None, :], 1.0)
        terms = np.where(p_wu > 0.0, p_wu * np.log2(ratio), 0.0)
    return float(terms.sum() / m)
