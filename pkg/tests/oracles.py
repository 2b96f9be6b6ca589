"""Independent oracles used to pin expected values.

These deliberately avoid the library's own computation paths: brute-force
Monte Carlo for the QAM transition matrix, closed-form antiderivatives
for the phase-noise integrals, and a raw full-length periodogram for the
containment bandwidth.
"""

import math

import numpy as np


def mc_confusion_mi(m: int, xi: float, n_symbols: int, seed: int = 0) -> float:
    """Estimate I(U;W) of hard-sliced M-QAM from an empirical confusion matrix."""
    root = int(round(math.sqrt(m)))
    levels = np.arange(-(root - 1), root, 2, dtype=float)
    levels = levels / math.sqrt(2.0 * np.mean(levels ** 2))
    thresholds = 0.5 * (levels[:-1] + levels[1:])

    rng = np.random.default_rng(seed)
    ui = rng.integers(0, root, n_symbols)
    uq = rng.integers(0, root, n_symbols)
    sigma_axis = math.sqrt(0.5 / xi)
    yi = levels[ui] + sigma_axis * rng.standard_normal(n_symbols)
    yq = levels[uq] + sigma_axis * rng.standard_normal(n_symbols)
    wi = np.searchsorted(thresholds, yi)
    wq = np.searchsorted(thresholds, yq)

    joint = np.bincount((ui * root + uq) * m + (wi * root + wq), minlength=m * m).reshape(m, m)
    joint = joint / n_symbols
    pu = joint.sum(axis=1, keepdims=True)
    pw = joint.sum(axis=0, keepdims=True)
    mask = joint > 0
    return float(np.sum(joint[mask] * np.log2(joint[mask] / (pu @ pw)[mask])))


def residual_pn_closed_form(
    sigma_j_sq: float,
    bandwidth: float,
    pilot_spacing,
    xi_prime: float,
    f_pll: float,
    k_0: float,
) -> float:
    """Antiderivative-based evaluation of the residual phase-noise variance.

    PSD: S(f) = a/(f_pll^2 + f^2) + c with a = 2*sigma_j_sq*f_pll/pi and
    c = 2*k_0.  The tracked-band integrand S/(gS+1) is a rational function
    (A f^2 + B)/(C f^2 + D) with a closed-form integral.
    """
    a = 2.0 * sigma_j_sq * f_pll / math.pi
    c = 2.0 * k_0

    def int_psd(f: float) -> float:
        return (a / f_pll) * math.atan(f / f_pll) + c * f

    half = bandwidth / 2.0
    if pilot_spacing is None:
        return 2.0 * int_psd(half)

    g = xi_prime * bandwidth / pilot_spacing
    edge = min(bandwidth / (2.0 * pilot_spacing), half)
    big_a = c
    big_b = a + c * f_pll ** 2
    big_c = 1.0 + g * c
    big_d = f_pll ** 2 * (1.0 + g * c) + g * a

    def int_tracked(f: float) -> float:
        lead = (big_a / big_c) * f
        coeff = big_b - big_a * big_d / big_c
        return lead + coeff / math.sqrt(big_c * big_d) * math.atan(f * math.sqrt(big_c / big_d))

    return 2.0 * (int_tracked(edge) + int_psd(half) - int_psd(edge))


def b99_fft_oracle(signal: np.ndarray, fs: float, containment: float = 0.99) -> float:
    """Raw single periodogram containment bandwidth (no averaging)."""
    spec = np.abs(np.fft.fft(signal)) ** 2
    freqs = np.fft.fftfreq(len(signal), d=1.0 / fs)
    order = np.argsort(np.abs(freqs), kind="stable")
    cum = np.cumsum(spec[order])
    target = containment * cum[-1]
    idx = int(np.searchsorted(cum, target))
    return 2.0 * abs(freqs[order][min(idx, len(cum) - 1)])
