"""Simulation-based mutual-information lower bound for sequence schemes.

Symbols are run through the true impaired channel; the likelihood of the
observed quantized stream is then evaluated under a tractable *auxiliary*
channel via the forward recursion of the BCJR algorithm, giving

    I >= H'(U) - (1/n) log2 P_aux(w) + (1/n) log2 P_aux(u, w),

which is a valid achievable-rate lower bound for any auxiliary model.
The auxiliary channel truncates the filter cascade to a window of
``memory + 1`` symbols and lumps everything else into independent
Gaussian noise whose variance stacks three terms: sampled AWGN, the
empirically measured residual ISI outside the window, and the phase
noise contribution

    diag:     Phi_ww[0] * (2 - 2 exp(-s/2))                 (rotation)
    diag:     Phi_ww[0] * (exp(-2s)/2 - 2 exp(-s/2) + 3/2)  (real projection)

with s the residual phase-noise variance and Phi_ww the autocorrelation
of the rotation-free receive symbols.  Both factors vanish exactly at
s = 0.  The forward recursion runs in the log domain throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import toeplitz
from scipy.special import log_ndtr, ndtr
from scipy.stats import ncx2

from .. import kernels
from ..errors import InvalidParameterError
from ..gears import Family, Gear
from . import sources
from .simulate import DEFAULT_IR_ON_PROB, SimOutput, simulate_rx_sequence

LOG_FLOOR = 1e-300


def default_memory(m_tx: int) -> int:
    """Auxiliary channel memory: covers the dominant FTN ISI taps."""
    return 2 * m_tx + 1


# --- phase-noise covariance structure ---------------------------------------

def pn_cov_entry(kind: str, sigma_pn_sq: float, same_index: bool) -> float:
    """Normalized phase-noise covariance factor for one matrix entry.

    ``kind`` is "rotation" (complex symbols observed after a phasor) or
    "real-projection" (real symbols observed through Re{.}).
    """
    if sigma_pn_sq < 0.0:
        raise InvalidParameterError("phase-noise variance must be non-negative")
    e_half = math.exp(-sigma_pn_sq / 2.0)
    e_full = math.exp(-sigma_pn_sq)
    if kind == "rotation":
        return 2.0 - 2.0 * e_half if same_index else 1.0 + e_full - 2.0 * e_half
    if kind == "real-projection":
        if same_index:
            return 0.5 * math.exp(-2.0 * sigma_pn_sq) - 2.0 * e_half + 1.5
        return e_full - 2.0 * e_half + 1.0
    raise InvalidParameterError(f"unknown covariance kind {kind!r}")


def pn_covariance(phi_ww: np.ndarray, kind: str, sigma_pn_sq: float) -> np.ndarray:
    """Full phase-noise covariance block for a window of receive symbols."""
    phi = np.asarray(phi_ww, dtype=float)
    base = toeplitz(phi)
    factors = np.full_like(base, pn_cov_entry(kind, sigma_pn_sq, same_index=False))
    np.fill_diagonal(factors, pn_cov_entry(kind, sigma_pn_sq, same_index=True))
    return base * factors


# --- trellis construction ----------------------------------------------------

@dataclass(frozen=True)
class Trellis:
    """Joint source/channel trellis with integer-coded symbol windows."""

    n_states: int
    n_symbols: int                 # alphabet size
    window_len: int                # memory + 1
    delay: int                     # observation lag behind the newest symbol
    edge_from: np.ndarray          # int32 (E,)
    edge_to: np.ndarray            # int32 (E,)
    edge_logp: np.ndarray          # float64 (E,) source transition log-prob
    edge_windows: np.ndarray       # int64 (E, window_len) alphabet indices
    log_alpha0: np.ndarray         # float64 (S,) stationary initial distribution
    eid_by_code: np.ndarray        # int64 (n_symbols**window_len,) or -1
    sid_by_code: np.ndarray        # int64 (n_symbols**window_len / n_symbols,) or -1

    def encode_windows(self, idx_stream: np.ndarray) -> np.ndarray:
        """Integer codes of all sliding windows of the index stream."""
        lw = self.window_len
        win = np.lib.stride_tricks.sliding_window_view(idx_stream, lw)
        weights = self.n_symbols ** np.arange(lw - 1, -1, -1, dtype=np.int64)
        return win @ weights


def _stationary(n_states: int, edge_from, edge_to, edge_p) -> np.ndarray:
    pi = np.full(n_states, 1.0 / n_states)
    for _ in range(500):
        nxt = np.zeros(n_states)
        np.add.at(nxt, edge_to, pi[edge_from] * edge_p)
        nxt /= nxt.sum()
        if np.abs(nxt - pi).max() < 1e-14:
            pi = nxt
            break
        pi = nxt
    return pi


def _assemble(n_symbols: int, window_len: int, windows, probs) -> Trellis:
    """Build the trellis from enumerated valid windows and their input probs."""
    lw = window_len
    state_len = lw - 1
    weights_w = n_symbols ** np.arange(lw - 1, -1, -1, dtype=np.int64)
    weights_s = n_symbols ** np.arange(state_len - 1, -1, -1, dtype=np.int64)

    states = sorted({tuple(w[:-1]) for w in windows} | {tuple(w[1:]) for w in windows})
    sid = {s: i for i, s in enumerate(states)}

    edge_from = np.array([sid[tuple(w[:-1])] for w in windows], dtype=np.int32)
    edge_to = np.array([sid[tuple(w[1:])] for w in windows], dtype=np.int32)
    edge_logp = np.log(np.asarray(probs, dtype=float))
    edge_windows = np.asarray(windows, dtype=np.int64)

    eid_by_code = np.full(n_symbols ** lw, -1, dtype=np.int64)
    for e, w in enumerate(windows):
        eid_by_code[int(np.dot(w, weights_w))] = e
    sid_by_code = np.full(n_symbols ** state_len, -1, dtype=np.int64)
    for s, i in sid.items():
        sid_by_code[int(np.dot(s, weights_s))] = i

    pi = _stationary(len(states), edge_from, edge_to, np.exp(edge_logp))
    with np.errstate(divide="ignore"):
        log_alpha0 = np.log(pi)
    return Trellis(
        n_states=len(states),
        n_symbols=n_symbols,
        window_len=lw,
        delay=(lw - 1) // 2,
        edge_from=edge_from,
        edge_to=edge_to,
        edge_logp=edge_logp,
        edge_windows=edge_windows,
        log_alpha0=log_alpha0,
        eid_by_code=eid_by_code,
        sid_by_code=sid_by_code,
    )


def build_zxm_axis_trellis(m_tx: int, memory: int) -> Trellis:
    """Per-axis trellis of the maxentropic run-length-limited sign source.

    Alphabet indices: 0 -> -1, 1 -> +1.  A sign flip is only allowed when
    the run ending at the previous symbol is at least d+1 = m_tx long,
    which is always visible inside the window because memory >= m_tx.
    """
    d = m_tx - 1
    if memory < d + 1:
        raise InvalidParameterError("memory must cover the run-length constraint")
    lam = sources.rll_growth_rate(d)
    q_flip = 1.0 - 1.0 / lam

    def valid(win: tuple[int, ...]) -> bool:
        # completed interior runs (bounded by flips on both sides) need >= d+1
        flips = [i for i in range(1, len(win)) if win[i] != win[i - 1]]
        for a, b in zip(flips[:-1], flips[1:]):
            if b - a < d + 1:
                return False
        return True

    def trailing_run(win: tuple[int, ...]) -> int:
        r = 1
        while r < len(win) and win[-1 - r] == win[-1]:
            r += 1
        return r

    lw = memory + 1
    windows, probs = [], []
    for code in range(2 ** lw):
        win = tuple((code >> (lw - 1 - i)) & 1 for i in range(lw))
        if not valid(win):
            continue
        state = win[:-1]
        if win[-1] != state[-1]:
            p = q_flip
        elif trailing_run(state) >= d + 1:
            p = 1.0 - q_flip
        else:
            p = 1.0  # forced continuation
        windows.append(win)
        probs.append(p)
    return _assemble(2, lw, windows, probs)


def build_ir_trellis(variant: str, p_on: float, memory: int) -> Trellis:
    """i.i.d. impulse-radio trellis (indices: 0 -> off, 1 -> +, 2 -> -)."""
    if variant == "unipolar":
        sym_probs = [1.0 - p_on, p_on]
    elif variant == "variable-sign":
        sym_probs = [1.0 - p_on, p_on / 2.0, p_on / 2.0]
    else:
        raise InvalidParameterError(f"unknown IR variant {variant!r}")
    n_sym = len(sym_probs)
    lw = memory + 1
    windows, probs = [], []
    for code in range(n_sym ** lw):
        win = []
        c = code
        for _ in range(lw):
            win.append(c % n_sym)
            c //= n_sym
        win = tuple(reversed(win))
        windows.append(win)
        probs.append(sym_probs[win[-1]])
    return _assemble(n_sym, lw, windows, probs)


# --- auxiliary channel parameters --------------------------------------------

def window_taps(fb, memory: int) -> np.ndarray:
    """Cascade taps seen by the auxiliary window, lags -delay .. memory-delay."""
    delay = memory // 2
    return np.array([fb.g(lag) for lag in range(-delay, memory - delay + 1)])


def window_means(trellis: Trellis, symbol_values: np.ndarray, taps: np.ndarray) -> np.ndarray:
    """Noiseless observation mean for every trellis branch.

    Window position j holds symbol u_{k-L+j}; the observation sits at
    symbol index k - delay, so tap g[L - delay - j] applies.
    """
    lw = trellis.window_len
    coeff = taps[::-1]  # g[L - delay - j] for j = 0..L
    assert len(coeff) == lw
    vals = symbol_values[trellis.edge_windows]
    return vals @ coeff


def predicted_clean(u_values: np.ndarray, taps: np.ndarray, delay: int) -> np.ndarray:
    """Window-truncated prediction of the clean receive samples."""
    full = np.convolve(u_values, taps)
    # taps cover lags -delay..L-delay; output m aligns at full[m + delay]
    return full[delay + np.arange(len(u_values))]


def residual_isi_var(y0: np.ndarray, u_values: np.ndarray, taps: np.ndarray, delay: int) -> float:
    """Empirical variance of the ISI the auxiliary window cannot explain."""
    resid = y0 - predicted_clean(u_values, taps, delay)
    guard = len(taps)
    core = resid[guard:-guard] if len(resid) > 2 * guard else resid
    return float(np.mean(np.abs(core) ** 2))


# --- emission tables ----------------------------------------------------------

def _sign_emissions(mu: np.ndarray, sigma: float) -> np.ndarray:
    """log P(w | branch) for 1-bit signs; columns: w = -1, w = +1."""
    z = mu / sigma
    return np.column_stack([log_ndtr(-z), log_ndtr(z)])


def _three_level_emissions(mu: np.ndarray, sigma: float, tau: float) -> np.ndarray:
    """Columns: w = -1, 0, +1 (thresholds at -tau, +tau)."""
    lo = ndtr((-tau - mu) / sigma)
    hi = ndtr((tau - mu) / sigma)
    p = np.column_stack([lo, np.maximum(hi - lo, 0.0), 1.0 - hi])
    return np.log(np.maximum(p, LOG_FLOOR))


def _power_detect_emissions(mu: np.ndarray, noise_var: float, tau: float) -> np.ndarray:
    """Columns: w = 0, 1 for threshold detection of |mu + CN(0, noise_var)|^2."""
    half = noise_var / 2.0
    nc = np.maximum(mu ** 2 / half, 1e-12)  # ncx2 dislikes an exactly-zero noncentrality
    p_on = ncx2.sf(tau / half, df=2, nc=nc)
    p_on = np.clip(p_on, 1e-15, 1.0 - 1e-15)
    return np.log(np.column_stack([1.0 - p_on, p_on]))


# --- the bound ----------------------------------------------------------------

def _chain_log_probs(trellis: Trellis, emit_log, idx_stream, obs_idx) -> tuple[float, float]:
    """(log P_aux(w), log P_aux(u, w)) in nats over the emitted steps."""
    lw = trellis.window_len
    codes = trellis.encode_windows(idx_stream)          # window ending at k = j+lw-1
    eids = trellis.eid_by_code[codes]
    if np.any(eids < 0):
        raise InvalidParameterError("symbol stream violates the source constraint")
    # emission for window ending at k observes obs[k - delay]
    n = len(idx_stream)
    ks = np.arange(lw - 1, n)
    obs = np.ascontiguousarray(obs_idx[ks - trellis.delay], dtype=np.int32)

    log_pw = kernels.forward_log_prob(
        trellis.edge_from,
        trellis.edge_to,
        trellis.edge_logp,
        emit_log,
        obs,
        trellis.log_alpha0,
    )

    # clamped path: stationary weight of the initial state, then per-step
    # source transition and emission along the known windows
    first_state = idx_stream[: lw - 1]
    weights_s = trellis.n_symbols ** np.arange(lw - 2, -1, -1, dtype=np.int64)
    s0 = trellis.sid_by_code[int(np.dot(first_state, weights_s))]
    path_eids = eids  # one window per emitted step, already ordered
    log_puw = float(
        trellis.log_alpha0[s0]
        + trellis.edge_logp[path_eids].sum()
        + emit_log[path_eids, obs].sum()
    )
    return float(log_pw), log_puw


@dataclass(frozen=True)
class AuxChannelResult:
    mi_per_symbol: float          # bits per (complex) channel symbol
    source_entropy: float         # H'(U) in bits per symbol
    n_emitted: int
    sigma_eff_sq: float           # auxiliary noise variance actually used
    seed: int


def auxchannel_mi_lb(
    gear: Gear,
    xi: float,
    sigma_pn_sq: float,
    n: int = 200_000,
    memory: int | None = None,
    seed: int = 0,
    p_on: float | None = None,
    sps: int = 8,
) -> AuxChannelResult:
    """Auxiliary-channel lower bound on the per-symbol mutual information.

    For ZXM the bound is the sum of two independent per-axis chains; for
    IR a single real chain.  The result is clamped below at zero.
    """
    if gear.family not in (Family.ZXM, Family.IR):
        raise InvalidParameterError("sequence bound applies to ZXM and IR gears")
    memory = default_memory(gear.m_tx) if memory is None else memory
    if memory < 1:
        raise InvalidParameterError("memory must be >= 1")

    sim = simulate_rx_sequence(gear, xi, sigma_pn_sq, n, seed, p_on=p_on, sps=sps)
    taps = window_taps(sim.fb, memory)
    delay = memory // 2
    clean_power = float(np.mean(np.abs(sim.y0) ** 2))

    if gear.family == Family.ZXM:
        trellis = build_zxm_axis_trellis(gear.m_tx, memory)
        amp = 1.0 / math.sqrt(2.0)
        symbol_values = np.array([-amp, amp])
        mu = window_means(trellis, symbol_values, taps)
        entropy = sources.zxm_entropy_per_symbol(gear.m_tx)

        sigma_sq_axis = (
            sim.noise_var / 2.0
            + residual_isi_var(sim.y0, sim.u, taps, delay) / 2.0
            + pn_cov_entry("rotation", sigma_pn_sq, True) * clean_power / 2.0
        )
        emit = _sign_emissions(mu, math.sqrt(sigma_sq_axis))

        total = 0.0
        n_emitted = 0
        for signs, w_axis in (
            (sim.signs_i, sim.w.real),
            (sim.signs_q, sim.w.imag),
        ):
            idx = ((signs + 1) // 2).astype(np.int64)
            obs = (w_axis > 0).astype(np.int32)
            log_pw, log_puw = _chain_log_probs(trellis, emit, idx, obs)
            steps = len(idx) - memory
            total += sources.rll_entropy_rate(gear.m_tx - 1) + (
                (log_puw - log_pw) / steps / math.log(2.0)
            )
            n_emitted = steps
        mi = max(total, 0.0)
        return AuxChannelResult(mi, entropy, n_emitted, sigma_sq_axis, seed)

    # impulse radio: one real chain
    p_used = sim.p_on if p_on is None else p_on
    trellis = build_ir_trellis(gear.ir_variant, p_used, memory)
    amp = 1.0 / math.sqrt(p_used)
    entropy = sources.ir_entropy_per_symbol(p_used, gear.ir_variant)
    isi_var = residual_isi_var(sim.y0, sim.u, taps, delay)

    if gear.ir_variant == "variable-sign":
        symbol_values = np.array([0.0, amp, -amp])
        mu = window_means(trellis, symbol_values, taps)
        sigma_sq = (
            sim.noise_var / 2.0
            + isi_var
            + pn_cov_entry("real-projection", sigma_pn_sq, True) * clean_power
        )
        emit = _three_level_emissions(mu, math.sqrt(sigma_sq), sim.threshold)
        idx = np.zeros(len(sim.u), dtype=np.int64)
        idx[sim.u > 0] = 1
        idx[sim.u < 0] = 2
        # emission columns are ordered (-1, 0, +1)
        obs = np.where(sim.w < 0, 0, np.where(sim.w == 0, 1, 2)).astype(np.int32)
    else:
        symbol_values = np.array([0.0, amp])
        mu = window_means(trellis, symbol_values, taps)
        sigma_sq = sim.noise_var + isi_var  # phase noise cancels in |.|^2
        emit = _power_detect_emissions(mu, sigma_sq, sim.threshold)
        idx = (sim.u > 0).astype(np.int64)
        obs = sim.w.astype(np.int32)

    log_pw, log_puw = _chain_log_probs(trellis, emit, idx, obs)
    steps = len(idx) - memory
    mi = entropy + (log_puw - log_pw) / steps / math.log(2.0)
    return AuxChannelResult(max(mi, 0.0), entropy, steps, sigma_sq, seed)
