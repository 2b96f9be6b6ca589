"""NumPy fallback for the trellis forward recursion.

Mirrors the compiled kernel exactly; edges are pre-sorted by destination
state so the per-step logsumexp folds with ``reduceat``.
"""

import numpy as np


def forward_log_prob(edge_from, edge_to, edge_logp, emit_log, obs, alpha0):
    """Return log P(obs) under the trellis model (natural log)."""
    edge_from = np.asarray(edge_from, dtype=np.int64)
    edge_to = np.asarray(edge_to, dtype=np.int64)
    edge_logp = np.asarray(edge_logp, dtype=np.float64)
    emit_log = np.asarray(emit_log, dtype=np.float64)
    obs = np.asarray(obs, dtype=np.int64)
    n_states = len(alpha0)

    order = np.argsort(edge_to, kind="stable")
    to_sorted = edge_to[order]
    from_sorted = edge_from[order]
    prior_sorted = edge_logp[order]
    emit_sorted = emit_log[order]

    # reduceat segment starts; destinations with no incoming edge stay -inf
    dest_states, seg_starts = np.unique(to_sorted, return_index=True)
    seg_of_edge = np.repeat(np.arange(len(dest_states)), np.diff(np.append(seg_starts, len(to_sorted))))

    alpha = np.array(alpha0, dtype=np.float64, copy=True)
    acc = 0.0
    for w in obs:
        scores = alpha[from_sorted] + prior_sorted + emit_sorted[:, w]
        seg_max = np.maximum.reduceat(scores, seg_starts)
        finite = seg_max > -np.inf
        with np.errstate(invalid="ignore"):
            diff = np.where(np.isfinite(scores), scores - seg_max[seg_of_edge], -np.inf)
        shifted = np.exp(diff)
        seg_sum = np.add.reduceat(shifted, seg_starts)
        new_alpha = np.full(n_states, -np.inf)
        with np.errstate(divide="ignore"):
            new_alpha[dest_states[finite]] = seg_max[finite] + np.log(seg_sum[finite])
        m = new_alpha.max()
        if m == -np.inf:
            return float("-inf")
        alpha = new_alpha - m
        acc += m
    return float(acc + np.log(np.exp(alpha).sum()))
