# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled log-domain forward recursion over a time-invariant trellis.

Branch scores are `edge_logp[e] + emit_log[e, obs[k]]`; per step the
recursion folds all incoming branches of each destination state with a
numerically stable two-pass logsumexp and renormalizes by the running
maximum so sequences of arbitrary length stay in range.
"""

from libc.math cimport exp, log, INFINITY

import numpy as np


def forward_log_prob(
    int[::1] edge_from,
    int[::1] edge_to,
    double[::1] edge_logp,
    double[:, ::1] emit_log,
    int[::1] obs,
    double[::1] alpha0,
):
    """Return log P(obs) under the trellis model (natural log)."""
    cdef Py_ssize_t n_edges = edge_from.shape[0]
    cdef Py_ssize_t n_states = alpha0.shape[0]
    cdef Py_ssize_t n_obs = obs.shape[0]
    cdef Py_ssize_t k, e, s
    cdef int w
    cdef double score, m, acc, lse

    alpha_arr = np.array(alpha0, dtype=np.float64, copy=True)
    newmax_arr = np.empty(n_states, dtype=np.float64)
    sums_arr = np.empty(n_states, dtype=np.float64)
    scores_arr = np.empty(n_edges, dtype=np.float64)
    cdef double[::1] alpha = alpha_arr
    cdef double[::1] newmax = newmax_arr
    cdef double[::1] sums = sums_arr
    cdef double[::1] scores = scores_arr

    acc = 0.0
    for k in range(n_obs):
        w = obs[k]
        for s in range(n_states):
            newmax[s] = -INFINITY
            sums[s] = 0.0
        for e in range(n_edges):
            score = alpha[edge_from[e]] + edge_logp[e] + emit_log[e, w]
            scores[e] = score
            if score > newmax[edge_to[e]]:
                newmax[edge_to[e]] = score
        for e in range(n_edges):
            s = edge_to[e]
            if newmax[s] > -INFINITY:
                sums[s] += exp(scores[e] - newmax[s])
        m = -INFINITY
        for s in range(n_states):
            if sums[s] > 0.0:
                alpha[s] = newmax[s] + log(sums[s])
            else:
                alpha[s] = -INFINITY
            if alpha[s] > m:
                m = alpha[s]
        if m == -INFINITY:
            return float("-inf")
        for s in range(n_states):
            if alpha[s] > -INFINITY:
                alpha[s] -= m
        acc += m

    lse = 0.0
    for s in range(n_states):
        if alpha[s] > -INFINITY:
            lse += exp(alpha[s])
    return acc + log(lse)
