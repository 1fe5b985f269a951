"""Pure-Python/numpy implementations of the summation kernels.

Every function works on a single power-law ladder ``E_n = coef * n**alpha``
(n >= 1) and returns sums *scaled by the ground level*, i.e. built from
``x_n = exp(-beta * (E_n - E_1))`` so that ``x_1 == 1``.
"""
import math

import numpy as np

_CHUNK = 1 << 18


def _level_gaps(coef, alpha, beta, start, stop):
    n = np.arange(start, stop, dtype=np.float64)
    if alpha == 2.0:
        return beta * coef * ((n - 1.0) * (n + 1.0))
    return beta * coef * (n**alpha - 1.0)


def scaled_power_sums(coef, alpha, beta, n_terms, n_powers, first=1):
    """Return ``[sum_n x_n**k for k in 1..n_powers]`` over levels first..n_terms."""
    parts = [[] for _ in range(n_powers)]
    for start in range(first, n_terms + 1, _CHUNK):
        stop = min(start + _CHUNK, n_terms + 1)
        gaps = _level_gaps(coef, alpha, beta, start, stop)
        for k in range(n_powers):
            parts[k].append(math.fsum(np.exp(-(k + 1) * gaps)))
    return [math.fsum(p) for p in parts]


def scaled_complete_symmetric(coef, alpha, beta, n_terms, n_particles):
    """Complete homogeneous symmetric polynomials h_0..h_N of the scaled levels."""
    h = [1.0] + [0.0] * n_particles
    for start in range(1, n_terms + 1, _CHUNK):
        stop = min(start + _CHUNK, n_terms + 1)
        for x in np.exp(-_level_gaps(coef, alpha, beta, start, stop)).tolist():
            for n in range(1, n_particles + 1):
                h[n] += x * h[n - 1]
    return h


def scaled_elementary_symmetric(coef, alpha, beta, n_terms, n_particles):
    """Elementary symmetric polynomials e_n, each divided by x_1*...*x_n.

    The per-order normalisation keeps every entry >= 1 however deep the
    Fermi sea lies, so no underflow occurs at low temperature.
    """
    e = [1.0] + [0.0] * n_particles
    pows = [float(n) ** alpha for n in range(1, n_particles + 1)]
    scale = beta * coef
    for j in range(1, n_terms + 1):
        ja = float(j) ** alpha
        for n in range(min(j, n_particles), 0, -1):
            e[n] += math.exp(-scale * (ja - pows[n - 1])) * e[n - 1]
    return e
