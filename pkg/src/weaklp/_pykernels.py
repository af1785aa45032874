"""Numpy implementations of the hot kernels.

Used when the compiled ``_ckernels`` extension is unavailable or when
``WEAKLP_BACKEND=python`` is set.  Every function takes a decreasing
rearrangement as two contiguous float64 arrays (``values``, ``masses``).
"""
import numpy as np

NAME = "python"


def weak_norm_profile(values, masses, q):
    """sup over t of (integral of f* on (0, t)) / t**(1/q)."""
    if values.shape[0] == 0:
        return 0.0
    t = np.cumsum(masses)
    acc = np.cumsum(values * masses)
    best = float(np.max(acc / t ** (1.0 / q)))

    # interior stationary points of each piece
    t0 = t - masses
    a0 = acc - values * masses
    pos = values > 0
    if np.any(pos):
        v = values[pos]
        lo = t0[pos]
        hi = t[pos]
        base = a0[pos]
        ts = (base - v * lo) / (v * (q - 1.0))
        inside = (ts > lo) & (ts < hi)
        if np.any(inside):
            ts = ts[inside]
            g = (base[inside] + v[inside] * (ts - lo[inside])) / ts ** (1.0 / q)
            best = max(best, float(np.max(g)))
    return best


def quasi_norm_profile(values, masses, p):
    if values.shape[0] == 0:
        return 0.0
    t = np.cumsum(masses)
    return float(np.max(values * t ** (1.0 / p)))


def lq1_norm_profile(values, masses, q):
    if values.shape[0] == 0:
        return 0.0
    t = np.cumsum(masses)
    t0 = t - masses
    return float(np.sum(values * q * (t ** (1.0 / q) - t0 ** (1.0 / q))))


def subset_oracle(absvals, q):
    """Literal max over all nonempty index sets B of sum_B |a| / |B|**(1/q)."""
    n = absvals.shape[0]
    if n == 0:
        return 0.0
    sums = np.zeros(1)
    sizes = np.zeros(1, dtype=np.int64)
    for a in absvals:
        sums = np.concatenate([sums, sums + a])
        sizes = np.concatenate([sizes, sizes + 1])
    return float(np.max(sums[1:] / sizes[1:] ** (1.0 / q)))
