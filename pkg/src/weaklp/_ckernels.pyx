# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled versions of the profile kernels in ``_pykernels``."""
from libc.math cimport pow
from libc.stdlib cimport malloc, free

NAME = "cython"


def weak_norm_profile(const double[::1] values, const double[::1] masses, double q):
    cdef Py_ssize_t i, n = values.shape[0]
    cdef double inv_q = 1.0 / q
    cdef double t = 0.0, acc = 0.0, best = 0.0
    cdef double v, m, t0, a0, ts, g
    for i in range(n):
        v = values[i]
        m = masses[i]
        t0 = t
        a0 = acc
        t = t0 + m
        acc = a0 + v * m
        g = acc / pow(t, inv_q)
        if g > best:
            best = g
        if v > 0.0:
            ts = (a0 - v * t0) / (v * (q - 1.0))
            if t0 < ts < t:
                g = (a0 + v * (ts - t0)) / pow(ts, inv_q)
                if g > best:
                    best = g
    return best


def quasi_norm_profile(const double[::1] values, const double[::1] masses, double p):
    cdef Py_ssize_t i, n = values.shape[0]
    cdef double inv_p = 1.0 / p
    cdef double t = 0.0, best = 0.0, g
    for i in range(n):
        t = t + masses[i]
        g = values[i] * pow(t, inv_p)
        if g > best:
            best = g
    return best


def lq1_norm_profile(const double[::1] values, const double[::1] masses, double q):
    cdef Py_ssize_t i, n = values.shape[0]
    cdef double inv_q = 1.0 / q
    cdef double t = 0.0, prev = 0.0, cur, total = 0.0
    for i in range(n):
        t = t + masses[i]
        cur = pow(t, inv_q)
        total += values[i] * q * (cur - prev)
        prev = cur
    return total


def subset_oracle(const double[::1] absvals, double q):
    cdef Py_ssize_t n = absvals.shape[0]
    if n == 0:
        return 0.0
    if n > 30:
        raise ValueError("subset enumeration limited to 30 atoms")
    cdef Py_ssize_t total = (<Py_ssize_t>1) << n
    cdef Py_ssize_t mask, low, bit
    cdef double best = 0.0, g
    cdef double inv_q = 1.0 / q
    cdef double *sums = <double *>malloc(total * sizeof(double))
    cdef int *sizes = <int *>malloc(total * sizeof(int))
    cdef double *root = <double *>malloc((n + 1) * sizeof(double))
    if sums == NULL or sizes == NULL or root == NULL:
        free(sums)
        free(sizes)
        free(root)
        raise MemoryError()
    try:
        for bit in range(n + 1):
            root[bit] = pow(<double>bit, inv_q)
        sums[0] = 0.0
        sizes[0] = 0
        for mask in range(1, total):
            low = mask & (-mask)
            bit = 0
            while (low >> bit) != 1:
                bit += 1
            sums[mask] = sums[mask ^ low] + absvals[bit]
            sizes[mask] = sizes[mask ^ low] + 1
            g = sums[mask] / root[sizes[mask]]
            if g > best:
                best = g
    finally:
        free(sums)
        free(sizes)
        free(root)
    return best
