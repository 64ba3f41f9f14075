# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled batched statistics kernels.

Hot paths of the Monte Carlo error propagation: per-replicate weighted
moments (with possibly per-replicate jittered coordinates) and Shannon
entropies. Sums use four independent accumulators so the loops pipeline;
on the nonnegative weights these kernels see, that keeps the summation
error at ~(K/4)*eps relative, comparable to numpy's pairwise sums. The
variance takes a second pass around the mean to avoid cancellation.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport log

cnp.import_array()

BACKEND = "cython"

cdef double _ENTROPY_FLOOR = 1e-300


cdef inline double _sum(const double* w, Py_ssize_t n) noexcept nogil:
    cdef double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0
    cdef Py_ssize_t k = 0, n4 = n - (n & 3)
    while k < n4:
        s0 += w[k]
        s1 += w[k + 1]
        s2 += w[k + 2]
        s3 += w[k + 3]
        k += 4
    while k < n:
        s0 += w[k]
        k += 1
    return (s0 + s1) + (s2 + s3)


cdef inline void _sum_and_dot(
    const double* w, const double* x, Py_ssize_t n, double* total, double* dot
) noexcept nogil:
    cdef double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0
    cdef double d0 = 0.0, d1 = 0.0, d2 = 0.0, d3 = 0.0
    cdef Py_ssize_t k = 0, n4 = n - (n & 3)
    while k < n4:
        s0 += w[k]
        s1 += w[k + 1]
        s2 += w[k + 2]
        s3 += w[k + 3]
        d0 += w[k] * x[k]
        d1 += w[k + 1] * x[k + 1]
        d2 += w[k + 2] * x[k + 2]
        d3 += w[k + 3] * x[k + 3]
        k += 4
    while k < n:
        s0 += w[k]
        d0 += w[k] * x[k]
        k += 1
    total[0] = (s0 + s1) + (s2 + s3)
    dot[0] = (d0 + d1) + (d2 + d3)


cdef inline double _sumsq_dev(
    const double* w, const double* x, Py_ssize_t n, double mu
) noexcept nogil:
    cdef double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0
    cdef double e0, e1, e2, e3
    cdef Py_ssize_t k = 0, n4 = n - (n & 3)
    while k < n4:
        e0 = x[k] - mu
        e1 = x[k + 1] - mu
        e2 = x[k + 2] - mu
        e3 = x[k + 3] - mu
        s0 += w[k] * e0 * e0
        s1 += w[k + 1] * e1 * e1
        s2 += w[k + 2] * e2 * e2
        s3 += w[k + 3] * e3 * e3
        k += 4
    while k < n:
        e0 = x[k] - mu
        s0 += w[k] * e0 * e0
        k += 1
    return (s0 + s1) + (s2 + s3)


def batch_weighted_moments(weights, centers):
    """Mean and variance of each row of ``weights`` over ``centers``.

    Args:
        weights: (B, K) nonnegative float array; rows need not be normalized.
        centers: (K,) shared coordinates, or (B, K) per-row coordinates.

    Returns:
        (means, variances) float arrays of shape (B,).
    """
    cdef cnp.ndarray[cnp.float64_t, ndim=2] w = np.ascontiguousarray(weights, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=2] x2
    cdef cnp.ndarray[cnp.float64_t, ndim=1] x1
    cdef Py_ssize_t B = w.shape[0], K = w.shape[1], b
    cdef cnp.ndarray[cnp.float64_t, ndim=1] means = np.empty(B)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] variances = np.empty(B)
    cdef bint shared = (np.ndim(centers) == 1)
    cdef double total, dot, mu
    cdef const double* xrow
    if shared:
        x1 = np.ascontiguousarray(centers, dtype=np.float64)
        if x1.shape[0] != K:
            raise ValueError("centers length does not match weights")
    else:
        x2 = np.ascontiguousarray(centers, dtype=np.float64)
        if x2.shape[0] != B or x2.shape[1] != K:
            raise ValueError("centers shape does not match weights")
    with nogil:
        for b in range(B):
            xrow = &x1[0] if shared else &x2[b, 0]
            _sum_and_dot(&w[b, 0], xrow, K, &total, &dot)
            if total <= 0.0:
                with gil:
                    raise ValueError("every row must have positive total weight")
            mu = dot / total
            means[b] = mu
            variances[b] = _sumsq_dev(&w[b, 0], xrow, K, mu) / total
    return means, variances


def batch_entropy(weights):
    """Shannon entropy (nats) of each row, normalizing by the row total.

    Args:
        weights: (B, K) nonnegative float array.

    Returns:
        (B,) array of -sum(q ln q) with q = w/total and 0 ln 0 = 0.
    """
    cdef cnp.ndarray[cnp.float64_t, ndim=2] w = np.ascontiguousarray(weights, dtype=np.float64)
    cdef Py_ssize_t B = w.shape[0], K = w.shape[1], b, k, K2
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty(B)
    cdef double total, s0, s1, wa, wb_
    K2 = K - (K & 1)
    with nogil:
        for b in range(B):
            total = _sum(&w[b, 0], K)
            if total <= 0.0:
                with gil:
                    raise ValueError("every row must have positive total weight")
            s0 = 0.0
            s1 = 0.0
            k = 0
            while k < K2:
                wa = w[b, k]
                wb_ = w[b, k + 1]
                if wa > _ENTROPY_FLOOR:
                    s0 += wa * log(wa)
                if wb_ > _ENTROPY_FLOOR:
                    s1 += wb_ * log(wb_)
                k += 2
            if k < K:
                wa = w[b, k]
                if wa > _ENTROPY_FLOOR:
                    s0 += wa * log(wa)
            out[b] = log(total) - (s0 + s1) / total
    return out
