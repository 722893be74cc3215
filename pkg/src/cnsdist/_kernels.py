"""Compiled inner loops for the Poisson-binomial recursion."""

import warnings

import numpy as np
from numba import NumbaWarning, njit, prange

warnings.filterwarnings("ignore", message="The TBB threading layer", category=NumbaWarning)

# coefficients below this at either end of the running window are dropped
TAIL = 1e-17
# fixed chunking keeps pair reductions bit-stable for any thread count
N_CHUNKS = 64


@njit(cache=True)
def pb_window(ps, buf, tiny):
    """Multiply out prod_t (1 - p_t + p_t x) into ``buf``.

    Returns the inclusive index window ``(lo, hi)`` holding the non-negligible
    coefficients; entries outside it are zero.
    """
    buf[0] = 1.0
    lo = 0
    hi = 0
    for t in range(ps.shape[0]):
        p = ps[t]
        q = 1.0 - p
        buf[hi + 1] = buf[hi] * p
        for w in range(hi, lo, -1):
            buf[w] = buf[w] * q + buf[w - 1] * p
        buf[lo] = buf[lo] * q
        hi += 1
        while hi > lo and buf[hi] < tiny:
            hi -= 1
        while lo < hi and buf[lo] < tiny:
            lo += 1
    return lo, hi


@njit(cache=True)
def pb_dense(ps, tiny):
    buf = np.zeros(ps.shape[0] + 2)
    lo, hi = pb_window(ps, buf, tiny)
    out = np.zeros(hi + 1)
    out[lo:hi + 1] = buf[lo:hi + 1]
    return out


@njit(parallel=True, cache=True)
def pair_class_accumulate(gamma, eps, tiny):
    """Accumulate per-pair CNS distributions over all pairs of a dense model.

    Returns an array ``(3, N_CHUNKS, n-1)`` of partial sums of ``P_ij``,
    ``gamma_ij * P_ij`` and ``(1 - gamma_ij) * P_ij``. Rows ``i`` are dealt to
    chunks round-robin.
    """
    n = gamma.shape[0]
    width = max(n - 1, 1)
    acc = np.zeros((3, N_CHUNKS, width))
    for c in prange(N_CHUNKS):
        buf = np.zeros(n + 2)
        ps = np.empty(n)
        for i in range(c, n, N_CHUNKS):
            gi = gamma[i]
            for j in range(i + 1, n):
                gj = gamma[j]
                k = 0
                for t in range(n):
                    p = gi[t] * gj[t]
                    if p >= eps:
                        ps[k] = p
                        k += 1
                lo, hi = pb_window(ps[:k], buf, tiny)
                g = gi[j]
                for w in range(lo, hi + 1):
                    v = buf[w]
                    acc[0, c, w] += v
                    acc[1, c, w] += g * v
                    acc[2, c, w] += (1.0 - g) * v
    return acc
