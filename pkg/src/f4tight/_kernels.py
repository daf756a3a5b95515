"""Compiled inner loops for perp counting and singular-point enumeration.

Points are packed codes (see :mod:`f4tight.pointset`).  For each outer point
the caller supplies the Gram-transformed vector t = G P, pre-packed:

* q = 2: one mask; B(P, z) = parity(popcount(t & z)).
* q = 3: two masks on the even bit positions, t1 (t_i = 1) and t2 (t_i = 2).
  A code z splits the same way into z1 = z & EVEN, z2 = (z >> 1) & EVEN, and
  B(P, z) = |z1&t1| + |z2&t2| - |z1&t2| - |z2&t1|  (mod 3).
* otherwise: unpacked t and table arithmetic per coordinate.
"""

from __future__ import annotations

import numba
import numpy as np
from numba import prange, types
from numba.extending import intrinsic

# prefer OpenMP; probing an outdated TBB only produces a warning
numba.config.THREADING_LAYER_PRIORITY = ["omp", "tbb", "workqueue"]


@intrinsic
def popcount(typingctx, x):
    sig = types.uint64(types.uint64)

    def codegen(context, builder, signature, args):
        return builder.ctpop(args[0])

    return sig, codegen


@numba.njit(parallel=True, cache=True)
def perp_counts_q2(ts, codes):
    out = np.zeros(len(ts), dtype=np.int64)
    for k in prange(len(ts)):
        t = ts[k]
        c = 0
        for z in codes:
            c += 1 - (popcount(t & z) & np.uint64(1))
        out[k] = c
    return out


@numba.njit(parallel=True, cache=True)
def perp_counts_p3(t1s, t2s, codes, even):
    out = np.zeros(len(t1s), dtype=np.int64)
    for k in prange(len(t1s)):
        t1 = t1s[k]
        t2 = t2s[k]
        c = 0
        for z in codes:
            z1 = z & even
            z2 = (z >> np.uint64(1)) & even
            pos = popcount(z1 & t1) + popcount(z2 & t2)
            neg = popcount(z1 & t2) + popcount(z2 & t1)
            if (pos + np.uint64(66) - neg) % np.uint64(3) == 0:
                c += 1
        out[k] = c
    return out


@numba.njit(parallel=True, cache=True)
def perp_counts_generic(tvecs, codes, bits, add_t, mul_t):
    m, dim = tvecs.shape
    mask = np.uint64((1 << bits) - 1)
    out = np.zeros(m, dtype=np.int64)
    for k in prange(m):
        c = 0
        for z in codes:
            acc = 0
            for i in range(dim):
                zi = (z >> np.uint64(i * bits)) & mask
                acc = add_t[acc, mul_t[tvecs[k, i], zi]]
            if acc == 0:
                c += 1
        out[k] = c
    return out


@numba.njit(cache=True)
def singular_vectors_q2(gram_rows, qdiag, dim):
    """Nonzero x in F_2^dim with Q(x) = 0, walked in Gray-code order.

    Flipping coordinate i changes Q by Q(e_i) + B(x, e_i), and
    B(x, e_i) = parity(x & gram_rows[i]).
    """
    x = np.uint64(0)
    qx = np.uint64(0)
    count = 0
    n = np.uint64(1) << np.uint64(dim)
    for step in range(np.uint64(1), n):
        i = 0
        s = step
        while (s & np.uint64(1)) == 0:
            s >>= np.uint64(1)
            i += 1
        qx ^= qdiag[i] ^ (popcount(x & gram_rows[i]) & np.uint64(1))
        x ^= np.uint64(1) << np.uint64(i)
        if qx == 0:
            count += 1
    return count


def set_threads(n: int | None) -> int:
    if n:
        numba.set_num_threads(max(1, min(int(n), numba.config.NUMBA_NUM_THREADS)))
    return numba.get_num_threads()
