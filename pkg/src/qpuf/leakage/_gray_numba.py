"""Compiled base-4 Gray-code weight enumeration.

Coefficient vector k (base-4 digits a_d) maps to Gray digits
``g_d = (a_d - a_{d+1}) mod 4``.  Going from k-1 to k only digit
``d = ctz(k) // 2`` moves, by +1, so the running codeword changes by one
row multiple.  Gray digits are mapped to labels through 0, 1, 3, 2, making
each step an XOR with row*1 (even g before the step) or row*alpha (odd).
"""

import numpy as np
from llvmlite import ir
from numba import prange, types
from numba.extending import intrinsic

from qpuf._accel import njit

SEQ = np.array([0, 1, 3, 2], dtype=np.uint8)


@intrinsic
def _popcount(typingctx, x):
    sig = types.uint64(types.uint64)

    def codegen(context, builder, signature, args):
        return builder.ctpop(args[0])

    return sig, codegen


@intrinsic
def _ctz(typingctx, x):
    sig = types.int64(types.int64)

    def codegen(context, builder, signature, args):
        return builder.cttz(args[0], ir.Constant(ir.IntType(1), 0))

    return sig, codegen


@njit
def start_codeword(rows1, rows2, k, seq):
    """Packed codeword at Gray index ``k``."""
    r, _, w = rows1.shape
    cur = np.zeros((2, w), dtype=np.uint64)
    for d in range(r):
        g = (((k >> (2 * d)) & 3) - ((k >> (2 * d + 2)) & 3)) & 3
        lab = seq[g]
        if lab & 1:
            for p in range(2):
                for i in range(w):
                    cur[p, i] ^= rows1[d, p, i]
        if lab & 2:
            for p in range(2):
                for i in range(w):
                    cur[p, i] ^= rows2[d, p, i]
    return cur


@njit
def _weight(cur, w):
    t = 0
    for i in range(w):
        t += _popcount(cur[0, i] | cur[1, i])
    return t


@njit
def gray_range(rows1, rows2, start, stop, seq, hist):
    """Add weights of Gray indices ``start..stop-1`` into ``hist``."""
    w = rows1.shape[2]
    cur = start_codeword(rows1, rows2, start, seq)
    hist[_weight(cur, w)] += 1
    for k in range(start + 1, stop):
        d = _ctz(k) >> 1
        g = (((k >> (2 * d)) & 3) - ((k >> (2 * d + 2)) & 3)) & 3
        if (g - 1) & 1:
            for p in range(2):
                for i in range(w):
                    cur[p, i] ^= rows2[d, p, i]
        else:
            for p in range(2):
                for i in range(w):
                    cur[p, i] ^= rows1[d, p, i]
        hist[_weight(cur, w)] += 1


@njit(parallel=True)
def gray_chunks(rows1, rows2, bounds, n_len, seq):
    """Per-chunk histograms for the sub-ranges ``bounds[i]..bounds[i+1]``."""
    nc = bounds.shape[0] - 1
    out = np.zeros((nc, n_len + 1), dtype=np.int64)
    for c in prange(nc):
        gray_range(rows1, rows2, bounds[c], bounds[c + 1], seq, out[c])
    return out
