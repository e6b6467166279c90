"""Compiled successive-cancellation kernels.

Layout shared by all kernels (length N = 4**n, natural source order):

* ``chan``  (N, 4)      channel LLR vectors, already un-permuted
* ``llr``   (tot, 4)    LLRs of levels 1..n; level l holds N / 4**l vectors
                        starting at ``off[l]``
* ``psum``  (n+1, 4, N/4)  re-encoded sub-blocks: ``psum[l, i, t]`` is symbol
                        t of the codeword of sub-block i at level l

Node outputs are stored relative to their most likely symbol (minimum 0)
and clamped above only.  Max-log updates are invariant to per-vector
shifts, so this changes no decision, while clamping relative to symbol 0
would collapse strongly negative entries into ties deep in the tree.

``_node`` must stay operation-for-operation identical to
``_sc_numpy.node_llrs``; the two backends are compared bit for bit.
"""

import numpy as np

from qpuf._accel import njit


@njit
def level_offsets(n_len, m):
    off = np.zeros(m + 2, dtype=np.int64)
    for lv in range(1, m + 1):
        off[lv + 1] = off[lv] + (n_len >> (2 * lv))
    return off


@njit
def _node(src, base, stride, k, code, table, hinv, sigma, mul, clamp, dst, dpos, sc):
    if k == 0:
        # u0 = s  <=>  sum_j h_j x_j = s * sigma: XOR max-convolution
        for j in range(4):
            for a in range(4):
                sc[4 * j + a] = -src[base + j * stride, mul[hinv[j], a]]
        for e in range(4):
            b01 = -np.inf
            b23 = -np.inf
            for a in range(4):
                v = sc[a] + sc[4 + (a ^ e)]
                if v > b01:
                    b01 = v
                v = sc[8 + a] + sc[12 + (a ^ e)]
                if v > b23:
                    b23 = v
            sc[16 + e] = b01
            sc[20 + e] = b23
        for s in range(4):
            syn = mul[s, sigma]
            b = -np.inf
            for e in range(4):
                v = sc[16 + e] + sc[20 + (e ^ syn)]
                if v > b:
                    b = v
            sc[24 + s] = b
    else:
        span = 1 << (2 * (3 - k))
        r0 = base
        r1 = base + stride
        r2 = base + 2 * stride
        r3 = base + 3 * stride
        for s in range(4):
            first = (code * 4 + s) * span
            b = -np.inf
            for c in range(span):
                row = first + c
                v = -(src[r0, table[row, 0]] + src[r1, table[row, 1]]
                      + src[r2, table[row, 2]] + src[r3, table[row, 3]])
                if v > b:
                    b = v
            sc[24 + s] = b
    # relative to the best symbol so saturation never merges likely candidates
    top = sc[24]
    for s in range(1, 4):
        if sc[24 + s] > top:
            top = sc[24 + s]
    for s in range(4):
        v = top - sc[24 + s]
        if v > clamp:
            v = clamp
        dst[dpos, s] = v


@njit
def _start_level(phi, n_len, m):
    if phi == 0:
        return 1
    for lv in range(1, m + 1):
        sz = n_len >> (2 * lv)
        if phi // sz != (phi - 1) // sz:
            return lv
    return m


@njit
def _update_llrs(phi, start, n_len, m, chan, llr, psum, off, table, hinv, sigma, mul, clamp, sc):
    for lv in range(start, m + 1):
        sz = n_len >> (2 * lv)
        i = (phi // sz) % 4
        for t in range(sz):
            code = 0
            for h in range(i):
                code = code * 4 + psum[lv, h, t]
            if lv == 1:
                _node(chan, t, sz, i, code, table, hinv, sigma, mul, clamp, llr, off[lv] + t, sc)
            else:
                _node(llr, off[lv - 1] + t, sz, i, code, table, hinv, sigma, mul, clamp,
                      llr, off[lv] + t, sc)


@njit
def _update_psum(phi, v, n_len, m, psum, kernel, mul):
    psum[m, phi % 4, 0] = v
    lv = m
    while lv > 1 and (phi // (n_len >> (2 * lv))) % 4 == 3:
        sz = n_len >> (2 * lv)
        dst = (phi // (n_len >> (2 * (lv - 1)))) % 4
        for t in range(sz):
            for j in range(4):
                acc = 0
                for i in range(4):
                    acc ^= mul[kernel[i, j], psum[lv, i, t]]
                psum[lv - 1, dst, j * sz + t] = acc
        lv -= 1


@njit
def genie_errors(chan_batch, u_batch, m, table, hinv, sigma, kernel, mul, clamp):
    """Per-position count of frames whose local SC decision misses the true symbol."""
    n_frames, n_len = u_batch.shape
    off = level_offsets(n_len, m)
    errs = np.zeros(n_len, dtype=np.int64)
    llr = np.zeros((off[m + 1], 4))
    psum = np.zeros((m + 1, 4, max(n_len // 4, 1)), dtype=np.uint8)
    sc = np.empty(28)
    leaf = off[m]
    for f in range(n_frames):
        chan = chan_batch[f]
        for phi in range(n_len):
            start = _start_level(phi, n_len, m)
            _update_llrs(phi, start, n_len, m, chan, llr, psum, off, table, hinv, sigma, mul,
                         clamp, sc)
            best = 0
            for s in range(1, 4):
                if llr[leaf, s] < llr[leaf, best]:
                    best = s
            truth = u_batch[f, phi]
            if best != truth:
                errs[phi] += 1
            _update_psum(phi, truth, n_len, m, psum, kernel, mul)
    return errs


@njit
def scl_decode_batch(chan_batch, frozen_mask, frozen_vals, list_size, m, table, hinv, sigma,
                     kernel, mul, clamp, out_u, out_metric, out_count):
    """List decoding of every frame; surviving paths sorted by ascending metric."""
    n_frames, n_len = chan_batch.shape[0], chan_batch.shape[1]
    off = level_offsets(n_len, m)
    tot = off[m + 1]
    leaf = off[m]
    width = max(n_len // 4, 1)
    cap = list_size
    llr = np.zeros((cap, tot, 4))
    psum = np.zeros((cap, m + 1, 4, width), dtype=np.uint8)
    u = np.zeros((cap, n_len), dtype=np.uint8)
    metric = np.zeros(cap)
    n_llr = np.zeros((cap, tot, 4))
    n_psum = np.zeros((cap, m + 1, 4, width), dtype=np.uint8)
    n_u = np.zeros((cap, n_len), dtype=np.uint8)
    n_metric = np.zeros(cap)
    cand = np.empty(4 * cap)
    lams = np.empty((cap, 4))
    sc = np.empty(28)
    for f in range(n_frames):
        chan = chan_batch[f]
        npaths = 1
        metric[0] = 0.0
        for phi in range(n_len):
            start = _start_level(phi, n_len, m)
            for p in range(npaths):
                _update_llrs(phi, start, n_len, m, chan, llr[p], psum[p], off, table, hinv,
                             sigma, mul, clamp, sc)
                lo = llr[p, leaf, 0]
                for s in range(1, 4):
                    if llr[p, leaf, s] < lo:
                        lo = llr[p, leaf, s]
                for s in range(4):
                    lams[p, s] = llr[p, leaf, s] - lo
            if frozen_mask[phi]:
                v = frozen_vals[phi]
                for p in range(npaths):
                    metric[p] += lams[p, v]
                    u[p, phi] = v
                    _update_psum(phi, v, n_len, m, psum[p], kernel, mul)
                continue
            nc = 4 * npaths
            for p in range(npaths):
                for s in range(4):
                    cand[p * 4 + s] = metric[p] + lams[p, s]
            order = np.argsort(cand[:nc], kind="mergesort")
            keep = min(cap, nc)
            for q in range(keep):
                c = order[q]
                parent = c // 4
                n_llr[q] = llr[parent]
                n_psum[q] = psum[parent]
                n_u[q] = u[parent]
                n_metric[q] = cand[c]
                n_u[q, phi] = c % 4
                _update_psum(phi, c % 4, n_len, m, n_psum[q], kernel, mul)
            llr, n_llr = n_llr, llr
            psum, n_psum = n_psum, psum
            u, n_u = n_u, u
            metric, n_metric = n_metric, metric
            npaths = keep
        order = np.argsort(metric[:npaths], kind="mergesort")
        for q in range(npaths):
            out_u[f, q] = u[order[q]]
            out_metric[f, q] = metric[order[q]]
        out_count[f] = npaths
