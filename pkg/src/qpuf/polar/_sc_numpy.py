"""Vectorized numpy twins of the compiled SC kernels.

Same arithmetic in the same order, so results agree bit for bit.  The
leading axis is a batch: frames for the genie simulation, paths for list
decoding.
"""

import numpy as np

from qpuf.gf4 import MUL
from qpuf.polar.code import KERNEL, codeword_table, first_input_check

_XOR = np.arange(4)[:, None] ^ np.arange(4)[None, :]  # [e, a] -> a ^ e


def node_llrs(lams, k, code, clamp):
    """Output LLRs of kernel input ``k`` for a batch of nodes.

    ``lams``: (B, M, 4, 4) input LLRs [batch, node, kernel output j, symbol];
    ``code``: (B, M) decided prefix u_0..u_{k-1} as a base-4 number.
    Outputs are relative to the most likely symbol and clamped to [0, clamp].
    """
    best = best_scores(lams, k, code)
    return np.minimum(best.max(axis=-1, keepdims=True) - best, clamp)


def best_scores(lams, k, code):
    """max over completions of -sum_j lams[j, x_j], for each value of u_k."""
    if k == 0:
        hinv, sigma = first_input_check()
        # u0 = s  <=>  sum_j h_j x_j = s * sigma: XOR max-convolution
        g = -lams[..., np.arange(4)[:, None], MUL[hinv]]  # (B, M, j, a)
        p01 = (g[..., 0, None, :] + g[..., 1, _XOR]).max(axis=-1)  # (B, M, e)
        p23 = (g[..., 2, None, :] + g[..., 3, _XOR]).max(axis=-1)
        syn = MUL[np.arange(4), sigma]
        return (p01[..., None, :] + p23[..., _XOR[syn]]).max(axis=-1)
    table = codeword_table().astype(np.intp)
    span = 4 ** (3 - k)
    s = np.arange(4)[:, None]
    c = np.arange(span)[None, :]
    rows = (code[..., None, None] * 4 + s) * span + c  # (B, M, 4, span)
    x = table[rows]  # (B, M, 4, span, 4)
    bi = np.arange(lams.shape[0])[:, None, None, None]
    ti = np.arange(lams.shape[1])[None, :, None, None]
    r = -(
        lams[bi, ti, 0, x[..., 0]]
        + lams[bi, ti, 1, x[..., 1]]
        + lams[bi, ti, 2, x[..., 2]]
        + lams[bi, ti, 3, x[..., 3]]
    )
    return r.max(axis=-1)


class _Tree:
    """Per-level LLR and partial-sum buffers for a batch of decoders."""

    def __init__(self, chan, m):
        self.chan = chan  # (B, N, 4) natural order
        self.n_len = chan.shape[1]
        self.m = m
        b = chan.shape[0]
        self.llr = [None] + [np.zeros((b, self.n_len >> (2 * lv), 4)) for lv in range(1, m + 1)]
        self.psum = [None] + [
            np.zeros((b, 4, self.n_len >> (2 * lv)), dtype=np.uint8) for lv in range(1, m + 1)
        ]

    def start_level(self, phi):
        if phi == 0:
            return 1
        for lv in range(1, self.m + 1):
            sz = self.n_len >> (2 * lv)
            if phi // sz != (phi - 1) // sz:
                return lv
        return self.m

    def update_llrs(self, phi, clamp):
        for lv in range(self.start_level(phi), self.m + 1):
            sz = self.n_len >> (2 * lv)
            i = (phi // sz) % 4
            src = self.chan if lv == 1 else self.llr[lv - 1]
            b = src.shape[0]
            lams = src.reshape(b, 4, sz, 4).transpose(0, 2, 1, 3)
            code = np.zeros((b, sz), dtype=np.int64)
            for h in range(i):
                code = code * 4 + self.psum[lv][:, h, :]
            self.llr[lv] = node_llrs(lams, i, code, clamp)
        return self.llr[self.m][:, 0, :]

    def update_psum(self, phi, v):
        m, n_len = self.m, self.n_len
        self.psum[m][:, phi % 4, 0] = v
        lv = m
        while lv > 1 and (phi // (n_len >> (2 * lv))) % 4 == 3:
            sz = n_len >> (2 * lv)
            dst = (phi // (n_len >> (2 * (lv - 1)))) % 4
            src = self.psum[lv]
            for j in range(4):
                acc = np.zeros_like(src[:, 0, :])
                for i in range(4):
                    acc ^= MUL[KERNEL[i, j]][src[:, i, :]]
                self.psum[lv - 1][:, dst, j * sz : (j + 1) * sz] = acc
            lv -= 1

    def select(self, parents):
        self.llr = [None] + [a[parents] for a in self.llr[1:]]
        self.psum = [None] + [a[parents] for a in self.psum[1:]]
        self.chan = self.chan[parents]


def genie_errors(chan_batch, u_batch, m, clamp):
    tree = _Tree(np.asarray(chan_batch, dtype=float), m)
    n_len = u_batch.shape[1]
    errs = np.zeros(n_len, dtype=np.int64)
    for phi in range(n_len):
        lam = tree.update_llrs(phi, clamp)
        truth = u_batch[:, phi]
        errs[phi] = np.count_nonzero(np.argmin(lam, axis=1) != truth)
        tree.update_psum(phi, truth)
    return errs


def scl_decode(chan, frozen_mask, frozen_vals, list_size, m, clamp):
    """List decoding of one frame; returns (paths (P, N), metrics (P,))."""
    n_len = chan.shape[0]
    tree = _Tree(np.asarray(chan, dtype=float)[None], m)
    u = np.zeros((1, n_len), dtype=np.uint8)
    metric = np.zeros(1)
    for phi in range(n_len):
        lam = tree.update_llrs(phi, clamp)
        lam = lam - lam.min(axis=1, keepdims=True)
        if frozen_mask[phi]:
            v = int(frozen_vals[phi])
            metric = metric + lam[:, v]
            u[:, phi] = v
            tree.update_psum(phi, v)
            continue
        cand = (metric[:, None] + lam).reshape(-1)
        keep = min(list_size, cand.size)
        order = np.argsort(cand, kind="stable")[:keep]
        parents, syms = order // 4, (order % 4).astype(np.uint8)
        tree.select(parents)
        u = u[parents]
        u[:, phi] = syms
        metric = cand[order]
        tree.update_psum(phi, syms)
    order = np.argsort(metric, kind="stable")
    return u[order], metric[order]
