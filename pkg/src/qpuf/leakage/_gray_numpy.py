"""Numpy fallback: meet in the middle.

The low ``lo`` generators are expanded into all 4**lo packed codewords once;
each high coefficient vector XORs its codeword into that table and counts
weights with ``np.bitwise_count``.  Chunk i covers high indices in order,
i.e. coefficient vectors ``i * 4**lo .. (i+1) * 4**lo - 1`` up to ordering.
"""

import numpy as np

from qpuf import gf4


def _all_codewords(rows, n_len):
    return gf4.span(np.asarray(rows, dtype=np.uint8).reshape(-1, n_len))


class MeetInMiddle:
    def __init__(self, generators, n_len, lo_max=8):
        g = np.asarray(generators, dtype=np.uint8).reshape(-1, n_len)
        self.n_len = n_len
        self.lo = min(g.shape[0], lo_max)
        self.low = gf4.pack_planes(_all_codewords(g[: self.lo], n_len))  # (4**lo, 2, W)
        self.high_rows = g[self.lo :]

    @property
    def chunk_size(self):
        return 4**self.lo

    def high_codeword(self, idx):
        k = self.high_rows.shape[0]
        if k == 0:
            return np.zeros((2, self.low.shape[-1]), dtype=np.uint64)
        digits = np.array(np.unravel_index(idx, (4,) * k), dtype=np.uint8)
        return gf4.pack_planes(gf4.matmul(digits[None], self.high_rows)[0])

    def chunk_hist(self, idx):
        x = self.low ^ self.high_codeword(idx)
        wt = np.bitwise_count(x[:, 0] | x[:, 1]).sum(axis=-1, dtype=np.int64)
        return np.bincount(wt, minlength=self.n_len + 1)
