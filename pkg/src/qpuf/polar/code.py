"""RS4 kernel and the recursive quaternary polar encoder.

The generator for length ``N = 4**n`` is ``G = B_N K^{(x)n}``, with ``B_N``
the base-4 digit-reversal permutation on source indices.  Because the
Kronecker power commutes with digit reversal, encoding is the plain
Kronecker transform followed by digit reversal of the output positions.
"""

from functools import lru_cache

import numpy as np

from qpuf import gf4

# evaluation points (1, a, a^2, 0); a = 2, a^2 = 3 in label form
KERNEL = np.array(
    [
        [1, 1, 1, 0],
        [1, 3, 2, 0],
        [1, 2, 3, 0],
        [1, 1, 1, 1],
    ],
    dtype=np.uint8,
)
KERNEL_ID = "rs4-points-1.a.a2.0/v1"


def kernel_matrix():
    return KERNEL.copy()


def log4(n):
    m = 0
    while 4**m < n:
        m += 1
    if n < 1 or 4**m != n:
        raise ValueError(f"block length must be a power of 4, got {n}")
    return m


@lru_cache(maxsize=None)
def digit_reversal(n_len):
    """Permutation reversing the base-4 digits of each index (an involution)."""
    m = log4(n_len)
    idx = np.arange(n_len)
    out = np.zeros(n_len, dtype=np.int64)
    for d in range(m):
        out = out * 4 + (idx // 4**d) % 4
    out.setflags(write=False)
    return out


def kron_transform(u, kernel=KERNEL):
    """``u K^{(x)n}`` along the last axis, with no permutation."""
    u = np.asarray(u, dtype=np.uint8)
    n_len = u.shape[-1]
    m = log4(n_len)
    batch = u.shape[:-1]
    x = u.reshape(batch + (4,) * m)
    for ax in range(len(batch), len(batch) + m):
        x = np.moveaxis(x, ax, -1)
        y = np.zeros_like(x)
        for i in range(4):
            y ^= gf4.MUL[x[..., i, None], kernel[i]]
        x = np.moveaxis(y, -1, ax)
    return np.ascontiguousarray(x.reshape(batch + (n_len,)))


def encode(u):
    """Codeword ``u G`` for source words of length ``4**n`` (batched on leading axes)."""
    u = np.asarray(u, dtype=np.uint8)
    return kron_transform(u)[..., digit_reversal(u.shape[-1])]


@lru_cache(maxsize=None)
def _kernel_inverse():
    aug = np.hstack([KERNEL, np.eye(4, dtype=np.uint8)])
    red, piv = gf4.row_reduce(aug)
    if piv[:4] != [0, 1, 2, 3]:
        raise RuntimeError("kernel is singular")
    inv = np.ascontiguousarray(red[:, 4:])
    inv.setflags(write=False)
    return inv


def kernel_inverse():
    return _kernel_inverse().copy()


def unencode(x):
    """Source word ``u`` with ``encode(u) == x`` (batched on leading axes)."""
    x = np.asarray(x, dtype=np.uint8)
    return kron_transform(x[..., digit_reversal(x.shape[-1])], _kernel_inverse())


@lru_cache(maxsize=None)
def _generator(n_len):
    g = encode(np.eye(n_len, dtype=np.uint8))
    g.setflags(write=False)
    return g


def generator_matrix(n_len):
    return _generator(n_len).copy()


def generator_rows(n_len, indices):
    return _generator(n_len)[np.asarray(list(indices), dtype=np.int64)].copy()


@lru_cache(maxsize=None)
def _codeword_table():
    # row u (digits u0 u1 u2 u3, u0 most significant) -> u K
    msgs = np.array(np.unravel_index(np.arange(256), (4, 4, 4, 4)), dtype=np.uint8).T
    tab = gf4.matmul(msgs, KERNEL)
    tab.setflags(write=False)
    return tab


def codeword_table():
    """(256, 4) table of kernel codewords indexed by u0*64 + u1*16 + u2*4 + u3."""
    return _codeword_table()


@lru_cache(maxsize=None)
def _first_input_check():
    # h with K[1:] h^T = 0; then x in u0 K[0] + span(K[1:]) iff sum h_j x_j = u0 * sigma
    for cand in range(1, 256):
        h = np.array([(cand >> (2 * (3 - j))) & 3 for j in range(4)], dtype=np.uint8)
        if not gf4.matmul(KERNEL[1:], h[:, None]).any():
            if np.all(h):
                sigma = int(gf4.matmul(KERNEL[:1], h[:, None])[0, 0])
                return gf4.INV[h].copy(), sigma
    raise RuntimeError("kernel's bottom three rows do not form an MDS parity-check code")


def first_input_check():
    """(h^-1 per output position, syndrome of kernel row 0) for the f0 update."""
    return _first_input_check()
