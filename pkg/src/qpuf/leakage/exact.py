"""Exact small-N leakage by enumerating every output z in GF(4)^N.

Vectors are indexed by ``sum_i v_i 4**i``; GF(4) addition is XOR of these
indices, so coset sums ``F_{z-C}`` are XOR convolutions computed with a
Walsh-Hadamard transform over 2N bits.
"""

import numpy as np

from qpuf import gf4
from qpuf.leakage.subcode import LinearSubcode

EXACT_MAX_N = 8


def _check_n(n_len):
    if n_len > EXACT_MAX_N:
        raise ValueError(f"exact enumeration limited to N <= {EXACT_MAX_N}, got {n_len}")


def noise_masses(p0):
    p = np.asarray(p0, dtype=float)
    if p.ndim == 0:
        q = (1.0 - float(p)) / 3.0
        return np.array([float(p), q, q, q])
    return p


def noise_distribution(masses, n_len):
    """Pr{q = v} for i.i.d. symbols, indexed by ``sum v_i 4**i``."""
    p = noise_masses(masses)
    out = np.ones(1)
    for _ in range(n_len):
        out = np.outer(p, out).ravel()
    return out


def vector_index(v):
    v = np.asarray(v, dtype=np.int64)
    return (v * 4 ** np.arange(v.shape[-1])).sum(axis=-1)


def code_indicator(code):
    n_len = code.n_len if isinstance(code, LinearSubcode) else code[1]
    gens = code.generators if isinstance(code, LinearSubcode) else code[0]
    ind = np.zeros(4**n_len)
    ind[vector_index(gf4.span(gens) if len(gens) else np.zeros((1, n_len), np.uint8))] = 1.0
    return ind


def wht(a):
    a = np.array(a, dtype=float)
    n = a.size
    h = 1
    while h < n:
        a = a.reshape(-1, 2, h)
        a = np.stack([a[:, 0] + a[:, 1], a[:, 0] - a[:, 1]], axis=1).reshape(n)
        h *= 2
    return a


def coset_function(code, masses):
    """``F_{z-C}`` for every z: (P_q conv 1_C)(z) / |C|."""
    _check_n(code.n_len)
    pq = noise_distribution(masses, code.n_len)
    ind = code_indicator(code)
    conv = wht(wht(pq) * wht(ind)) / pq.size
    return np.maximum(conv, 0.0) / ind.sum()


def _plogp_ratio(p, q):
    nz = p > 0
    return float(np.sum(p[nz] * np.log2(p[nz] / q[nz])))


def exact_leakage(c1, c2, masses):
    """I(seed; z) = D(Pr{z | seed=0} || Pr{z}) in bits."""
    if c1.n_len != c2.n_len:
        raise ValueError("codes have different lengths")
    if c2.dimension and gf4.rank(np.vstack([c1.generators, c2.generators])) != c1.dimension:
        raise ValueError("C2 is not a subcode of C1")
    f2 = coset_function(c2, masses)
    f1 = coset_function(c1, masses)
    return max(_plogp_ratio(f2, f1), 0.0)


def bound_terms(c1, c2, p0):
    """(normalization of F_{z-C2}, coset-ratio term, C1 entropy term, bound)."""
    f2 = coset_function(c2, p0)
    f1 = coset_function(c1, p0)
    fc2 = f2[0]
    n_len = c2.n_len
    ratio = _plogp_ratio(f2, np.full_like(f2, fc2))
    nz = f1 > 0
    second = float(np.sum(f1[nz] * np.log2(fc2 / f1[nz])))
    bound = 2 * n_len + float(np.log2(fc2))
    return {"normalization": float(f2.sum()), "coset_ratio": ratio, "second": second, "bound": bound}


def brute_force_leakage(c1, c2, masses):
    """Naive O(4^N |C|) evaluation of both coset functions; test oracle only."""
    _check_n(c1.n_len)
    n_len = c1.n_len
    p = noise_masses(masses)
    zs = np.array(np.unravel_index(np.arange(4**n_len), (4,) * n_len)).T[:, ::-1].astype(np.uint8)

    def f(code):
        words = gf4.span(code.generators) if code.dimension else np.zeros((1, n_len), np.uint8)
        diff = zs[:, None, :] ^ words[None]
        return np.prod(p[diff], axis=-1).sum(axis=1) / len(words)

    f2, f1 = f(c2), f(c1)
    return _plogp_ratio(f2, f1), f2, f1
