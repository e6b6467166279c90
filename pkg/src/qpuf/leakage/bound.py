"""Secrecy-leakage upper bound from the mask subcode's weight histogram.

With ``q = (1 - p0) / 3`` and ``beta = q / p0``,

    log2 F_C(p0) = N log2 p0 - log2 |C| + log2 sum_w A_w beta^w
    bound        = 2N + log2 F_C2(p0)

For ``p0 >= 1/4`` we have ``beta <= 1`` and the sum is at least ``A_0 = 1``,
so it is accumulated directly with ``math.fsum``.  At ``p0 = 1/4`` every
term is exact and the bound is exactly zero.
"""

import math
from dataclasses import dataclass

import numpy as np

from qpuf import gf4
from qpuf.leakage.subcode import WeightHistogram, linear_subcode, weight_histogram


class BoundNotApplicable(ValueError):
    pass


@dataclass(frozen=True)
class LeakageBound:
    bits: float  # clamped at 0 for reporting
    raw_bits: float
    p0: float
    n_len: int
    dimension: int


def _counts(hist):
    return np.asarray(hist.counts if isinstance(hist, WeightHistogram) else hist, dtype=np.int64)


def log2_f_c(hist, p0):
    """log2 of ``F_C(p0) = |C|^-1 sum_v p0^(N-w) ((1-p0)/3)^w``, for 0 < p0 <= 1."""
    counts = _counts(hist)
    p0 = float(p0)
    if not 0.0 < p0 <= 1.0:
        raise ValueError(f"p0 must lie in (0, 1], got {p0}")
    n_len = len(counts) - 1
    size = int(counts.sum())
    beta = (1.0 - p0) / 3.0 / p0
    w = np.nonzero(counts)[0]
    if beta <= 1.0:
        s = math.fsum(float(counts[i]) * beta ** int(i) for i in w)
        log_sum = math.log2(s)
    else:
        terms = np.log2(counts[w].astype(float)) + w * math.log2(beta)
        top = terms.max()
        log_sum = top + math.log2(math.fsum(2.0 ** (terms - top)))
    return n_len * math.log2(p0) - math.log2(size) + log_sum


def check_masses(masses, tol=1e-12):
    """Return p0 when masses satisfy p1 = p2 = p3 = (1 - p0)/3, else raise."""
    p = np.asarray(masses, dtype=float)
    if p.shape != (4,) or abs(p.sum() - 1.0) > 1e-9:
        raise BoundNotApplicable("masses must be four probabilities summing to 1")
    if np.ptp(p[1:]) > tol:
        raise BoundNotApplicable("bound requires p1 = p2 = p3")
    return float(p[0])


def leakage_bound(hist, p0, n_len=None):
    """Upper bound (bits) on I(seed; helper data) for mask-subcode histogram ``hist``."""
    counts = _counts(hist)
    n = len(counts) - 1
    if n_len is not None and n_len != n:
        raise ValueError(f"histogram length {n + 1} does not match N = {n_len}")
    p0 = float(p0)
    if not 0.25 <= p0 <= 1.0:
        raise BoundNotApplicable(f"p0 must lie in [1/4, 1], got {p0}")
    raw = 2 * n + log2_f_c(counts, p0)
    dim = round(math.log(int(counts.sum()), 4))
    return LeakageBound(bits=max(raw, 0.0), raw_bits=raw, p0=p0, n_len=n, dimension=dim)


def monotonicity_probe(c2, extra_row, p0s, cap=16, backend=None):
    """Bounds before and after adding ``extra_row`` to the mask subcode, per p0."""
    p0s = np.atleast_1d(np.asarray(p0s, dtype=float))
    before = weight_histogram(c2, cap=cap, backend=backend)
    grown = linear_subcode(np.vstack([c2.generators, gf4.as_vector(extra_row)[None]]), c2.n_len)
    after = before if grown.dimension == c2.dimension else weight_histogram(grown, cap=cap, backend=backend)
    b0 = np.array([leakage_bound(before, p).raw_bits for p in p0s])
    b1 = np.array([leakage_bound(after, p).raw_bits for p in p0s])
    return b0, b1
