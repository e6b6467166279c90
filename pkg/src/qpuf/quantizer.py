"""Quaternary response extraction from one-frequencies."""

import math
from dataclasses import dataclass

import numpy as np
from scipy import stats

from qpuf import puf_model
from qpuf.puf_model import SRAM


@dataclass(frozen=True)
class QuantizerThresholds:
    a: float
    b: float
    c: float

    def __post_init__(self):
        if not 0.0 < self.a < self.b < self.c < 1.0:
            raise ValueError(f"thresholds must satisfy 0 < a < b < c < 1, got {self.astuple()}")

    def astuple(self):
        return (self.a, self.b, self.c)


@dataclass(frozen=True)
class ResponseDistribution:
    p0: float
    p1: float
    p2: float
    p3: float

    def __post_init__(self):
        ps = self.astuple()
        if any(not 0.0 <= p <= 1.0 for p in ps) or abs(math.fsum(ps) - 1.0) > 1e-12:
            raise ValueError(f"not a probability distribution: {ps}")

    def astuple(self):
        return (self.p0, self.p1, self.p2, self.p3)

    def asarray(self):
        return np.array(self.astuple())

    @classmethod
    def from_p0(cls, p0):
        """Masses with p1 = p2 = p3 = (1 - p0) / 3."""
        q = (1.0 - p0) / 3.0
        return cls(p0, q, q, 1.0 - p0 - 2 * q)

    @property
    def is_symmetric(self):
        """True when p1 = p2 = p3 (the leakage-bound hypothesis)."""
        return max(self.p1, self.p2, self.p3) - min(self.p1, self.p2, self.p3) <= 1e-12


def quantize(one_frequency, t):
    """0 on [0, a), 1 on [a, b), 2 on [b, c), 3 on [c, 1]."""
    f = np.asarray(one_frequency, dtype=float)
    out = np.searchsorted(np.array(t.astuple()), f, side="right").astype(np.uint8)
    return int(out) if out.ndim == 0 else out


def quantize_counts(ones, trials, t):
    """Quantize ones-counts without forming the float ratio.

    ``k / trials >= a`` is decided exactly as ``k >= ceil(a * trials)`` (with
    a correction for rounding in the product).
    """
    cuts = count_cutoffs(trials, t)
    return np.searchsorted(cuts, np.asarray(ones), side="right").astype(np.uint8)


def count_cutoffs(trials, t):
    """Smallest k with k / trials >= threshold, for each of a, b, c."""
    out = []
    for thr in t.astuple():
        k = math.ceil(thr * trials)
        while k > 0 and (k - 1) / trials >= thr:
            k -= 1
        while k / trials < thr:
            k += 1
        out.append(k)
    return np.array(out, dtype=np.int64)


def thresholds_for_masses(params, masses):
    """Thresholds whose asymptotic response masses equal ``masses``."""
    m = masses.asarray() if isinstance(masses, ResponseDistribution) else np.asarray(masses, float)
    cum = np.cumsum(m)[:3]
    return QuantizerThresholds(*(float(puf_model.inv_cdf(p, params)) for p in cum))


def thresholds_for_uniform(params=SRAM):
    return thresholds_for_masses(params, [0.25, 0.25, 0.25, 0.25])


def response_masses_asymptotic(params, t):
    Fa, Fb, Fc = (puf_model.cdf_one_probability(x, params) for x in t.astuple())
    return ResponseDistribution(Fa, Fb - Fa, Fc - Fb, 1.0 - Fc)


def class_probabilities(x, trials, t):
    """Pr{quantize(Binomial(trials, x) / trials) = k} for k = 0..3.

    ``x`` may be an array; returns shape x.shape + (4,).
    """
    x = np.asarray(x, dtype=float)
    ka, kb, kc = count_cutoffs(trials, t)
    c_a = stats.binom.cdf(ka - 1, trials, x)
    c_b = stats.binom.cdf(kb - 1, trials, x)
    c_c = stats.binom.cdf(kc - 1, trials, x)
    return np.stack([c_a, c_b - c_a, c_c - c_b, 1.0 - c_c], axis=-1)


def response_masses_finite(params, t, trials, panels=1200):
    """Response masses when the one-frequency comes from ``trials`` evaluations."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    m = puf_model.expected_over_cells(lambda x: class_probabilities(x, trials, t), params, panels)
    m = np.clip(m, 0.0, 1.0)
    if abs(m.sum() - 1.0) > 1e-9:
        raise RuntimeError(f"finite-trial quadrature lost mass: sum={m.sum()}")
    m = m / m.sum()
    return ResponseDistribution(m[0], m[1], m[2], 1.0 - m[0] - m[1] - m[2])


def response_entropy(d):
    """Shannon entropy in bits, with 0 log 0 = 0."""
    ps = d.astuple() if isinstance(d, ResponseDistribution) else tuple(d)
    return -math.fsum(p * math.log2(p) for p in ps if p > 0)


def extract_responses(one_probabilities, trials, t, rng_seed, purpose="evaluate"):
    """Evaluate every cell ``trials`` times and quantize its one-frequency."""
    ones = puf_model.evaluate_cells(one_probabilities, trials, rng_seed, purpose)
    return quantize_counts(ones, trials, t)
