"""Probabilistic SRAM-PUF cell model.

Each cell returns '1' with a fixed one-probability ``x``.  Across cells the
one-probability is distributed with CDF ``F(x) = Phi(l1 * Phi^-1(x) - l2)``,
equivalently ``x = Phi((Z + l2) / l1)`` with ``Z`` standard normal.  All
expectations over cells are computed on that normal ``z`` axis, where the
integrand is smooth even though the density in ``x`` piles up at 0 and 1.
"""

from dataclasses import dataclass

import numpy as np
from scipy import integrate, optimize
from scipy.special import ndtr, ndtri

from qpuf import rng as _rng

SRAM_LAMBDA1 = 0.1213
SRAM_LAMBDA2 = 0.0210


@dataclass(frozen=True)
class PufModelParams:
    lambda1: float = SRAM_LAMBDA1
    lambda2: float = SRAM_LAMBDA2

    def __post_init__(self):
        if not self.lambda1 > 0:
            raise ValueError(f"lambda1 must be positive, got {self.lambda1}")


SRAM = PufModelParams()


@dataclass(frozen=True)
class PufCell:
    one_probability: float

    def __post_init__(self):
        if not 0.0 <= self.one_probability <= 1.0:
            raise ValueError(f"one-probability outside [0, 1]: {self.one_probability}")


@dataclass(frozen=True)
class EvaluationRecord:
    trials: int
    ones: int

    def __post_init__(self):
        if self.trials < 1 or not 0 <= self.ones <= self.trials:
            raise ValueError(f"invalid record: {self.ones}/{self.trials}")

    @property
    def one_frequency(self):
        return self.ones / self.trials


class NonConvergenceError(RuntimeError):
    pass


def _open_unit(x, name="x"):
    x = np.asarray(x, dtype=float)
    if np.any(~((x > 0) & (x < 1))):
        raise ValueError(f"{name} must lie strictly inside (0, 1)")
    return x


def _scalar(v):
    return float(v) if np.ndim(v) == 0 else v


def cdf_one_probability(x, params=SRAM):
    x = _open_unit(x)
    return _scalar(ndtr(params.lambda1 * ndtri(x) - params.lambda2))


def pdf_one_probability(x, params=SRAM):
    x = _open_unit(x)
    zi = ndtri(x)
    l1, l2 = params.lambda1, params.lambda2
    # ratio of normal densities, in log form to survive the tails
    out = l1 * np.exp(-0.5 * (l2 - l1 * zi) ** 2 + 0.5 * zi**2)
    return _scalar(out)


def inv_cdf(p, params=SRAM):
    """Closed-form inverse: ``Phi((Phi^-1(p) + l2) / l1)``.

    For the SRAM parameters every ``p`` above about 0.834 maps to a point
    within one ulp of 1; the result is clipped to the largest double below 1.
    """
    p = _open_unit(p, "p")
    x = ndtr((ndtri(p) + params.lambda2) / params.lambda1)
    return _scalar(np.clip(x, _TINY, _BELOW_ONE))


_TINY = np.finfo(float).tiny
_BELOW_ONE = np.nextafter(1.0, 0.0)


def inv_cdf_rootfind(p, params=SRAM, rtol=4 * np.finfo(float).eps):
    """Bracketing root-find of ``F(x) = p``; cross-check for :func:`inv_cdf`."""
    p = float(_open_unit(p, "p"))
    # solve on the probit axis t = Phi^-1(x) so both bracket ends are finite
    g = lambda t: float(ndtr(params.lambda1 * t - params.lambda2)) - p  # noqa: E731
    lo, hi = -1.0, 1.0
    for _ in range(80):
        if g(lo) <= 0:
            break
        lo *= 2
    for _ in range(80):
        if g(hi) >= 0:
            break
        hi *= 2
    if g(lo) > 0 or g(hi) < 0:
        raise NonConvergenceError(f"root not bracketed: g({lo})={g(lo)}, g({hi})={g(hi)}")
    t, res = optimize.brentq(g, lo, hi, xtol=1e-14, rtol=rtol, full_output=True)
    if not res.converged:
        raise NonConvergenceError(f"brentq stopped after {res.iterations} iterations at t={t}")
    return float(np.clip(ndtr(t), _TINY, _BELOW_ONE))


def one_probability_from_normal(z, params=SRAM):
    return ndtr((np.asarray(z, dtype=float) + params.lambda2) / params.lambda1)


def sample_cells(params, count, rng_seed):
    """One-probabilities of ``count`` fresh cells, deterministic per seed."""
    if count < 1:
        raise ValueError("count must be >= 1")
    out = np.empty(count)
    for i, a, b in _rng.chunks(count):
        z = _rng.stream(rng_seed, "cells", i).standard_normal(b - a)
        out[a:b] = one_probability_from_normal(z, params)
    return out


def evaluate(cell, trials, rng_seed):
    if trials < 1:
        raise ValueError("trials must be >= 1")
    p = cell.one_probability if isinstance(cell, PufCell) else float(cell)
    ones = int(_rng.stream(rng_seed, "evaluate").binomial(trials, p))
    return EvaluationRecord(trials=trials, ones=ones)


def evaluate_cells(one_probabilities, trials, rng_seed, purpose="evaluate"):
    """Ones-counts of ``trials`` evaluations of every cell."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    probs = np.asarray(one_probabilities, dtype=float)
    out = np.empty(probs.shape, dtype=np.int64)
    flat_in, flat_out = probs.reshape(-1), out.reshape(-1)
    for i, a, b in _rng.chunks(flat_in.size):
        flat_out[a:b] = _rng.stream(rng_seed, purpose, i).binomial(trials, flat_in[a:b])
    return out


# --- expectations over the cell population ----------------------------------

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(32)


def normal_quadrature(z_lo=-9.0, z_hi=9.0, panels=1200):
    """Composite Gauss-Legendre nodes and weights for E[g(Z)], Z ~ N(0, 1)."""
    edges = np.linspace(z_lo, z_hi, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[:-1] + edges[1:])
    z = (mid[:, None] + half[:, None] * _GL_NODES).ravel()
    w = (half[:, None] * _GL_WEIGHTS).ravel() * np.exp(-0.5 * z**2) / np.sqrt(2 * np.pi)
    return z, w


def expected_over_cells(func, params=SRAM, panels=1200):
    """E[func(x)] over the one-probability distribution."""
    z, w = normal_quadrature(panels=panels)
    vals = np.asarray(func(one_probability_from_normal(z, params)))
    return np.tensordot(w, vals, axes=(0, 0))


def expected_aber(params=SRAM, reference="majority"):
    """Average bit error rate of a single evaluation.

    ``reference="majority"`` compares against the cell's preferred value
    (error ``min(x, 1 - x)``); ``"single"`` compares two independent single
    evaluations (error ``2 x (1 - x)``).
    """
    if reference == "majority":
        g = lambda x: np.minimum(x, 1.0 - x)  # noqa: E731
    elif reference == "single":
        g = lambda x: 2.0 * x * (1.0 - x)  # noqa: E731
    else:
        raise ValueError(f"unknown reference {reference!r}")
    # adaptive quadrature over the probit axis; kink of min() sits at z = -l2
    f = lambda z: float(g(one_probability_from_normal(z, params))) * np.exp(-0.5 * z * z) / np.sqrt(2 * np.pi)  # noqa: E731
    total, err = 0.0, 0.0
    for lo, hi in ((-np.inf, -params.lambda2), (-params.lambda2, np.inf)):
        val, e = integrate.quad(f, lo, hi, epsabs=1e-13, epsrel=1e-11, limit=400)
        total += val
        err += e
    if not err < 1e-8:
        raise RuntimeError(f"ABER quadrature error estimate too large: {err}")
    return total
