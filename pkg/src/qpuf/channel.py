"""Main and wiretap channel matrices.

Matrices are row-stochastic 4x4 arrays: ``W[j, k] = Pr{out = k | in = j}``.
Passing through ``A`` and then ``B`` is the product ``A @ B``.
"""

from dataclasses import dataclass

import numpy as np
from scipy import optimize

from qpuf import puf_model, quantizer
from qpuf.gf4 import ADD


class EmptyInputClassError(ValueError):
    def __init__(self, symbol, n_cells):
        super().__init__(
            f"no simulated cell produced input symbol {symbol} among {n_cells} cells; "
            "raise n_cells or adjust thresholds"
        )
        self.symbol = symbol


def check_stochastic(w, tol=1e-9):
    w = np.asarray(w, dtype=float)
    if w.shape != (4, 4):
        raise ValueError(f"expected a 4x4 matrix, got shape {w.shape}")
    if np.any(w < -tol) or np.any(np.abs(w.sum(axis=1) - 1.0) > tol):
        raise ValueError("matrix is not row-stochastic")
    return w


def wiretap_matrix(d):
    """``W_w[j, k] = p_{j xor k}``: the helper data seen through the response noise."""
    p = d.asarray() if isinstance(d, quantizer.ResponseDistribution) else np.asarray(d, float)
    return p[ADD.astype(np.intp)]


@dataclass(frozen=True)
class MainChannelEstimate:
    counts: np.ndarray  # counts[j, k]: first response j, second response k
    trials: int
    n_cells: int

    @property
    def matrix(self):
        rows = self.counts.sum(axis=1, keepdims=True)
        return self.counts / rows

    @property
    def input_masses(self):
        return self.counts.sum(axis=1) / self.counts.sum()

    def additive(self):
        """The XOR-symmetric channel codeword -> helper + fresh response."""
        return additive_channel(self.counts)


def estimate_main_matrix(params, t, trials, n_cells, rng_seed):
    """Empirical transition rates between two extractions of the same cells."""
    cells = puf_model.sample_cells(params, n_cells, rng_seed)
    first = quantizer.extract_responses(cells, trials, t, rng_seed, purpose="main-first")
    second = quantizer.extract_responses(cells, trials, t, rng_seed, purpose="main-second")
    counts = np.bincount(first.astype(np.int64) * 4 + second, minlength=16).reshape(4, 4)
    for j in range(4):
        if counts[j].sum() == 0:
            raise EmptyInputClassError(j, n_cells)
    return MainChannelEstimate(counts=counts, trials=trials, n_cells=n_cells)


def main_matrix_expected(params, t, trials, panels=1200):
    """Population transition matrix by quadrature (the Monte Carlo limit)."""
    def joint(x):
        p = quantizer.class_probabilities(x, trials, t)
        return p[..., :, None] * p[..., None, :]

    j = puf_model.expected_over_cells(joint, params, panels)
    return j / j.sum(axis=1, keepdims=True), j


def additive_channel(joint):
    """Symmetric channel of the noise ``e = q xor q'`` under joint counts/probabilities."""
    joint = np.asarray(joint, dtype=float)
    noise = np.zeros(4)
    np.add.at(noise, ADD.astype(np.intp), joint)
    noise /= noise.sum()
    return noise[ADD.astype(np.intp)]


def main_channel_symbol_error(w):
    w = check_stochastic(w)
    return 1.0 - float(np.trace(w)) / 4.0


def compose(first, then):
    """Channel ``first`` followed by ``then``."""
    return np.asarray(first, float) @ np.asarray(then, float)


def degradation_witness(w_w, w_m, tol=1e-6):
    """A row-stochastic ``W_3`` with ``compose(W_m, W_3) ~= W_w``, or None.

    The all-1/4 matrix is tried first.  Otherwise the min-max residual over
    row-stochastic ``W_3`` is found by linear programming.
    """
    w_w = check_stochastic(w_w)
    w_m = check_stochastic(w_m)
    uniform = np.full((4, 4), 0.25)
    if np.max(np.abs(compose(w_m, uniform) - w_w)) <= tol:
        return uniform

    # variables: 16 entries of W_3 (row-major) then the residual bound s
    n = 17
    c = np.zeros(n)
    c[-1] = 1.0
    a_ub, b_ub = [], []
    for i in range(4):
        for k in range(4):
            row = np.zeros(n)
            for j in range(4):
                row[j * 4 + k] = w_m[i, j]
            up = row.copy()
            up[-1] = -1.0
            a_ub.append(up)
            b_ub.append(w_w[i, k])
            dn = -row
            dn[-1] = -1.0
            a_ub.append(dn)
            b_ub.append(-w_w[i, k])
    a_eq = np.zeros((4, n))
    for j in range(4):
        a_eq[j, j * 4 : j * 4 + 4] = 1.0
    res = optimize.linprog(
        c, A_ub=np.array(a_ub), b_ub=np.array(b_ub), A_eq=a_eq, b_eq=np.ones(4),
        bounds=[(0, None)] * 16 + [(0, None)], method="highs",
    )
    if not res.success:
        return None
    w3 = np.clip(res.x[:16].reshape(4, 4), 0.0, None)
    w3 /= w3.sum(axis=1, keepdims=True)
    if np.max(np.abs(compose(w_m, w3) - w_w)) > tol:
        return None
    return w3
