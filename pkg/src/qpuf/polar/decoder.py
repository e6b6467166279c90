"""LLR conventions, kernel LLR updates and (list) successive-cancellation decoding.

An LLR vector ``lam`` has four entries with ``lam[0] = 0``;
``lam[i] = ln Pr{y | 0} - ln Pr{y | i}``, so small values mean likely
symbols.  Decoding uses the max-log approximation throughout.
"""

from dataclasses import dataclass

import numpy as np

from qpuf import _accel
from qpuf.gf4 import MUL
from qpuf.polar import _sc_numpy
from qpuf.polar.code import KERNEL, codeword_table, digit_reversal, first_input_check, log4

DEFAULT_CLAMP = 500.0
PROB_FLOOR = 1e-12

if _accel.USE_NUMBA:
    from qpuf.polar import _sc_numba
else:
    _sc_numba = None


@dataclass(frozen=True)
class DecoderConfig:
    list_size: int = 4
    llr_clamp: float = DEFAULT_CLAMP

    def __post_init__(self):
        if self.list_size < 1:
            raise ValueError("list_size must be >= 1")
        if not self.llr_clamp > 0:
            raise ValueError("llr_clamp must be positive")


def llr_table(w, clamp=DEFAULT_CLAMP, floor=PROB_FLOOR):
    """``table[y]`` is the LLR vector for channel output ``y`` under matrix ``w``."""
    w = np.maximum(np.asarray(w, dtype=float), floor)
    lw = np.log(w)
    # lam[y, i] = ln w[0, y] - ln w[i, y]
    tab = lw[0][:, None] - lw.T
    return np.clip(tab, -clamp, clamp)


def llr_init(y, w, clamp=DEFAULT_CLAMP, floor=PROB_FLOOR):
    return llr_table(w, clamp, floor)[np.asarray(y, dtype=np.intp)]


def llr_update(k, lams, decided=(), clamp=DEFAULT_CLAMP):
    """LLRs of kernel input ``u_k`` given decided ``u_0..u_{k-1}``.

    ``lams[j]`` is the LLR vector of kernel output ``x_j``.  Each candidate
    value of ``u_k`` is scored by the best of the ``4**(3-k)`` completions
    of the undecided inputs.
    """
    if not 0 <= k <= 3 or len(decided) != k:
        raise ValueError(f"f_{k} needs exactly {k} decided symbols, got {len(decided)}")
    code = 0
    for d in decided:
        code = code * 4 + int(d)
    lams = np.asarray(lams, dtype=float).reshape(1, 1, 4, 4)
    best = _sc_numpy.best_scores(lams, k, np.array([[code]]))[0, 0]
    return np.clip(best[0] - best, -clamp, clamp)


def llr_update_f0(lams, clamp=DEFAULT_CLAMP):
    return llr_update(0, lams, (), clamp)


def llr_update_f1(lams, u0, clamp=DEFAULT_CLAMP):
    return llr_update(1, lams, (u0,), clamp)


def llr_update_f2(lams, u0, u1, clamp=DEFAULT_CLAMP):
    return llr_update(2, lams, (u0, u1), clamp)


def llr_update_f3(lams, u0, u1, u2, clamp=DEFAULT_CLAMP):
    return llr_update(3, lams, (u0, u1, u2), clamp)


def frozen_arrays(n_len, frozen):
    """Normalize a frozen-set description (dict index->value, or iterable of indices) to arrays."""
    mask = np.zeros(n_len, dtype=np.bool_)
    vals = np.zeros(n_len, dtype=np.uint8)
    if isinstance(frozen, dict):
        items = frozen.items()
    else:
        items = ((int(i), 0) for i in frozen)
    for i, v in items:
        if not 0 <= i < n_len:
            raise ValueError(f"frozen index {i} outside 0..{n_len - 1}")
        mask[i] = True
        vals[i] = v
    return mask, vals


def _natural(llrs):
    return np.ascontiguousarray(llrs[..., digit_reversal(llrs.shape[-2]), :], dtype=np.float64)


def scl_decode(llrs, frozen, config=DecoderConfig()):
    """Decode one frame of channel LLRs (codeword order, shape (N, 4)).

    Returns up to ``list_size`` pairs ``(source word, path metric)`` sorted by
    ascending metric.  ``list_size = 1`` is plain successive cancellation.
    """
    llrs = np.asarray(llrs, dtype=float)
    n_len = llrs.shape[0]
    m = log4(n_len)
    mask, vals = frozen if isinstance(frozen, tuple) else frozen_arrays(n_len, frozen)
    chan = _natural(llrs)
    if _sc_numba is not None:
        out_u, out_metric, count = _alloc(1, n_len, config.list_size)
        _sc_numba.scl_decode_batch(
            chan[None], mask, vals, config.list_size, m, codeword_table(), *first_input_check(), KERNEL, MUL,
            config.llr_clamp, out_u, out_metric, count,
        )
        paths, metrics = out_u[0, : count[0]], out_metric[0, : count[0]]
    else:
        paths, metrics = _sc_numpy.scl_decode(chan, mask, vals, config.list_size, m, config.llr_clamp)
    return [(paths[i].copy(), float(metrics[i])) for i in range(len(metrics))]


def _alloc(b, n_len, list_size):
    return (
        np.zeros((b, list_size, n_len), dtype=np.uint8),
        np.zeros((b, list_size)),
        np.zeros(b, dtype=np.int64),
    )


def scl_decode_best(llrs, frozen_mask, frozen_vals, config=DecoderConfig(), backend=None):
    """Best list-decoder path for a batch of frames, shape (B, N, 4) -> (B, N)."""
    llrs = np.asarray(llrs, dtype=float)
    b, n_len = llrs.shape[:2]
    m = log4(n_len)
    chan = _natural(llrs)
    backend = backend or _accel.backend_name()
    if backend == "numba":
        out_u, out_metric, count = _alloc(b, n_len, config.list_size)
        _numba_module().scl_decode_batch(
            chan, frozen_mask, frozen_vals, config.list_size, m, codeword_table(), *first_input_check(), KERNEL, MUL,
            config.llr_clamp, out_u, out_metric, count,
        )
        return out_u[:, 0, :].copy()
    out = np.empty((b, n_len), dtype=np.uint8)
    for f in range(b):
        paths, _ = _sc_numpy.scl_decode(chan[f], frozen_mask, frozen_vals, config.list_size, m, config.llr_clamp)
        out[f] = paths[0]
    return out


def genie_errors(llrs, u, clamp=DEFAULT_CLAMP, backend=None):
    """Per-position genie-aided SC error counts over a batch of frames."""
    llrs = np.asarray(llrs, dtype=float)
    u = np.ascontiguousarray(u, dtype=np.uint8)
    m = log4(u.shape[1])
    chan = _natural(llrs)
    backend = backend or _accel.backend_name()
    if backend == "numba":
        return _numba_module().genie_errors(chan, u, m, codeword_table(), *first_input_check(), KERNEL, MUL, clamp)
    return _sc_numpy.genie_errors(chan, u, m, clamp)


def _numba_module():
    if _sc_numba is None:
        raise RuntimeError("numba backend disabled (QPUF_NUMBA=0)")
    return _sc_numba
