"""Genie-aided code construction."""

from dataclasses import dataclass, field

import numpy as np

from qpuf import rng as _rng
from qpuf.channel import check_stochastic
from qpuf.polar import decoder
from qpuf.polar.code import KERNEL_ID, encode, generator_matrix, log4

GENIE_CHUNK = 2048


@dataclass(frozen=True)
class CodeConstruction:
    n_len: int
    error_rates: np.ndarray
    reliability_order: np.ndarray
    frames_used: int
    channel: np.ndarray
    kernel_id: str = KERNEL_ID
    error_counts: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        order = np.asarray(self.reliability_order)
        if sorted(order.tolist()) != list(range(self.n_len)):
            raise ValueError("reliability_order is not a permutation of 0..N-1")
        if np.any(np.diff(np.asarray(self.error_rates)[order]) < 0):
            raise ValueError("error rates are not nondecreasing along reliability_order")


def pass_through(x, w, gen):
    """Draw channel outputs for inputs ``x`` under row-stochastic ``w``."""
    cum = np.cumsum(np.asarray(w, dtype=float), axis=1)
    cum[:, -1] = 1.0
    r = gen.random(x.shape)
    return (r[..., None] >= cum[x]).sum(axis=-1).astype(np.uint8)


def row_weights(n_len):
    return np.count_nonzero(generator_matrix(n_len), axis=1)


def order_by_reliability(error_rates):
    """Ascending error rate; ties go to heavier generator rows, then later indices.

    Genie estimates cannot separate positions whose error rate is far below
    1/frames, so many rates tie at zero.
    """
    rates = np.asarray(error_rates)
    idx = np.arange(rates.size)
    return np.lexsort((-idx, -row_weights(rates.size), rates))


def genie_construct(w, n_len, n_frames, rng_seed, clamp=decoder.DEFAULT_CLAMP, backend=None,
                    chunk=GENIE_CHUNK):
    """Estimate each synthesized channel's error rate under SC with a genie.

    Every frame draws a uniform source word, encodes it, passes it through
    ``w`` and runs SC with all earlier decisions replaced by the truth.
    """
    w = check_stochastic(w)
    log4(n_len)
    if n_frames < 1:
        raise ValueError("n_frames must be >= 1")
    table = decoder.llr_table(w, clamp)
    counts = np.zeros(n_len, dtype=np.int64)
    for i, a, b in _rng.chunks(n_frames, chunk):
        gen = _rng.stream(rng_seed, "genie", i)
        u = gen.integers(0, 4, size=(b - a, n_len), dtype=np.uint8)
        y = pass_through(encode(u), w, gen)
        counts += decoder.genie_errors(table[y], u, clamp, backend)
    rates = counts / n_frames
    return CodeConstruction(
        n_len=n_len,
        error_rates=rates,
        reliability_order=order_by_reliability(rates),
        frames_used=n_frames,
        channel=w.copy(),
        error_counts=counts,
    )
