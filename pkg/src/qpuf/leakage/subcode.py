"""Mask subcodes and their exact weight histograms."""

import hashlib
import json
import os
import time
from dataclasses import dataclass

import numpy as np

from qpuf import _accel, gf4
from qpuf.polar.code import generator_rows

DEFAULT_CAP = 16
NUMBA_CHUNK_LOG4 = 11
# rough single-core throughputs (Gray steps per second) for the resource estimate
STEPS_PER_SECOND = {"numba": 1.5e8, "numpy": 3e7}


class EnumerationTooLarge(ValueError):
    pass


@dataclass(frozen=True)
class LinearSubcode:
    generators: np.ndarray  # (dimension, N), reduced row echelon form
    n_len: int

    @property
    def dimension(self):
        return int(self.generators.shape[0])

    @property
    def size(self):
        return 4**self.dimension

    def digest(self):
        h = hashlib.sha256()
        h.update(self.n_len.to_bytes(4, "big"))
        h.update(np.ascontiguousarray(self.generators, dtype=np.uint8).tobytes())
        return h.hexdigest()


def linear_subcode(rows, n_len):
    rows = np.asarray(rows, dtype=np.uint8).reshape(-1, n_len)
    reduced, _ = gf4.row_reduce(rows) if rows.shape[0] else (rows, [])
    reduced = np.ascontiguousarray(reduced, dtype=np.uint8)
    reduced.setflags(write=False)
    return LinearSubcode(reduced, n_len)


def subcode_rows(construction_or_n, index_set):
    """Span of the generator rows indexed by ``index_set``."""
    n_len = getattr(construction_or_n, "n_len", construction_or_n)
    idx = [int(i) for i in index_set]
    if any(not 0 <= i < n_len for i in idx):
        raise ValueError(f"index outside 0..{n_len - 1}")
    if not idx:
        return linear_subcode(np.zeros((0, n_len), np.uint8), n_len)
    return linear_subcode(generator_rows(n_len, idx), n_len)


@dataclass(frozen=True)
class WeightHistogram:
    counts: np.ndarray  # (N+1,) int64
    dimension: int
    seconds: float = 0.0

    def __post_init__(self):
        c = np.asarray(self.counts)
        if c.ndim != 1 or np.any(c < 0):
            raise ValueError("counts must be a nonnegative 1-D array")
        if int(c.sum()) != 4**self.dimension or c[0] < 1:
            raise ValueError("histogram does not describe a linear code of this dimension")

    @property
    def n_len(self):
        return len(self.counts) - 1


def naive_histogram(c2):
    """Reference: re-encode every coefficient vector (dimension <= 8 or so)."""
    from qpuf.leakage._gray_numpy import _all_codewords

    words = _all_codewords(c2.generators, c2.n_len)
    return np.bincount(gf4.hamming_weight(words), minlength=c2.n_len + 1).astype(np.int64)


def resource_estimate(dimension, n_len, backend=None):
    backend = backend or _accel.backend_name()
    steps = 4**dimension
    return {
        "dimension": dimension,
        "steps": steps,
        "seconds": steps / STEPS_PER_SECOND[backend] * max(1, gf4.n_words(n_len) / 4),
        "memory_bytes": 8 * (n_len + 1) * 1024 + 16 * gf4.n_words(n_len) * 4**8,
        "backend": backend,
    }


class _NumbaPlan:
    def __init__(self, c2):
        from qpuf.leakage import _gray_numba

        self.mod = _gray_numba
        g = c2.generators
        self.rows1 = gf4.pack_planes(g) if len(g) else np.zeros((0, 2, gf4.n_words(c2.n_len)), np.uint64)
        self.rows2 = gf4.pack_planes(gf4.MUL[2][g]) if len(g) else self.rows1.copy()
        self.n_len = c2.n_len
        self.total = c2.size
        self.chunk_size = 4 ** min(c2.dimension, NUMBA_CHUNK_LOG4)

    def run(self, first, last):
        bounds = np.minimum(np.arange(first, last + 1, dtype=np.int64) * self.chunk_size, self.total)
        return self.mod.gray_chunks(self.rows1, self.rows2, bounds, self.n_len, self.mod.SEQ).sum(axis=0)


class _NumpyPlan:
    def __init__(self, c2):
        from qpuf.leakage._gray_numpy import MeetInMiddle

        self.mim = MeetInMiddle(c2.generators, c2.n_len)
        self.n_len = c2.n_len
        self.total = c2.size
        self.chunk_size = self.mim.chunk_size

    def run(self, first, last):
        out = np.zeros(self.n_len + 1, dtype=np.int64)
        for i in range(first, last):
            out += self.mim.chunk_hist(i)
        return out


def _load_checkpoint(path, key):
    if path and os.path.exists(path):
        with open(path) as fh:
            state = json.load(fh)
        if state.get("key") == key:
            return state["done"], np.array(state["counts"], dtype=np.int64)
    return 0, None


def _save_checkpoint(path, key, done, counts):
    tmp = f"{path}.tmp"
    with open(tmp, "w") as fh:
        json.dump({"key": key, "done": done, "counts": counts.tolist()}, fh)
    os.replace(tmp, path)


def weight_histogram(c2, cap=DEFAULT_CAP, backend=None, threads=None, checkpoint=None,
                     progress=None, batch_seconds=30.0):
    """Exact weight histogram of ``c2`` by enumerating all 4**dim codewords.

    Work is split into fixed chunks reduced by addition, so results do not
    depend on thread count.  With ``checkpoint`` set, partial counts are
    saved after each batch and a rerun resumes from them.
    """
    if c2.dimension > cap:
        est = resource_estimate(c2.dimension, c2.n_len, backend)
        raise EnumerationTooLarge(
            f"dimension {c2.dimension} exceeds enumeration cap {cap}: needs {est['steps']:.3g} steps, "
            f"about {est['seconds']:.0f} s on one core ({est['backend']})"
        )
    backend = backend or _accel.backend_name()
    if threads:
        _accel.set_threads(threads)
    t0 = time.perf_counter()
    plan = _NumbaPlan(c2) if backend == "numba" else _NumpyPlan(c2)
    n_chunks = -(-plan.total // plan.chunk_size)
    key = f"{c2.digest()}:{backend}:{plan.chunk_size}"
    done, counts = _load_checkpoint(checkpoint, key)
    if counts is None:
        counts = np.zeros(c2.n_len + 1, dtype=np.int64)
    step = 1
    while done < n_chunks:
        tb = time.perf_counter()
        last = min(n_chunks, done + step)
        counts += plan.run(done, last)
        done = last
        if checkpoint:
            _save_checkpoint(checkpoint, key, done, counts)
        if progress:
            progress(done, n_chunks)
        el = time.perf_counter() - tb
        if el < batch_seconds / 4:
            step *= 2
    return WeightHistogram(counts, c2.dimension, time.perf_counter() - t0)
