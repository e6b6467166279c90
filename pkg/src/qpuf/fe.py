"""Chosen-secret fuzzy extractor on the quaternary polar code.

Source positions split into a mask set R (uniform filler that is never
stored), a secret set S carrying the seed, and frozen positions F fixed to
zero.  Enrollment publishes ``encode(u) + q``; reconstruction decodes
``payload + q'`` and hashes the recovered seed.  Keys of multi-block
enrollments hash the concatenated per-block seeds.
"""

import hashlib
import math
import os
from dataclasses import dataclass

import numpy as np

from qpuf import gf4
from qpuf import rng as _rng
from qpuf.polar import decoder
from qpuf.polar.code import encode, unencode
from qpuf.profile import FROZEN_VALUE, construction_digest

KDF_SHA256 = 1
DEFAULT_KEY_BITS = 128
DEFAULT_SALT_BYTES = 16


class ConstructionMismatch(ValueError):
    pass


class ReconstructionFailure(RuntimeError):
    pass


@dataclass(frozen=True)
class WiretapPartition:
    mask_set: np.ndarray
    secret_set: np.ndarray
    frozen_set: np.ndarray
    n_len: int

    @property
    def r(self):
        return len(self.mask_set)

    @property
    def s(self):
        return len(self.secret_set)

    def frozen_arrays(self):
        return decoder.frozen_arrays(self.n_len, {int(i): FROZEN_VALUE for i in self.frozen_set})


def partition(c, r, s):
    n_len = c.n_len
    if r < 0 or s < 0 or r + s > n_len:
        raise ValueError(f"need 0 <= r, s and r + s <= N (r={r}, s={s}, N={n_len})")
    order = np.asarray(c.reliability_order, dtype=np.int64)
    return WiretapPartition(order[:r].copy(), order[r : r + s].copy(), order[r + s :].copy(), n_len)


@dataclass(frozen=True)
class HelperData:
    payload: np.ndarray  # blocks * N symbols
    construction_hash: bytes
    r: int
    s: int
    kdf_id: int
    salt: bytes
    n_len: int

    @property
    def blocks(self):
        return len(self.payload) // self.n_len


def kdf(seed, salt, kdf_id=KDF_SHA256, key_bits=DEFAULT_KEY_BITS):
    """SHA-256(kdf_id || salt || packed seed) truncated to ``key_bits``."""
    if kdf_id != KDF_SHA256:
        raise ValueError(f"unsupported kdf_id {kdf_id}")
    if key_bits % 8 or not 0 < key_bits <= 256:
        raise ValueError("key_bits must be a multiple of 8 in 8..256")
    h = hashlib.sha256(bytes([kdf_id]) + bytes(salt) + gf4.to_bytes(gf4.as_vector(seed)))
    return h.digest()[: key_bits // 8]


def key_bits_budget(s_symbols, leakage_bound, blocks=1):
    if leakage_bound < 0:
        raise ValueError("leakage bound must be nonnegative")
    return blocks * math.floor(2 * s_symbols - 2 * leakage_bound)


def assemble(seed_blocks, mask_blocks, p):
    """Source words (blocks, N) with mask on R, seed on S, zeros on F."""
    u = np.full((seed_blocks.shape[0], p.n_len), FROZEN_VALUE, dtype=np.uint8)
    u[:, p.mask_set] = mask_blocks
    u[:, p.secret_set] = seed_blocks
    return u


def enroll(seed, q, p, c, rng_seed, salt=None, kdf_id=KDF_SHA256, key_bits=DEFAULT_KEY_BITS):
    """Returns (HelperData, key).  ``q`` may span several blocks of length N."""
    seed = gf4.as_vector(seed)
    q = gf4.as_vector(q)
    n_len = c.n_len
    if p.n_len != n_len:
        raise ValueError("partition and construction disagree on N")
    if len(q) == 0 or len(q) % n_len:
        raise ValueError(f"response length {len(q)} is not a positive multiple of N={n_len}")
    blocks = len(q) // n_len
    if len(seed) != blocks * p.s:
        raise ValueError(f"seed length {len(seed)} != {blocks} x |S| = {blocks * p.s}")
    if salt is None:
        salt = os.urandom(DEFAULT_SALT_BYTES)
    mask = _rng.stream(rng_seed, "mask").integers(0, 4, size=(blocks, p.r), dtype=np.uint8)
    u = assemble(seed.reshape(blocks, p.s), mask, p)
    payload = (encode(u) ^ q.reshape(blocks, n_len)).reshape(-1)
    h = HelperData(payload, construction_digest(c), p.r, p.s, kdf_id, bytes(salt), n_len)
    return h, kdf(seed, salt, kdf_id, key_bits)


def decode_seeds(y, p, c, config=decoder.DecoderConfig(), backend=None):
    """Best-path seeds (B, s) from noisy codewords ``y`` (B, N)."""
    llrs = decoder.llr_init(y, c.channel, config.llr_clamp)
    mask, vals = p.frozen_arrays()
    u = decoder.scl_decode_best(llrs, mask, vals, config, backend)
    return u[:, p.secret_set]


def reconstruct(h, q_new, c, config=decoder.DecoderConfig(), key_bits=DEFAULT_KEY_BITS, backend=None):
    if h.construction_hash != construction_digest(c):
        raise ConstructionMismatch("helper data was made with a different construction")
    q_new = gf4.as_vector(q_new)
    if len(q_new) != len(h.payload):
        raise ValueError(f"response length {len(q_new)} != payload length {len(h.payload)}")
    p = partition(c, h.r, h.s)
    y = (h.payload ^ q_new).reshape(h.blocks, c.n_len)
    seeds = decode_seeds(y, p, c, config, backend)
    if seeds.shape[0] != h.blocks:
        raise ReconstructionFailure("decoder returned no candidate")
    return kdf(seeds.reshape(-1), h.salt, h.kdf_id, key_bits)


def is_codeword(x, p):
    """Membership of ``x`` (..., N) in C1: its source word vanishes on F."""
    u = unencode(x)
    return np.all(u[..., p.frozen_set] == FROZEN_VALUE, axis=-1)
