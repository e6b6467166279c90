"""Construction profiles: canonical JSON with a content hash.

The hash covers every field that changes decoding (block length, kernel,
channel matrix, reliability order) plus the genie counts it came from.
Floats are written with ``repr`` precision, so a load/save cycle is exact.
"""

import hashlib
import json

import numpy as np

from qpuf.polar.construction import CodeConstruction

FORMAT = "qpuf-construction/1"
FROZEN_VALUE = 0


def canonical_json(obj):
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), allow_nan=False)


def sha256_hex(obj):
    return hashlib.sha256(canonical_json(obj).encode()).hexdigest()


def _core(c):
    return {
        "format": FORMAT,
        "n_len": int(c.n_len),
        "kernel_id": c.kernel_id,
        "channel": [[float(v) for v in row] for row in np.asarray(c.channel)],
        "reliability_order": [int(i) for i in c.reliability_order],
        "frames_used": int(c.frames_used),
        "error_counts": [int(v) for v in c.error_counts],
        "frozen_value": FROZEN_VALUE,
    }


def construction_digest(c):
    """32-octet SHA-256 of the construction's canonical core fields."""
    return bytes.fromhex(sha256_hex(_core(c)))


def to_dict(c, **extra):
    d = _core(c)
    d["construction_hash"] = construction_digest(c).hex()
    d.update(extra)
    return d


def dumps(c, **extra):
    return canonical_json(to_dict(c, **extra)) + "\n"


def from_dict(d):
    if d.get("format") != FORMAT:
        raise ValueError(f"unknown profile format {d.get('format')!r}")
    counts = np.array(d["error_counts"], dtype=np.int64)
    c = CodeConstruction(
        n_len=int(d["n_len"]),
        error_rates=counts / int(d["frames_used"]),
        reliability_order=np.array(d["reliability_order"], dtype=np.int64),
        frames_used=int(d["frames_used"]),
        channel=np.array(d["channel"], dtype=float),
        kernel_id=d["kernel_id"],
        error_counts=counts,
    )
    if "construction_hash" in d and d["construction_hash"] != construction_digest(c).hex():
        raise ValueError("profile content does not match its construction_hash")
    return c


def loads(text):
    return from_dict(json.loads(text))
