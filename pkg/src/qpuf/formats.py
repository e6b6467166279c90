"""Binary containers: QFE1 helper data and the persisted PUF array.

QFE1 (all integers big-endian)::

    "QFE1" | version u8 | construction hash 32 | N u32 | r u16 | s u16
    | kdf_id u8 | salt length u8 | salt | payload, 2 bits/symbol

The payload holds ``blocks * N`` symbols; the block count is its length
divided by N.  PUF arrays::

    "QPUF" | version u8 | lambda1 f64 | lambda2 f64 | seed u64 | count u64
    | count one-probabilities, little-endian f64
"""

import struct

import numpy as np

from qpuf import gf4
from qpuf.fe import HelperData
from qpuf.puf_model import PufModelParams

QFE1_MAGIC = b"QFE1"
QFE1_VERSION = 1
_QFE1_HEAD = struct.Struct(">4sB32sIHHBB")

PUF_MAGIC = b"QPUF"
PUF_VERSION = 1
_PUF_HEAD = struct.Struct(">4sBddQQ")


class FormatError(ValueError):
    pass


def pack_helper(h):
    if len(h.salt) > 255:
        raise FormatError("salt longer than 255 octets")
    if len(h.construction_hash) != 32:
        raise FormatError("construction hash must be 32 octets")
    head = _QFE1_HEAD.pack(QFE1_MAGIC, QFE1_VERSION, h.construction_hash, h.n_len, h.r, h.s,
                           h.kdf_id, len(h.salt))
    return head + h.salt + gf4.to_bytes(h.payload)


def unpack_helper(data):
    data = bytes(data)
    if len(data) < _QFE1_HEAD.size:
        raise FormatError("truncated QFE1 header")
    magic, version, digest, n_len, r, s, kdf_id, salt_len = _QFE1_HEAD.unpack_from(data)
    if magic != QFE1_MAGIC:
        raise FormatError("not a QFE1 file")
    if version != QFE1_VERSION:
        raise FormatError(f"unsupported QFE1 version {version}")
    pos = _QFE1_HEAD.size
    salt = data[pos : pos + salt_len]
    if len(salt) != salt_len:
        raise FormatError("truncated salt")
    body = data[pos + salt_len :]
    if n_len < 4 or n_len % 4 or not body or len(body) % (n_len // 4):
        raise FormatError("payload length is not a whole number of blocks")
    payload = gf4.from_bytes(body, 4 * len(body))
    return HelperData(payload, digest, r, s, kdf_id, salt, n_len)


def pack_puf_array(probs, params, seed):
    probs = np.asarray(probs, dtype="<f8").reshape(-1)
    head = _PUF_HEAD.pack(PUF_MAGIC, PUF_VERSION, params.lambda1, params.lambda2, int(seed), probs.size)
    return head + probs.tobytes()


def unpack_puf_array(data):
    data = bytes(data)
    if len(data) < _PUF_HEAD.size:
        raise FormatError("truncated PUF array header")
    magic, version, l1, l2, seed, count = _PUF_HEAD.unpack_from(data)
    if magic != PUF_MAGIC:
        raise FormatError("not a PUF array file")
    if version != PUF_VERSION:
        raise FormatError(f"unsupported PUF array version {version}")
    body = data[_PUF_HEAD.size :]
    if len(body) != 8 * count:
        raise FormatError("PUF array length does not match header count")
    return np.frombuffer(body, dtype="<f8").astype(float), PufModelParams(l1, l2), seed


def write_bytes(path, data):
    with open(path, "wb") as fh:
        fh.write(data)


def read_bytes(path):
    with open(path, "rb") as fh:
        return fh.read()
