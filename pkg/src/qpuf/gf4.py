"""Arithmetic over GF(4) = GF(2)[x]/(x^2 + x + 1).

Elements are labelled 0, 1, 2, 3 with 2 = alpha and 3 = alpha^2 = alpha + 1,
so the 2-bit label is the polynomial-basis encoding and addition is XOR.
Vectors are plain ``numpy.uint8`` arrays holding labels.
"""

import numpy as np

ORDER = 4

ADD = np.array([[a ^ b for b in range(4)] for a in range(4)], dtype=np.uint8)


def _mul_poly(a, b):
    # carry-less product reduced by x^2 + x + 1
    p = 0
    for i in range(2):
        if (b >> i) & 1:
            p ^= a << i
    if p & 0b100:
        p ^= 0b111
    return p


MUL = np.array([[_mul_poly(a, b) for b in range(4)] for a in range(4)], dtype=np.uint8)
INV = np.array([0, 1, 3, 2], dtype=np.uint8)  # INV[0] unused


def _check(a):
    if not 0 <= a < 4:
        raise ValueError(f"not a GF(4) element: {a!r}")


def add(a, b):
    _check(a)
    _check(b)
    return a ^ b


def mul(a, b):
    _check(a)
    _check(b)
    return int(MUL[a, b])


def inv(a):
    _check(a)
    if a == 0:
        raise ZeroDivisionError("0 has no inverse in GF(4)")
    return int(INV[a])


def as_vector(values):
    v = np.asarray(values)
    if v.size and (v.min() < 0 or v.max() > 3):
        raise ValueError("GF(4) vector entries must lie in {0, 1, 2, 3}")
    return v.astype(np.uint8, copy=False)


def vec_add(u, v):
    u = np.asarray(u, dtype=np.uint8)
    v = np.asarray(v, dtype=np.uint8)
    if u.shape != v.shape:
        raise ValueError(f"length mismatch: {u.shape} vs {v.shape}")
    return u ^ v


def scale(c, v):
    return MUL[c][np.asarray(v, dtype=np.uint8)]


def hamming_weight(v, axis=-1):
    return np.count_nonzero(np.asarray(v), axis=axis)


def hamming_distance(u, v):
    return hamming_weight(vec_add(u, v))


def matmul(a, b):
    """Matrix product over GF(4).  ``a`` is (..., k), ``b`` is (k, n)."""
    a = np.asarray(a, dtype=np.uint8)
    b = np.asarray(b, dtype=np.uint8)
    out = np.zeros(a.shape[:-1] + b.shape[1:], dtype=np.uint8)
    for i in range(a.shape[-1]):
        out ^= MUL[a[..., i, None], b[i]]
    return out


def row_reduce(rows):
    """Reduced row echelon form over GF(4); returns (nonzero rows, pivots)."""
    m = np.array(rows, dtype=np.uint8, copy=True)
    if m.ndim != 2:
        m = m.reshape(-1, m.shape[-1] if m.size else 0)
    nrows, ncols = m.shape
    pivots = []
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        nz = np.nonzero(m[r:, c])[0]
        if nz.size == 0:
            continue
        p = r + nz[0]
        if p != r:
            m[[r, p]] = m[[p, r]]
        m[r] = MUL[INV[m[r, c]]][m[r]]
        for i in range(nrows):
            if i != r and m[i, c]:
                m[i] ^= MUL[m[i, c]][m[r]]
        pivots.append(c)
        r += 1
    return m[:r], pivots


def rank(rows):
    return len(row_reduce(rows)[1])


def det(matrix):
    """Determinant of a square GF(4) matrix (0 iff singular)."""
    m = np.array(matrix, dtype=np.uint8, copy=True)
    n = m.shape[0]
    d = 1
    for c in range(n):
        nz = np.nonzero(m[c:, c])[0]
        if nz.size == 0:
            return 0
        p = c + nz[0]
        if p != c:
            m[[c, p]] = m[[p, c]]  # sign is irrelevant in characteristic 2
        d = int(MUL[d, m[c, c]])
        piv_inv = INV[m[c, c]]
        for i in range(c + 1, n):
            if m[i, c]:
                m[i] ^= MUL[MUL[m[i, c], piv_inv]][m[c]]
    return d


def in_span(rows, v):
    rows = np.asarray(rows, dtype=np.uint8)
    if rows.size == 0:
        return not np.any(v)
    return rank(np.vstack([rows, v])) == rank(rows)


def span(rows):
    """All codewords spanned by ``rows`` (brute force, 4**k x n array)."""
    rows = np.asarray(rows, dtype=np.uint8)
    if rows.ndim != 2 or rows.shape[0] == 0:
        n = rows.shape[-1] if rows.ndim == 2 else 0
        return np.zeros((1, n), dtype=np.uint8)
    k = rows.shape[0]
    msgs = np.array(np.unravel_index(np.arange(4**k), (4,) * k), dtype=np.uint8).T
    return matmul(msgs, rows)


# --- packed representation -------------------------------------------------
# Two bit planes of uint64 words: plane 0 holds the low label bit, plane 1 the
# high bit.  Addition is XOR of both planes; weight is popcount(lo | hi).


def n_words(n):
    return (n + 63) // 64


def pack_planes(v):
    """(..., n) labels -> (..., 2, words) uint64 bit planes."""
    v = np.asarray(v, dtype=np.uint8)
    n = v.shape[-1]
    w = n_words(n)
    pad = np.zeros(v.shape[:-1] + (w * 64,), dtype=np.uint8)
    pad[..., :n] = v
    lo = np.packbits(pad & 1, axis=-1, bitorder="little")
    hi = np.packbits(pad >> 1, axis=-1, bitorder="little")
    planes = np.stack([lo, hi], axis=-2)
    return np.ascontiguousarray(planes).view(np.uint64).reshape(v.shape[:-1] + (2, w))


def unpack_planes(planes, n):
    planes = np.ascontiguousarray(planes, dtype=np.uint64)
    raw = planes.view(np.uint8)
    bits = np.unpackbits(raw, axis=-1, bitorder="little")
    lo = bits[..., 0, :n]
    hi = bits[..., 1, :n]
    return (lo | (hi << 1)).astype(np.uint8)


def packed_weight(planes):
    return np.bitwise_count(planes[..., 0, :] | planes[..., 1, :]).sum(axis=-1, dtype=np.int64)


# --- byte serialization ----------------------------------------------------
# 2 bits per symbol, symbol i at bits 2*(i % 4) of byte i // 4 (little-endian
# within the byte).  Length is carried by the enclosing container.


def to_bytes(v):
    v = np.asarray(v, dtype=np.uint8)
    n = v.shape[-1]
    pad = np.zeros(((n + 3) // 4) * 4, dtype=np.uint8)
    pad[:n] = v
    q = pad.reshape(-1, 4)
    return (q[:, 0] | (q[:, 1] << 2) | (q[:, 2] << 4) | (q[:, 3] << 6)).astype(np.uint8).tobytes()


def from_bytes(data, n):
    b = np.frombuffer(bytes(data), dtype=np.uint8)
    if b.size * 4 < n:
        raise ValueError(f"need {(n + 3) // 4} bytes for {n} symbols, got {b.size}")
    out = np.stack([b & 3, (b >> 2) & 3, (b >> 4) & 3, b >> 6], axis=1).reshape(-1)
    return out[:n].astype(np.uint8)
