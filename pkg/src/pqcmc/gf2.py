"""
Dense GF(2) matrices with bit-packed rows.

Rows are stored as numpy uint8 arrays, most-significant bit first within
each octet, each row padded to a whole number of octets.  Padding bits are
always zero.  Matrices are immutable; every operation returns a new value.
"""

from __future__ import annotations

import struct
from typing import Iterable, Sequence

import numpy as np

MAGIC = b"GF2M"
_HEADER = struct.Struct(">4sII")

# Below this many columns of A the table build costs more than it saves.
_M4R_MIN_ROWS = 8


class Gf2Error(ValueError):
    pass


class DimensionMismatch(Gf2Error):
    pass


class SingularMatrix(Gf2Error):
    pass


class NotFullRank(Gf2Error):
    pass


class MatrixDecodeError(Gf2Error):
    pass


class BadMagic(MatrixDecodeError):
    pass


class TruncatedPayload(MatrixDecodeError):
    pass


class NonzeroPadding(MatrixDecodeError):
    pass


def _row_bytes(cols: int) -> int:
    return (cols + 7) // 8


def _pad_mask(cols: int) -> int:
    """Mask of the valid bits in the last octet of a row."""
    used = cols % 8
    return 0xFF if used == 0 else (0xFF << (8 - used)) & 0xFF


class Gf2Matrix:
    """An immutable rows x cols matrix over GF(2)."""

    __slots__ = ("rows", "cols", "_data")

    def __init__(self, rows: int, cols: int, data: np.ndarray):
        if rows < 1 or cols < 1:
            raise Gf2Error(f"matrix dimensions must be positive, got {rows}x{cols}")
        data = np.asarray(data, dtype=np.uint8)
        if data.shape != (rows, _row_bytes(cols)):
            raise Gf2Error(
                f"packed data shape {data.shape} does not match {rows}x{cols}"
            )
        if cols % 8 and np.any(data[:, -1] & ~np.uint8(_pad_mask(cols))):
            raise NonzeroPadding("padding bits beyond the last column must be zero")
        if data.flags.writeable:
            data = data.copy()
            data.flags.writeable = False
        self.rows = rows
        self.cols = cols
        self._data = data

    # --- construction -------------------------------------------------

    @classmethod
    def _wrap(cls, rows: int, cols: int, data: np.ndarray) -> "Gf2Matrix":
        # Trusted path: caller owns `data` and guarantees zero padding.
        obj = cls.__new__(cls)
        data.flags.writeable = False
        obj.rows, obj.cols, obj._data = rows, cols, data
        return obj

    @classmethod
    def from_bits(cls, bits) -> "Gf2Matrix":
        """Build from a 2-D array-like of 0/1 entries (any odd value is 1)."""
        arr = np.asarray(bits)
        if arr.ndim != 2:
            raise Gf2Error(f"expected a 2-D bit array, got {arr.ndim}-D")
        arr = (arr.astype(np.int64) & 1).astype(np.uint8)
        rows, cols = arr.shape
        if rows < 1 or cols < 1:
            raise Gf2Error(f"matrix dimensions must be positive, got {rows}x{cols}")
        return cls._wrap(rows, cols, np.packbits(arr, axis=1))

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]]) -> "Gf2Matrix":
        return cls.from_bits(np.array(rows, dtype=np.int64))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "Gf2Matrix":
        if rows < 1 or cols < 1:
            raise Gf2Error(f"matrix dimensions must be positive, got {rows}x{cols}")
        return cls._wrap(rows, cols, np.zeros((rows, _row_bytes(cols)), np.uint8))

    @classmethod
    def from_permutation(cls, perm: Sequence[int]) -> "Gf2Matrix":
        """Matrix with a single 1 at (i, perm[i]) in every row."""
        perm = np.asarray(perm, dtype=np.int64)
        n = len(perm)
        if n < 1:
            raise Gf2Error("permutation must be nonempty")
        data = np.zeros((n, _row_bytes(n)), np.uint8)
        data[np.arange(n), perm >> 3] = (0x80 >> (perm & 7)).astype(np.uint8)
        return cls._wrap(n, n, data)

    # --- access -------------------------------------------------------

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    @property
    def packed(self) -> np.ndarray:
        """Read-only view of the packed row data."""
        return self._data

    def to_bits(self) -> np.ndarray:
        return np.unpackbits(self._data, axis=1, count=self.cols)

    def tolist(self) -> list[list[int]]:
        return self.to_bits().tolist()

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        if not (0 <= i < self.rows and 0 <= j < self.cols):
            raise IndexError(f"index {ij} out of range for {self.rows}x{self.cols}")
        return int(self._data[i, j >> 3] >> (7 - (j & 7))) & 1

    def column(self, j: int) -> np.ndarray:
        return (self._data[:, j >> 3] >> (7 - (j & 7))) & 1

    def flip(self, i: int, j: int) -> "Gf2Matrix":
        """Copy of this matrix with entry (i, j) complemented."""
        self[i, j]
        data = self._data.copy()
        data[i, j >> 3] ^= 0x80 >> (j & 7)
        return Gf2Matrix._wrap(self.rows, self.cols, data)

    def weight(self) -> int:
        return int(np.unpackbits(self._data).sum())

    def is_zero(self) -> bool:
        return not self._data.any()

    def __eq__(self, other) -> bool:
        if not isinstance(other, Gf2Matrix):
            return NotImplemented
        return self.shape == other.shape and np.array_equal(self._data, other._data)

    def __hash__(self) -> int:
        return hash((self.rows, self.cols, self._data.tobytes()))

    def __repr__(self) -> str:
        if self.rows * self.cols <= 64:
            body = ";".join("".join(map(str, r)) for r in self.tolist())
            return f"Gf2Matrix({self.rows}x{self.cols}: {body})"
        return f"Gf2Matrix({self.rows}x{self.cols})"

    def __add__(self, other: "Gf2Matrix") -> "Gf2Matrix":
        return add(self, other)

    def __matmul__(self, other: "Gf2Matrix") -> "Gf2Matrix":
        return multiply(self, other)

    @property
    def T(self) -> "Gf2Matrix":
        return transpose(self)


def identity(n: int) -> Gf2Matrix:
    return Gf2Matrix.from_permutation(range(n))


def add(a: Gf2Matrix, b: Gf2Matrix) -> Gf2Matrix:
    if a.shape != b.shape:
        raise DimensionMismatch(
            f"cannot add {a.rows}x{a.cols} and {b.rows}x{b.cols} matrices"
        )
    return Gf2Matrix._wrap(a.rows, a.cols, a.packed ^ b.packed)


def _xor_table(rows: np.ndarray) -> np.ndarray:
    """All 256 XOR-combinations of up to 8 packed rows, indexed MSB-first."""
    table = np.zeros((256, rows.shape[1]), np.uint8)
    size = 1
    # index bit of value 2**k selects rows[7 - k]
    for k in range(8):
        src = 7 - k
        if src < len(rows):
            table[size : 2 * size] = table[:size] ^ rows[src]
        else:
            table[size : 2 * size] = table[:size]
        size *= 2
    return table


def multiply(a: Gf2Matrix, b: Gf2Matrix) -> Gf2Matrix:
    """Matrix product over GF(2).

    Each octet of a row of `a` selects a combination of eight rows of `b`;
    combinations are tabulated once per octet column (method of four
    Russians with 8-bit blocks), so the product costs one gather-and-XOR
    of `b`-width rows per octet of `a`.
    """
    if a.cols != b.rows:
        raise DimensionMismatch(
            f"cannot multiply {a.rows}x{a.cols} by {b.rows}x{b.cols}"
        )
    A, B = a.packed, b.packed
    out = np.zeros((a.rows, B.shape[1]), np.uint8)
    if a.rows < _M4R_MIN_ROWS:
        bits = a.to_bits()
        for i in range(a.rows):
            sel = np.flatnonzero(bits[i])
            if len(sel):
                out[i] = np.bitwise_xor.reduce(B[sel], axis=0)
        return Gf2Matrix._wrap(a.rows, b.cols, out)
    for g in range(A.shape[1]):
        col = A[:, g]
        if not col.any():
            continue
        table = _xor_table(B[8 * g : 8 * g + 8])
        out ^= table[col]
    return Gf2Matrix._wrap(a.rows, b.cols, out)


def transpose(a: Gf2Matrix) -> Gf2Matrix:
    return Gf2Matrix._wrap(
        a.cols, a.rows, np.packbits(np.ascontiguousarray(a.to_bits().T), axis=1)
    )


def hstack(blocks: Iterable[Gf2Matrix]) -> Gf2Matrix:
    blocks = list(blocks)
    if len({m.rows for m in blocks}) != 1:
        raise DimensionMismatch(
            "hstack needs equal row counts, got "
            + ", ".join(f"{m.rows}x{m.cols}" for m in blocks)
        )
    return Gf2Matrix.from_bits(np.hstack([m.to_bits() for m in blocks]))


def vstack(blocks: Iterable[Gf2Matrix]) -> Gf2Matrix:
    blocks = list(blocks)
    if len({m.cols for m in blocks}) != 1:
        raise DimensionMismatch(
            "vstack needs equal column counts, got "
            + ", ".join(f"{m.rows}x{m.cols}" for m in blocks)
        )
    return Gf2Matrix._wrap(
        sum(m.rows for m in blocks), blocks[0].cols,
        np.vstack([m.packed for m in blocks]),
    )


def submatrix(a: Gf2Matrix, rows: slice, cols: slice) -> Gf2Matrix:
    return Gf2Matrix.from_bits(a.to_bits()[rows, cols])


def _to_words(data: np.ndarray) -> np.ndarray:
    """Copy packed rows into a big-endian uint64 working array."""
    rows, nbytes = data.shape
    width = (nbytes + 7) // 8
    buf = np.zeros((rows, width * 8), np.uint8)
    buf[:, :nbytes] = data
    return buf.view(">u8").astype(np.uint64)


def _from_words(words: np.ndarray, nbytes: int) -> np.ndarray:
    return np.ascontiguousarray(words.astype(">u8").view(np.uint8)[:, :nbytes])


def _row_reduce(a: Gf2Matrix, track: bool):
    """Gauss-Jordan elimination, first nonzero pivot in column order.

    Returns (reduced words, transform words or None, pivot columns) where
    transform @ a == reduced.
    """
    R = _to_words(a.packed)
    E = _to_words(identity(a.rows).packed) if track else None
    one = np.uint64(1)
    pivots: list[int] = []
    r = 0
    for c in range(a.cols):
        if r == a.rows:
            break
        w, shift = c >> 6, np.uint64(63 - (c & 63))
        col = (R[:, w] >> shift) & one
        hits = np.flatnonzero(col[r:])
        if len(hits) == 0:
            continue
        p = r + int(hits[0])
        if p != r:
            R[[r, p]] = R[[p, r]]
            if track:
                E[[r, p]] = E[[p, r]]
            col[[r, p]] = col[[p, r]]
        col[r] = 0
        mask = col.astype(bool)
        if mask.any():
            R[mask] ^= R[r]
            if track:
                E[mask] ^= E[r]
        pivots.append(c)
        r += 1
    return R, E, pivots


def rank(a: Gf2Matrix) -> int:
    return len(_row_reduce(a, track=False)[2])


def right_inverse(a: Gf2Matrix) -> Gf2Matrix:
    """A cols x rows matrix X with a @ X == I, for full-row-rank `a`."""
    if a.rows > a.cols:
        raise NotFullRank(
            f"{a.rows}x{a.cols} matrix has more rows than columns; no right inverse"
        )
    _, E, pivots = _row_reduce(a, track=True)
    if len(pivots) != a.rows:
        raise NotFullRank(f"rank {len(pivots)} < {a.rows} rows")
    # rows of E land on the pivot positions; all other rows stay zero
    out = np.zeros((a.cols, _row_bytes(a.rows)), np.uint8)
    out[pivots] = _from_words(E, _row_bytes(a.rows))
    return Gf2Matrix._wrap(a.cols, a.rows, out)


def invert(a: Gf2Matrix) -> Gf2Matrix:
    if a.rows != a.cols:
        raise DimensionMismatch(f"cannot invert non-square {a.rows}x{a.cols} matrix")
    _, E, pivots = _row_reduce(a, track=True)
    if len(pivots) != a.rows:
        raise SingularMatrix(f"matrix is singular (rank {len(pivots)} < {a.rows})")
    return Gf2Matrix._wrap(a.rows, a.rows, _from_words(E, _row_bytes(a.rows)))


def is_permutation(a: Gf2Matrix) -> bool:
    if a.rows != a.cols:
        return False
    bits = a.to_bits()
    return bool(np.all(bits.sum(axis=0) == 1) and np.all(bits.sum(axis=1) == 1))


def permutation_of(a: Gf2Matrix) -> np.ndarray:
    """Column index of the single 1 in each row of a permutation matrix."""
    if not is_permutation(a):
        raise Gf2Error("not a permutation matrix")
    return np.argmax(a.to_bits(), axis=1)


def serialize(a: Gf2Matrix) -> bytes:
    return _HEADER.pack(MAGIC, a.rows, a.cols) + a.packed.tobytes()


def deserialize(octets: bytes, *, exact: bool = True) -> Gf2Matrix:
    """Parse a GF2M block.  With exact=False, trailing octets are ignored."""
    return _deserialize(octets, exact)[0]


def deserialize_prefix(octets: bytes) -> tuple[Gf2Matrix, int]:
    """Parse a GF2M block at the start of `octets`; return it and its length."""
    return _deserialize(octets, exact=False)


def _deserialize(octets: bytes, exact: bool) -> tuple[Gf2Matrix, int]:
    octets = bytes(octets)
    if len(octets) < 4 or octets[:4] != MAGIC:
        raise BadMagic(f"expected magic {MAGIC!r}, got {octets[:4]!r}")
    if len(octets) < _HEADER.size:
        raise TruncatedPayload("truncated GF2M header")
    _, rows, cols = _HEADER.unpack_from(octets)
    if rows < 1 or cols < 1:
        raise MatrixDecodeError(f"invalid dimensions {rows}x{cols}")
    size = rows * _row_bytes(cols)
    end = _HEADER.size + size
    if len(octets) < end:
        raise TruncatedPayload(
            f"payload has {len(octets) - _HEADER.size} octets, expected {size}"
        )
    if exact and len(octets) != end:
        raise MatrixDecodeError(f"{len(octets) - end} trailing octets after payload")
    data = np.frombuffer(octets, np.uint8, size, _HEADER.size).reshape(
        rows, _row_bytes(cols)
    )
    if cols % 8 and np.any(data[:, -1] & ~np.uint8(_pad_mask(cols))):
        raise NonzeroPadding("padding bits beyond the last column must be zero")
    return Gf2Matrix._wrap(rows, cols, data.copy()), end


def serialized_size(rows: int, cols: int) -> int:
    return _HEADER.size + rows * _row_bytes(cols)
