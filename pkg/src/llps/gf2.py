"""Dense bit-packed linear algebra over GF(2).

Vectors and matrix rows are stored little-endian in 64-bit words: bit ``j``
lives in word ``j // 64`` at position ``j % 64``. Padding bits past the
logical length are always zero, so popcounts are exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

WORD_BITS = 64


class SingularMatrixError(ValueError):
    """Raised when a square matrix has no inverse over GF(2)."""


class RankDeficientError(ValueError):
    """Raised when a matrix does not have the required row rank."""


def n_words(nbits: int) -> int:
    return (nbits + WORD_BITS - 1) // WORD_BITS


def pack_bits(bits) -> np.ndarray:
    """Pack a (..., n) array of 0/1 values into (..., n_words(n)) uint64 words."""
    bits = np.asarray(bits, dtype=np.uint8)
    n = bits.shape[-1]
    padded = np.zeros(bits.shape[:-1] + (n_words(n) * WORD_BITS,), dtype=np.uint8)
    padded[..., :n] = bits & 1
    packed = np.packbits(padded, axis=-1, bitorder="little")
    return np.ascontiguousarray(packed).view("<u8")


def unpack_bits(words: np.ndarray, nbits: int) -> np.ndarray:
    words = np.ascontiguousarray(words, dtype="<u8")
    raw = np.unpackbits(words.view(np.uint8), axis=-1, bitorder="little")
    return raw[..., :nbits]


def _frozen(a: np.ndarray) -> np.ndarray:
    a.flags.writeable = False
    return a


@dataclass(frozen=True, eq=False)
class BitVector:
    """Immutable packed binary vector."""

    words: np.ndarray
    length: int

    @classmethod
    def from_bits(cls, bits) -> "BitVector":
        bits = np.asarray(bits, dtype=np.uint8).ravel()
        return cls(_frozen(pack_bits(bits)), int(bits.size))

    @classmethod
    def zeros(cls, length: int) -> "BitVector":
        return cls(_frozen(np.zeros(n_words(length), dtype="<u8")), length)

    @classmethod
    def ones(cls, length: int) -> "BitVector":
        return cls.from_bits(np.ones(length, dtype=np.uint8))

    @classmethod
    def random(cls, length: int, rng: np.random.Generator) -> "BitVector":
        return cls.from_bits(rng.integers(0, 2, size=length, dtype=np.uint8))

    @classmethod
    def concat(cls, parts: Iterable["BitVector"]) -> "BitVector":
        return cls.from_bits(np.concatenate([p.to_bits() for p in parts]))

    def to_bits(self) -> np.ndarray:
        return unpack_bits(self.words, self.length)

    def weight(self) -> int:
        return int(np.bitwise_count(self.words).sum())

    def __len__(self) -> int:
        return self.length

    def __getitem__(self, idx):
        if isinstance(idx, slice):
            return BitVector.from_bits(self.to_bits()[idx])
        if idx < 0:
            idx += self.length
        if not 0 <= idx < self.length:
            raise IndexError(idx)
        return int((self.words[idx // WORD_BITS] >> np.uint64(idx % WORD_BITS)) & np.uint64(1))

    def __xor__(self, other: "BitVector") -> "BitVector":
        if self.length != other.length:
            raise ValueError(f"length mismatch: {self.length} vs {other.length}")
        return BitVector(_frozen(self.words ^ other.words), self.length)

    def __invert__(self) -> "BitVector":
        return self ^ BitVector.ones(self.length)

    def __eq__(self, other) -> bool:
        if not isinstance(other, BitVector):
            return NotImplemented
        return self.length == other.length and bool(np.array_equal(self.words, other.words))

    def __hash__(self) -> int:
        return hash((self.length, self.words.tobytes()))

    def any(self) -> bool:
        return bool(self.words.any())

    def __repr__(self) -> str:
        s = "".join(map(str, self.to_bits()[:64]))
        return f"BitVector({s}{'...' if self.length > 64 else ''}, len={self.length})"


@dataclass(frozen=True, eq=False)
class BitMatrix:
    """Immutable packed binary matrix; each row is a packed word array."""

    words: np.ndarray
    rows: int
    cols: int

    @classmethod
    def from_bits(cls, bits) -> "BitMatrix":
        bits = np.asarray(bits, dtype=np.uint8)
        if bits.ndim != 2:
            raise ValueError("expected a 2-D array")
        r, c = bits.shape
        words = pack_bits(bits) if r else np.zeros((0, n_words(c)), dtype="<u8")
        return cls(_frozen(np.ascontiguousarray(words)), r, c)

    @classmethod
    def from_rows(cls, rows: Sequence[BitVector], cols: int | None = None) -> "BitMatrix":
        if not rows:
            if cols is None:
                raise ValueError("cols required for an empty row list")
            return cls.zeros(0, cols)
        return cls.from_bits(np.stack([r.to_bits() for r in rows]))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "BitMatrix":
        return cls(_frozen(np.zeros((rows, n_words(cols)), dtype="<u8")), rows, cols)

    @classmethod
    def identity(cls, n: int) -> "BitMatrix":
        return cls.from_bits(np.eye(n, dtype=np.uint8))

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    def to_bits(self) -> np.ndarray:
        if self.rows == 0:
            return np.zeros((0, self.cols), dtype=np.uint8)
        return unpack_bits(self.words, self.cols)

    def row(self, i: int) -> BitVector:
        return BitVector(_frozen(self.words[i].copy()), self.cols)

    def columns(self, idx) -> "BitMatrix":
        return BitMatrix.from_bits(self.to_bits()[:, idx])

    def transpose(self) -> "BitMatrix":
        return BitMatrix.from_bits(self.to_bits().T)

    @property
    def T(self) -> "BitMatrix":
        return self.transpose()

    def __matmul__(self, other: "BitMatrix") -> "BitMatrix":
        if self.cols != other.rows:
            raise ValueError(f"cannot multiply {self.shape} by {other.shape}")
        prod = self.to_bits().astype(np.int64) @ other.to_bits().astype(np.int64)
        return BitMatrix.from_bits(prod & 1)

    def __eq__(self, other) -> bool:
        if not isinstance(other, BitMatrix):
            return NotImplemented
        return self.shape == other.shape and bool(np.array_equal(self.words, other.words))

    def __hash__(self) -> int:
        return hash((self.shape, self.words.tobytes()))

    def __repr__(self) -> str:
        return f"BitMatrix({self.rows}x{self.cols})"


def hstack(blocks: Sequence[BitMatrix]) -> BitMatrix:
    return BitMatrix.from_bits(np.hstack([b.to_bits() for b in blocks]))


def mul_vec_mt(v: BitVector, M: BitMatrix) -> BitVector:
    """Return v·Mᵀ: bit i is the parity of ``v AND row_i(M)``."""
    if v.length != M.cols:
        raise ValueError(f"dimension mismatch: len(v)={v.length}, M.cols={M.cols}")
    if M.rows == 0:
        return BitVector.zeros(0)
    parity = np.bitwise_count(M.words & v.words).sum(axis=1) & 1
    return BitVector.from_bits(parity)


def _row_reduce(words: np.ndarray, columns: Iterable[int]) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form, visiting pivot candidates in ``columns`` order.

    Returns the nonzero rows of the RREF and the pivot column of each row.
    Visiting columns right-to-left yields the greedy (rightmost-first)
    maximal independent column set.
    """
    A = np.array(words, dtype="<u8", copy=True)
    nrows = A.shape[0]
    r = 0
    pivots: list[int] = []
    for c in columns:
        if r == nrows:
            break
        w, b = divmod(c, WORD_BITS)
        mask = np.uint64(1) << np.uint64(b)
        hits = np.flatnonzero(A[r:, w] & mask)
        if hits.size == 0:
            continue
        p = r + int(hits[0])
        if p != r:
            A[[r, p]] = A[[p, r]]
        others = np.flatnonzero(A[:, w] & mask)
        others = others[others != r]
        if others.size:
            A[others] ^= A[r]
        pivots.append(c)
        r += 1
    return A[:r], pivots


def rank(M: BitMatrix) -> int:
    if M.rows == 0 or M.cols == 0:
        return 0
    return len(_row_reduce(M.words, range(M.cols))[1])


def invert(M: BitMatrix) -> BitMatrix:
    """Inverse of a square matrix; raises SingularMatrixError if rank < n."""
    if M.rows != M.cols:
        raise ValueError(f"matrix is not square: {M.shape}")
    n = M.rows
    aug = BitMatrix.from_bits(np.hstack([M.to_bits(), np.eye(n, dtype=np.uint8)]))
    R, pivots = _row_reduce(aug.words, range(n))
    if len(pivots) < n:
        raise SingularMatrixError(f"matrix has rank {len(pivots)} < {n}")
    return BitMatrix.from_bits(unpack_bits(R, 2 * n)[:, n:])


def nullspace_basis(M: BitMatrix) -> list[BitVector]:
    """Basis of {x : x·Mᵀ = 0}, one vector per non-pivot column."""
    c = M.cols
    if M.rows == 0:
        return [BitVector.from_bits(row) for row in np.eye(c, dtype=np.uint8)]
    R, pivots = _row_reduce(M.words, range(c))
    Rb = unpack_bits(R, c) if len(pivots) else np.zeros((0, c), dtype=np.uint8)
    pivot_set = set(pivots)
    basis = []
    for f in (j for j in range(c) if j not in pivot_set):
        x = np.zeros(c, dtype=np.uint8)
        x[f] = 1
        x[pivots] = Rb[:, f]
        basis.append(BitVector.from_bits(x))
    return basis


def find_invertible_right_block(M: BitMatrix) -> tuple[np.ndarray, BitMatrix]:
    """Find a column permutation making the right m×m block of M invertible.

    Columns are selected greedily from the right. Every dependent column
    inside the right block is swapped with the nearest selected column to
    its left, so the permutation is the identity when the natural right
    block is already invertible.

    Returns ``(perm, inv)`` where ``M.columns(perm)`` has an invertible right
    block and ``inv`` is its inverse.
    """
    m, w = M.shape
    if w < m:
        raise RankDeficientError(f"{m}x{w} matrix cannot have rank {m}")
    _, pivots = _row_reduce(M.words, range(w - 1, -1, -1)) if m else (None, [])
    if len(pivots) < m:
        raise RankDeficientError(f"matrix has rank {len(pivots)} < {m}")
    chosen = set(pivots)
    right = range(w - m, w)
    holes = sorted((c for c in right if c not in chosen), reverse=True)
    donors = sorted((c for c in chosen if c < w - m), reverse=True)
    perm = np.arange(w)
    for h, d in zip(holes, donors):
        perm[h], perm[d] = d, h
    block = M.columns(perm[w - m:])
    return _frozen(perm), invert(block)
