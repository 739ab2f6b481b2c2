"""QC-LDPC construction, alist I/O, shortening and H_s/H_p partitioning."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from functools import cached_property

import numpy as np

from .gf2 import BitMatrix, RankDeficientError, find_invertible_right_block, rank

# IEEE 802.16e rate-1/2 model matrix, expansion factor z0 = 96.
WIMAX_R12_BASE = np.array(
    [
        [-1, 94, 73, -1, -1, -1, -1, -1, 55, 83, -1, -1, 7, 0, -1, -1, -1, -1, -1, -1, -1, -1, -1, -1],
        [-1, 27, -1, -1, -1, 22, 79, 9, -1, -1, -1, 12, -1, 0, 0, -1, -1, -1, -1, -1, -1, -1, -1, -1],
        [-1, -1, -1, 24, 22, 81, -1, 33, -1, -1, -1, 0, -1, -1, 0, 0, -1, -1, -1, -1, -1, -1, -1, -1],
        [61, -1, 47, -1, -1, -1, -1, -1, 65, 25, -1, -1, -1, -1, -1, 0, 0, -1, -1, -1, -1, -1, -1, -1],
        [-1, -1, 39, -1, -1, -1, 84, -1, -1, 41, 72, -1, -1, -1, -1, -1, 0, 0, -1, -1, -1, -1, -1, -1],
        [-1, -1, -1, -1, 46, 40, -1, 82, -1, -1, -1, 79, 0, -1, -1, -1, -1, 0, 0, -1, -1, -1, -1, -1],
        [-1, -1, 95, 53, -1, -1, -1, -1, -1, 14, 18, -1, -1, -1, -1, -1, -1, -1, 0, 0, -1, -1, -1, -1],
        [-1, 11, 73, -1, -1, -1, 2, -1, -1, 47, -1, -1, -1, -1, -1, -1, -1, -1, -1, 0, 0, -1, -1, -1],
        [12, -1, -1, -1, 83, 24, -1, 43, -1, -1, -1, 51, -1, -1, -1, -1, -1, -1, -1, -1, 0, 0, -1, -1],
        [-1, -1, -1, -1, -1, 94, -1, 59, -1, -1, 70, 72, -1, -1, -1, -1, -1, -1, -1, -1, -1, 0, 0, -1],
        [-1, -1, 7, 65, -1, -1, -1, -1, 39, 49, -1, -1, -1, -1, -1, -1, -1, -1, -1, -1, -1, -1, 0, 0],
        [43, -1, -1, -1, -1, 66, -1, 41, -1, -1, -1, 26, 7, -1, -1, -1, -1, -1, -1, -1, -1, -1, -1, 0],
    ],
    dtype=np.int64,
)
WIMAX_Z0 = 96


class AlistError(ValueError):
    """Malformed alist input."""


def scale_exponents(base: np.ndarray, z: int, z0: int = WIMAX_Z0) -> np.ndarray:
    """Rate-1/2 WiMAX scaling rule: p -> floor(p·z/z0), -1 kept as -1."""
    base = np.asarray(base, dtype=np.int64)
    return np.where(base < 0, -1, (base * z) // z0)


def lift(base: np.ndarray, z: int, z0: int = WIMAX_Z0) -> BitMatrix:
    """Expand a model matrix into a binary parity-check matrix.

    Entry ``e >= 0`` becomes the z×z identity cyclically shifted right by the
    scaled exponent; ``-1`` becomes the zero block.
    """
    if not isinstance(z, (int, np.integer)) or not 24 <= z <= z0:
        raise ValueError(f"expansion factor z={z} outside [24, {z0}]")
    exps = scale_exponents(base, z, z0)
    br, bc = exps.shape
    H = np.zeros((br * z, bc * z), dtype=np.uint8)
    eye = np.arange(z)
    for i in range(br):
        for j in range(bc):
            e = exps[i, j]
            if e >= 0:
                H[i * z + eye, j * z + (eye + e) % z] = 1
    return BitMatrix.from_bits(H)


def wimax_r12(z: int) -> BitMatrix:
    return lift(WIMAX_R12_BASE, z)


def load_alist(text: str) -> BitMatrix:
    """Parse alist text (1-indexed adjacency lists, zero padding allowed)."""
    lines = [(i + 1, ln.split()) for i, ln in enumerate(text.splitlines())]
    pos = 0

    def next_tokens(allow_blank: bool = False) -> tuple[int, list[str]]:
        nonlocal pos
        while pos < len(lines):
            lineno, toks = lines[pos]
            pos += 1
            if toks or allow_blank:
                return lineno, toks
        raise AlistError("unexpected end of input")

    def ints(lineno: int, toks: list[str]) -> list[int]:
        try:
            return [int(t) for t in toks]
        except ValueError:
            raise AlistError(f"line {lineno}: non-integer token") from None

    lineno, toks = next_tokens()
    hdr = ints(lineno, toks)
    if len(hdr) != 2 or min(hdr) < 0:
        raise AlistError(f"line {lineno}: expected 'n m' header")
    n, m = hdr
    lineno, toks = next_tokens()
    maxd = ints(lineno, toks)
    if len(maxd) != 2:
        raise AlistError(f"line {lineno}: expected max column/row degrees")
    lineno, toks = next_tokens(allow_blank=n == 0)
    col_deg = ints(lineno, toks)
    if len(col_deg) != n:
        raise AlistError(f"line {lineno}: expected {n} column degrees, got {len(col_deg)}")
    lineno, toks = next_tokens(allow_blank=m == 0)
    row_deg = ints(lineno, toks)
    if len(row_deg) != m:
        raise AlistError(f"line {lineno}: expected {m} row degrees, got {len(row_deg)}")

    def adjacency(count: int, degrees: list[int], bound: int, what: str) -> list[list[int]]:
        out = []
        for idx in range(count):
            lineno, toks = next_tokens(allow_blank=degrees[idx] == 0)
            entries = [v for v in ints(lineno, toks) if v != 0]
            if len(entries) != degrees[idx]:
                raise AlistError(
                    f"line {lineno}: {what} {idx + 1} lists {len(entries)} entries, degree is {degrees[idx]}"
                )
            for v in entries:
                if not 1 <= v <= bound:
                    raise AlistError(f"line {lineno}: index {v} out of range 1..{bound}")
            out.append([v - 1 for v in entries])
        return out

    cols = adjacency(n, col_deg, m, "column")
    rows = adjacency(m, row_deg, n, "row")
    H = np.zeros((m, n), dtype=np.uint8)
    for j, rs in enumerate(cols):
        H[rs, j] = 1
    H2 = np.zeros_like(H)
    for i, cs in enumerate(rows):
        H2[i, cs] = 1
    if not np.array_equal(H, H2):
        raise AlistError("row and column adjacency lists disagree")
    return BitMatrix.from_bits(H)


def dump_alist(H: BitMatrix) -> str:
    bits = H.to_bits()
    m, n = bits.shape
    cols = [np.flatnonzero(bits[:, j]) + 1 for j in range(n)]
    rows = [np.flatnonzero(bits[i]) + 1 for i in range(m)]
    max_c = max((len(c) for c in cols), default=0)
    max_r = max((len(r) for r in rows), default=0)

    def pad(idx, width):
        return " ".join(str(v) for v in list(idx) + [0] * (width - len(idx)))

    out = [f"{n} {m}", f"{max_c} {max_r}", " ".join(str(len(c)) for c in cols), " ".join(str(len(r)) for r in rows)]
    out += [pad(c, max_c) for c in cols]
    out += [pad(r, max_r) for r in rows]
    return "\n".join(out) + "\n"


@dataclass(frozen=True, eq=False)
class LinearCodeLayout:
    """Parity-check matrix with its [H_s | H_p] split.

    H_s spans columns ``[0, k - ell)`` and H_p spans ``[k - ell, n)``. The first
    ``shortened`` systematic positions are frozen to zero.
    """

    H: BitMatrix
    ell: int
    parity_perm: np.ndarray
    right_inv: BitMatrix
    shortened: int = 0
    # CSR adjacency by check: variables of check c are edge_var[check_ptr[c]:check_ptr[c+1]]
    check_ptr: np.ndarray = field(repr=False, default=None)
    edge_var: np.ndarray = field(repr=False, default=None)

    @property
    def n(self) -> int:
        return self.H.cols

    @property
    def m(self) -> int:
        return self.H.rows

    @property
    def k(self) -> int:
        return self.n - self.m

    @property
    def k_sys(self) -> int:
        """Length of the systematic part v."""
        return self.k - self.ell

    @property
    def rate_fec(self) -> float:
        return self.k / self.n

    @property
    def effective_rate(self) -> float:
        s = self.shortened
        return (self.k - s) / (self.n - s)

    @cached_property
    def H_s(self) -> BitMatrix:
        return self.H.columns(slice(0, self.k_sys))

    @cached_property
    def H_p(self) -> BitMatrix:
        return self.H.columns(slice(self.k_sys, self.n))

    @cached_property
    def sdm(self):
        """Syndrome distribution matcher on H_p (built on first use)."""
        from .sdm import build

        return build(self.H_p, materialize=self.ell <= 20)

    @property
    def transmitted(self) -> np.ndarray:
        """Codeword positions that go over the channel."""
        return np.arange(self.shortened, self.n)


def _adjacency(H: BitMatrix) -> tuple[np.ndarray, np.ndarray]:
    bits = H.to_bits()
    rows, cols = np.nonzero(bits)
    ptr = np.zeros(H.rows + 1, dtype=np.int64)
    np.cumsum(np.bincount(rows, minlength=H.rows), out=ptr[1:])
    return ptr, cols.astype(np.int64)


def partition(H: BitMatrix, ell: int) -> LinearCodeLayout:
    """Split H into a m×(k-ell) syndrome former and m×(m+ell) parity former."""
    m, n = H.shape
    k = n - m
    if not 0 <= ell <= k:
        raise ValueError(f"ell={ell} outside [0, k={k}]")
    r = rank(H)
    if r < m:
        raise RankDeficientError(f"H has rank {r} < m={m}; drop dependent checks first")
    Hp = H.columns(slice(k - ell, n))
    try:
        perm, inv = find_invertible_right_block(Hp)
    except RankDeficientError as exc:
        raise RankDeficientError(f"parity former not surjective: {exc}") from None
    ptr, ev = _adjacency(H)
    return LinearCodeLayout(H=H, ell=ell, parity_perm=perm, right_inv=inv, check_ptr=ptr, edge_var=ev)


def shorten(layout: LinearCodeLayout, s: int) -> LinearCodeLayout:
    """Freeze the first ``s`` systematic positions to zero."""
    if s < 0 or s > layout.k_sys:
        raise ValueError(f"cannot shorten by {s}: only {layout.k_sys} systematic positions")
    if layout.ell > 0 and s == layout.k_sys:
        raise ValueError("shortening would leave no systematic bits")
    return replace(layout, shortened=s)
