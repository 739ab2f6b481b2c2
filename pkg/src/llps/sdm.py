"""Syndrome distribution matcher (SDM).

Given a parity former ``Hp`` (m × (m+ell), full row rank) and a syndrome ``s``,
the matcher returns the cheapest vector ``p`` with ``p·Hpᵀ = s``. The feasible
set is the coset ``C_p + p̃(s)`` where ``C_p`` is the ell-dimensional null
space of ``Hp`` and ``p̃(s) = [0 | s·(Rᵀ)⁻¹]`` for an invertible right block R.

All supported costs are affine in a Hamming distance ``w(p ⊕ t)``, so the
search is a single XOR/popcount scan over the ``2**ell`` coset members in
reflected Gray-code order, keeping the first minimum.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import log2

import numba
import numpy as np

from .gf2 import (
    BitMatrix,
    BitVector,
    RankDeficientError,
    find_invertible_right_block,
    mul_vec_mt,
    n_words,
    nullspace_basis,
)


@dataclass(frozen=True)
class HammingWeight:
    pass


@dataclass(frozen=True)
class CrossEntropy:
    """Per-symbol cross entropy against a binary target distribution.

    For binary vectors this equals ``log2(1/p0) + (w/N)·log2(p0/p1)``, i.e. it is
    affine in the Hamming weight ``w``: minimizing it minimizes the weight when
    ``p0 > 1/2`` and maximizes it when ``p0 < 1/2``.
    """

    p0: float

    def __post_init__(self):
        if not 0.0 < self.p0 < 1.0:
            raise ValueError(f"P_B(0) must lie in (0, 1), got {self.p0}")


@dataclass(frozen=True, eq=False)
class PatternMatch:
    target: BitVector


CostFunction = HammingWeight | CrossEntropy | PatternMatch


def eval_cost(cost: CostFunction, p: BitVector) -> float:
    if isinstance(cost, HammingWeight):
        return float(p.weight())
    if isinstance(cost, PatternMatch):
        return float((p ^ cost.target).weight())
    if isinstance(cost, CrossEntropy):
        w = p.weight()
        n = p.length
        return (w * log2(1.0 / (1.0 - cost.p0)) + (n - w) * log2(1.0 / cost.p0)) / n
    raise TypeError(f"unknown cost {cost!r}")


@dataclass(frozen=True, eq=False)
class SdmSpec:
    Hp: BitMatrix
    perm: np.ndarray
    right_block_inv: BitMatrix
    coset_basis: tuple[BitVector, ...]
    basis_words: np.ndarray
    coset_table: np.ndarray | None

    @property
    def m(self) -> int:
        return self.Hp.rows

    @property
    def ell(self) -> int:
        return self.Hp.cols - self.Hp.rows

    @property
    def length(self) -> int:
        return self.Hp.cols

    @property
    def rate(self) -> float:
        """Bits of syndrome per output bit, m/(m+ell)."""
        return self.m / self.length


def gray_span(basis_words: np.ndarray) -> np.ndarray:
    """All 2**ell combinations of the basis rows, in reflected Gray-code order."""
    ell, nw = basis_words.shape
    table = np.zeros((1 << ell, nw), dtype="<u8")
    for j in range(ell):
        half = 1 << j
        table[half : 2 * half] = table[:half][::-1] ^ basis_words[j]
    return table


def build(Hp: BitMatrix, materialize: bool = True) -> SdmSpec:
    """Precompute the coset code C_p and the particular-solution map."""
    try:
        perm, inv = find_invertible_right_block(Hp)
    except RankDeficientError as exc:
        raise RankDeficientError(f"SDM parity former must have full row rank: {exc}") from None
    basis = nullspace_basis(Hp)
    ell = Hp.cols - Hp.rows
    assert len(basis) == ell
    nw = n_words(Hp.cols)
    bw = np.array([b.words for b in basis], dtype="<u8").reshape(ell, nw)
    bw.flags.writeable = False
    table = None
    if materialize:
        table = gray_span(bw)
        table.flags.writeable = False
    return SdmSpec(Hp, perm, inv, tuple(basis), bw, table)


def particular_solution(spec: SdmSpec, s: BitVector) -> BitVector:
    """p̃(s): zero on the first ell permuted positions, s·(Rᵀ)⁻¹ on the rest."""
    if s.length != spec.m:
        raise ValueError(f"syndrome length {s.length} != m={spec.m}")
    r = mul_vec_mt(s, spec.right_block_inv).to_bits()
    p = np.zeros(spec.length, dtype=np.uint8)
    p[spec.perm[spec.ell :]] = r
    return BitVector.from_bits(p)


@numba.njit(cache=True, inline="always")
def _popcount64(x):
    x = x - ((x >> np.uint64(1)) & np.uint64(0x5555555555555555))
    x = (x & np.uint64(0x3333333333333333)) + ((x >> np.uint64(2)) & np.uint64(0x3333333333333333))
    x = (x + (x >> np.uint64(4))) & np.uint64(0x0F0F0F0F0F0F0F0F)
    return (x * np.uint64(0x0101010101010101)) >> np.uint64(56)


@numba.njit(cache=True)
def _scan_table(table, t):
    best = 1 << 62
    best_i = 0
    nrow, nw = table.shape
    for i in range(nrow):
        w = 0
        for j in range(nw):
            w += _popcount64(table[i, j] ^ t[j])
            if w >= best:
                break
        if w < best:
            best = w
            best_i = i
    return best_i


@numba.njit(cache=True)
def _scan_gray(basis, t):
    ell, nw = basis.shape
    cur = t.copy()
    best = 0
    for j in range(nw):
        best += _popcount64(cur[j])
    best_i = 0
    for i in range(1, 1 << ell):
        # flip the basis vector indexed by the lowest set bit of i
        b = 0
        while not (i >> b) & 1:
            b += 1
        w = 0
        for j in range(nw):
            cur[j] ^= basis[b, j]
            w += _popcount64(cur[j])
        if w < best:
            best = w
            best_i = i
    return best_i


def _combination(basis_words: np.ndarray, index: int) -> np.ndarray:
    """Coset-code member at position ``index`` of the Gray-code enumeration."""
    g = index ^ (index >> 1)
    out = np.zeros(basis_words.shape[1], dtype="<u8")
    j = 0
    while g:
        if g & 1:
            out ^= basis_words[j]
        g >>= 1
        j += 1
    return out


def _search_target(cost: CostFunction, length: int) -> tuple[np.ndarray | None, bool]:
    """Reduce a cost to a distance target: minimize w(p ⊕ t).

    Returns ``(t_words, constant)``; ``t`` is None for plain weight.
    """
    if isinstance(cost, HammingWeight):
        return None, False
    if isinstance(cost, PatternMatch):
        if cost.target.length != length:
            raise ValueError(f"target length {cost.target.length} != {length}")
        return cost.target.words, False
    if isinstance(cost, CrossEntropy):
        if cost.p0 == 0.5:
            return None, True
        if cost.p0 > 0.5:
            return None, False
        return BitVector.ones(length).words, False
    raise TypeError(f"unknown cost {cost!r}")


def match(spec: SdmSpec, s: BitVector, cost: CostFunction = HammingWeight()) -> BitVector:
    """Minimum-cost member of the coset selected by syndrome ``s``.

    Ties resolve to the first minimum in Gray-code enumeration order starting
    from the all-zero combination.
    """
    p0 = particular_solution(spec, s)
    if spec.ell == 0:
        return p0
    shift, constant = _search_target(cost, spec.length)
    if constant:
        return p0
    t = p0.words if shift is None else p0.words ^ shift
    t = np.ascontiguousarray(t, dtype=np.uint64)
    if spec.coset_table is not None:
        idx = _scan_table(spec.coset_table, t)
        x = spec.coset_table[idx]
    else:
        idx = _scan_gray(spec.basis_words, t)
        x = _combination(spec.basis_words, idx)
    return BitVector(p0.words ^ x, spec.length)


def recover_syndrome(spec: SdmSpec, p: BitVector) -> BitVector:
    """Inverse of the matcher: s = p·Hpᵀ."""
    if p.length != spec.length:
        raise ValueError(f"length {p.length} != m+ell={spec.length}")
    return mul_vec_mt(p, spec.Hp)


def _bulk_costs(cost: CostFunction, words: np.ndarray) -> np.ndarray:
    n = words.shape[1]
    if isinstance(cost, HammingWeight):
        return words.sum(axis=1).astype(float)
    if isinstance(cost, PatternMatch):
        return (words ^ cost.target.to_bits()).sum(axis=1).astype(float)
    w = words.sum(axis=1)
    return (w * log2(1.0 / (1.0 - cost.p0)) + (n - w) * log2(1.0 / cost.p0)) / n


def syndrome_lut(Hp: BitMatrix, cost: CostFunction = HammingWeight()) -> tuple[np.ndarray, np.ndarray]:
    """Offline syndrome-indexed table by exhaustive search over all 2**(m+ell) words.

    Intended for small instances (m + ell <= 22); entry ``i`` corresponds to the
    syndrome whose bit j is ``(i >> j) & 1``. Returns ``(min_cost, argmin_bits)``
    where ``argmin_bits`` is the first minimizer in lexicographic integer order.
    """
    m, w = Hp.shape
    if w > 22:
        raise ValueError(f"exhaustive LUT over 2**{w} words is too large")
    idx = np.arange(1 << w, dtype=np.int64)
    words = ((idx[:, None] >> np.arange(w)) & 1).astype(np.uint8)
    hb = Hp.to_bits().astype(np.int64)
    syn = (words.astype(np.int64) @ hb.T) & 1
    syn_idx = syn @ (1 << np.arange(m, dtype=np.int64)) if m else np.zeros(len(idx), dtype=np.int64)
    costs = _bulk_costs(cost, words)
    order = np.lexsort((idx, costs, syn_idx))
    first = np.ones(len(order), dtype=bool)
    first[1:] = syn_idx[order][1:] != syn_idx[order][:-1]
    chosen = order[first]
    best_cost = np.full(1 << m, np.inf)
    best_bits = np.zeros((1 << m, w), dtype=np.uint8)
    best_cost[syn_idx[chosen]] = costs[chosen]
    best_bits[syn_idx[chosen]] = words[chosen]
    return best_cost, best_bits
