"""PAS / LLPS encoders, the dirty-paper LLPS encoder and information recovery."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .gf2 import BitMatrix, BitVector, mul_vec_mt
from .ldpc import LinearCodeLayout
from .sdm import CostFunction, PatternMatch, SdmSpec, build, match


@dataclass(frozen=True, eq=False)
class Codeword:
    bits: BitVector
    k_sys: int

    @property
    def systematic(self) -> BitVector:
        return self.bits[: self.k_sys]

    @property
    def parity(self) -> BitVector:
        return self.bits[self.k_sys :]

    def __len__(self) -> int:
        return self.bits.length


def is_codeword(layout: LinearCodeLayout, c: BitVector) -> bool:
    return not mul_vec_mt(c, layout.H).any()


def _check_frozen(layout: LinearCodeLayout, v: BitVector) -> None:
    if layout.shortened and v.to_bits()[: layout.shortened].any():
        raise ValueError("shortened systematic positions must be zero")


def pas_encode(layout: LinearCodeLayout, v: BitVector) -> Codeword:
    """Systematic encoding with a square parity block: p = v·H_sᵀ·(H_pᵀ)⁻¹."""
    if layout.ell != 0:
        raise ValueError(f"PAS encoding needs ell = 0, layout has ell = {layout.ell}")
    if v.length != layout.k:
        raise ValueError(f"expected {layout.k} systematic bits, got {v.length}")
    _check_frozen(layout, v)
    s = mul_vec_mt(v, layout.H_s)
    p = mul_vec_mt(s, layout.right_inv).to_bits()
    # right_inv is for the permuted block; undo the permutation
    parity = np.zeros(layout.m, dtype=np.uint8)
    parity[layout.parity_perm] = p
    return Codeword(BitVector.concat([v, BitVector.from_bits(parity)]), layout.k)


def llps_encode(layout: LinearCodeLayout, v: BitVector, cost: CostFunction) -> Codeword:
    """Systematic part v, shaped parity chosen by the SDM on H_p."""
    if v.length != layout.k_sys:
        raise ValueError(f"expected {layout.k_sys} systematic bits, got {v.length}")
    _check_frozen(layout, v)
    s = mul_vec_mt(v, layout.H_s)
    p = match(layout.sdm, s, cost)
    return Codeword(BitVector.concat([v, p]), layout.k_sys)


def label(z) -> BitVector:
    """Interferer label a(z): -1 -> 0, +1 -> 1."""
    z = np.asarray(z)
    if not np.isin(z, (-1, 1)).all():
        raise ValueError("interferer symbols must be -1 or +1")
    return BitVector.from_bits((z > 0).astype(np.uint8))


@dataclass(frozen=True, eq=False)
class DpcEncoderSpec:
    """Two-SDM dirty-paper encoder.

    The outer SDM maps ``u`` to the free (non-shortened) systematic bits through
    ``Hv = [random | I]``; the inner SDM shapes the parity on the layout's H_p.
    """

    layout: LinearCodeLayout
    Hv: BitMatrix
    outer_sdm: SdmSpec
    inner_sdm: SdmSpec
    seed: int

    @property
    def k_info(self) -> int:
        return self.Hv.rows

    @property
    def outer_rate(self) -> float:
        return self.outer_sdm.rate

    @property
    def inner_rate(self) -> float:
        return self.inner_sdm.rate

    @property
    def rate(self) -> float:
        return self.k_info / self.layout.n


def make_dpc_encoder(layout: LinearCodeLayout, k_info: int, seed: int = 1) -> DpcEncoderSpec:
    free = layout.k_sys - layout.shortened
    if not 0 < k_info <= free:
        raise ValueError(f"k_info={k_info} must lie in [1, {free}]")
    rng = np.random.default_rng(seed)
    left = rng.integers(0, 2, size=(k_info, free - k_info), dtype=np.uint8)
    Hv = BitMatrix.from_bits(np.hstack([left, np.eye(k_info, dtype=np.uint8)]))
    outer = build(Hv, materialize=free - k_info <= 20)
    return DpcEncoderSpec(layout, Hv, outer, layout.sdm, seed)


def dpc_encode(spec: DpcEncoderSpec, u: BitVector, z) -> Codeword:
    """Encode ``u`` against the known interferer ``z`` (length n, entries ±1).

    Both SDMs minimize the Hamming distance to the interferer label on their
    segment, so the transmitted BPSK symbols tend to align with z.
    """
    lay = spec.layout
    if u.length != spec.k_info:
        raise ValueError(f"expected {spec.k_info} information bits, got {u.length}")
    a = label(z).to_bits()
    if a.size != lay.n:
        raise ValueError(f"interferer length {a.size} != n={lay.n}")
    s0, ks = lay.shortened, lay.k_sys
    v_free = match(spec.outer_sdm, u, PatternMatch(BitVector.from_bits(a[s0:ks])))
    v = BitVector.concat([BitVector.zeros(s0), v_free]) if s0 else v_free
    syn = mul_vec_mt(v, lay.H_s)
    p = match(spec.inner_sdm, syn, PatternMatch(BitVector.from_bits(a[ks:])))
    return Codeword(BitVector.concat([v, p]), ks)


def recover_info(spec: DpcEncoderSpec, v_hat: BitVector) -> BitVector:
    """u = v̂·H_vᵀ over the free systematic positions."""
    s0 = spec.layout.shortened
    v_free = v_hat[s0:] if s0 else v_hat
    return mul_vec_mt(v_free, spec.Hv)
