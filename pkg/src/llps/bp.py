"""Flooding sum-product decoder on the sparse check adjacency of a layout."""

from __future__ import annotations

from typing import NamedTuple

import numba
import numpy as np

from .channel import LLR_CLIP
from .gf2 import BitVector
from .ldpc import LinearCodeLayout

# |tanh product| above this is treated as saturated (atanh loses all precision)
_SATURATION = 1.0 - 1e-12


class DecodeResult(NamedTuple):
    hard: BitVector
    converged: bool
    iterations: int


@numba.njit(cache=True)
def _sum_product(llr, check_ptr, edge_var, max_iter, clip):
    n = llr.size
    m = check_ptr.size - 1
    n_edges = edge_var.size
    c2v = np.zeros(n_edges)
    v2c = np.empty(n_edges)
    t = np.empty(n_edges)
    prefix = np.empty(n_edges)
    post = np.empty(n)
    hard = np.zeros(n, dtype=np.uint8)
    for i in range(n):
        post[i] = llr[i]

    for it in range(1, max_iter + 1):
        for e in range(n_edges):
            x = post[edge_var[e]] - c2v[e]
            if x > clip:
                x = clip
            elif x < -clip:
                x = -clip
            v2c[e] = x
            t[e] = np.tanh(0.5 * x)

        for c in range(m):
            lo = check_ptr[c]
            hi = check_ptr[c + 1]
            acc = 1.0
            for e in range(lo, hi):
                prefix[e] = acc
                acc *= t[e]
            acc = 1.0
            for e in range(hi - 1, lo - 1, -1):
                x = prefix[e] * acc
                acc *= t[e]
                if abs(x) < _SATURATION:
                    msg = 2.0 * np.arctanh(x)
                else:
                    # min-sum fallback: sign product, smallest other magnitude
                    mag = clip
                    for f in range(lo, hi):
                        if f != e and abs(v2c[f]) < mag:
                            mag = abs(v2c[f])
                    msg = mag if x > 0 else -mag
                if msg > clip:
                    msg = clip
                elif msg < -clip:
                    msg = -clip
                c2v[e] = msg

        for i in range(n):
            post[i] = llr[i]
        for e in range(n_edges):
            post[edge_var[e]] += c2v[e]
        for i in range(n):
            hard[i] = 1 if post[i] < 0 else 0

        ok = True
        for c in range(m):
            par = 0
            for e in range(check_ptr[c], check_ptr[c + 1]):
                par ^= hard[edge_var[e]]
            if par:
                ok = False
                break
        if ok:
            return hard, True, it
    return hard, False, max_iter


def decode_bits(layout: LinearCodeLayout, channel_llrs, max_iter: int = 100, clip: float = LLR_CLIP):
    """Like :func:`decode` but returns the hard decision as a uint8 array."""
    llr = np.ascontiguousarray(channel_llrs, dtype=np.float64)
    if llr.shape != (layout.n,):
        raise ValueError(f"expected {layout.n} LLRs, got shape {llr.shape}")
    return _sum_product(llr, layout.check_ptr, layout.edge_var, int(max_iter), float(clip))


def decode(layout: LinearCodeLayout, channel_llrs, max_iter: int = 100) -> DecodeResult:
    """Sum-product decoding with syndrome-based early stopping.

    LLRs are log P(0)/P(1); shortened positions should already be set to the
    clip value by the caller.
    """
    hard, ok, iters = decode_bits(layout, channel_llrs, max_iter)
    return DecodeResult(BitVector.from_bits(hard), bool(ok), int(iters))
