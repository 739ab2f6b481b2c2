"""Achievable rates for the dirty-paper BPSK channel.

I(B;Y) is obtained by trapezoidal integration of the four-component Gaussian
mixture densities; the DPC rate subtracts I(B;Z) = 1 - h2(q).
"""

from __future__ import annotations

import csv
from dataclasses import astuple, dataclass, fields
from typing import IO, Iterable, NamedTuple

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from .channel import DpcChannelParams

LN2 = np.log(2.0)
Q_BOUNDS = (0.5, 0.999)


def h2(q: float) -> float:
    """Binary entropy in bits."""
    if q <= 0.0 or q >= 1.0:
        return 0.0
    return float(-q * np.log2(q) - (1 - q) * np.log2(1 - q))


def awgn_capacity(snr_db: float) -> float:
    return 0.5 * np.log2(1.0 + 10.0 ** (snr_db / 10.0))


def _grid(params: DpcChannelParams, nodes: int) -> np.ndarray:
    span = params.alpha + params.beta + 10.0 * params.sigma
    return np.linspace(-span, span, nodes)


def _log_conditionals(y: np.ndarray, params: DpcChannelParams, q: float):
    """Natural-log densities p(y|b=0), p(y|b=1) under the joint P_Z·P_{B|Z}."""
    a, b, s = params.alpha, params.beta, params.sigma
    norm = -0.5 * np.log(2 * np.pi * s * s)

    def mix(mu1, mu2, w1):
        return norm + np.logaddexp(np.log(w1) - (y - mu1) ** 2 / (2 * s * s), np.log1p(-w1) - (y - mu2) ** 2 / (2 * s * s))

    # P(z|b) = P(b|z) because both marginals are uniform
    return mix(-a - b, -a + b, q), mix(a + b, a - b, q)


def _neg_plogp(logp: np.ndarray) -> np.ndarray:
    return -np.exp(logp) * logp / LN2


def _trapz(f, y):
    return float(np.trapezoid(f, y))


class Integrals(NamedTuple):
    h_y: float
    h_y_given_b: float
    h_b_given_y: float


def _integrals(params: DpcChannelParams, q: float, nodes: int) -> Integrals:
    y = _grid(params, nodes)
    l0, l1 = _log_conditionals(y, params, q)
    ly = np.logaddexp(l0, l1) + np.log(0.5)
    h_y = _trapz(_neg_plogp(ly), y)
    h_yb = 0.5 * (_trapz(_neg_plogp(l0), y) + _trapz(_neg_plogp(l1), y))
    # posterior route: H(B|Y) = ∫ p(y)·h2(P(B=0|y)) dy
    post0 = np.exp(l0 + np.log(0.5) - ly)
    with np.errstate(divide="ignore", invalid="ignore"):
        hb = -(post0 * np.log2(post0) + (1 - post0) * np.log2(1 - post0))
    hb = np.nan_to_num(hb, nan=0.0)
    h_by = _trapz(np.exp(ly) * hb, y)
    return Integrals(h_y, h_yb, h_by)


def mutual_info_by(params: DpcChannelParams, q: float = 0.5, nodes: int = 8001) -> float:
    """I(B;Y) = h(Y) - h(Y|B) with B uniform and P_{B|Z} given by q."""
    ints = _integrals(params, q, nodes)
    value = ints.h_y - ints.h_y_given_b
    if not np.isfinite(value):
        raise FloatingPointError(f"integration failed for {params}, q={q}: {ints}")
    return value


def rate_int_as_noise(params: DpcChannelParams, nodes: int = 8001) -> float:
    return max(0.0, mutual_info_by(params, 0.5, nodes))


def rate_dpc(params: DpcChannelParams, q: float, clamp: bool = True, nodes: int = 8001) -> float:
    """R_dpc = I(B;Y) - I(B;Z), with I(B;Z) = 1 - h2(q)."""
    if not 0.0 < q < 1.0:
        raise ValueError(f"q must lie in (0, 1), got {q}")
    r = mutual_info_by(params, q, nodes) - (1.0 - h2(q))
    return max(0.0, r) if clamp else r


def optimize_q(params: DpcChannelParams, xtol: float = 1e-5) -> tuple[float, float]:
    """Maximize R_dpc over q in [1/2, 0.999]; returns (q_opt, rate)."""
    res = minimize_scalar(
        lambda q: -rate_dpc(params, q, clamp=False),
        bounds=Q_BOUNDS,
        method="bounded",
        options={"xatol": xtol},
    )
    q_opt, r_opt = float(res.x), float(-res.fun)
    r_half = rate_dpc(params, 0.5, clamp=False)
    if r_half >= r_opt:
        q_opt, r_opt = 0.5, r_half
    return q_opt, max(0.0, r_opt)


def entropy_chain_check(params: DpcChannelParams, q: float, nodes: int = 8001) -> tuple[float, float]:
    """Residuals of the two rate identities, each side from separate integrals.

    Returns ``(|[H(B|Z) - H(B|Y)] - [I(B;Y) - I(B;Z)]|, |[H(B) - H(B|Y)] - I(B;Y)|)``.
    H(B|Y) is integrated through the posterior, I(B;Y) through h(Y) - h(Y|B).
    """
    ints = _integrals(params, q, nodes)
    joint = 0.5 * np.array([[q, 1 - q], [1 - q, q]])  # rows b, columns z
    p_b = joint.sum(axis=1)
    p_z = joint.sum(axis=0)
    h_b = -float(np.sum(p_b * np.log2(p_b)))
    h_b_given_z = -float(np.sum(joint * np.log2(joint / p_z)))
    i_bz = float(np.sum(joint * np.log2(joint / np.outer(p_b, p_z))))
    i_by = ints.h_y - ints.h_y_given_b
    r1 = abs((h_b_given_z - ints.h_b_given_y) - (i_by - i_bz))
    r2 = abs((h_b - ints.h_b_given_y) - i_by)
    return r1, r2


def pas_rate(r_fec: float, i_shaped: float, i_uniform: float) -> float:
    """Time-sharing rate of PAS: R_fec·I(V;Y) + (1 - R_fec)·I(U;Y)."""
    return r_fec * i_shaped + (1.0 - r_fec) * i_uniform


@dataclass
class RatePoint:
    snr_db: float
    awgn_capacity: float
    r_int_as_noise: float
    r_dpc: float
    q_opt: float


def rate_point(snr_db: float, sir_db: float) -> RatePoint:
    params = DpcChannelParams.from_db(snr_db, sir_db)
    q_opt, r = optimize_q(params)
    return RatePoint(snr_db, awgn_capacity(snr_db), rate_int_as_noise(params), r, q_opt)


def rate_curve(snr_grid: Iterable[float], sir_db: float) -> list[RatePoint]:
    return [rate_point(float(s), sir_db) for s in snr_grid]


def snr_at_rate(rate_of_snr, target: float, lo: float = -10.0, hi: float = 20.0) -> float:
    """SNR (dB) where a nondecreasing rate curve reaches ``target``."""
    return brentq(lambda s: rate_of_snr(s) - target, lo, hi, xtol=1e-6)


def crossing_snrs(target: float, sir_db: float, q: float | None = None) -> tuple[float, float]:
    """SNRs where the interference-as-noise and DPC rates reach ``target``.

    With ``q=None`` the DPC rate is re-optimized at every SNR.
    """
    ref = snr_at_rate(lambda s: rate_int_as_noise(DpcChannelParams.from_db(s, sir_db)), target)
    if q is None:
        dpc = snr_at_rate(lambda s: optimize_q(DpcChannelParams.from_db(s, sir_db))[1], target)
    else:
        dpc = snr_at_rate(lambda s: rate_dpc(DpcChannelParams.from_db(s, sir_db), q), target)
    return ref, dpc


def write_rates_csv(points: list[RatePoint], out: IO[str], fixed_q: list[float] | None = None) -> None:
    header = [f.name for f in fields(RatePoint)]
    if fixed_q is not None:
        header.append("r_dpc_fixed_q")
    w = csv.writer(out, lineterminator="\n")
    w.writerow(header)
    for i, p in enumerate(points):
        row = [f"{v:.6g}" for v in astuple(p)]
        if fixed_q is not None:
            row.append(f"{fixed_q[i]:.6g}")
        w.writerow(row)
