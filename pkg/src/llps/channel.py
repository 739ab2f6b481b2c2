"""Dirty-paper BPSK channel y = α·x_b + β·z + w and its two demappers."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

LLR_CLIP = 50.0


@dataclass(frozen=True)
class DpcChannelParams:
    alpha: float
    beta: float
    sigma: float

    def __post_init__(self):
        if self.alpha <= 0 or self.sigma <= 0 or self.beta < 0:
            raise ValueError(f"invalid channel parameters {self}")

    @classmethod
    def from_db(cls, snr_db: float, sir_db: float, alpha: float = 1.0) -> "DpcChannelParams":
        """SNR = 10·log10(α²/σ²), interference strength = 10·log10(β²/α²)."""
        sigma = alpha * 10.0 ** (-snr_db / 20.0)
        beta = alpha * 10.0 ** (sir_db / 20.0)
        return cls(alpha, beta, sigma)

    @property
    def snr_db(self) -> float:
        return 10.0 * np.log10(self.alpha**2 / self.sigma**2)

    @property
    def sir_db(self) -> float:
        return 10.0 * np.log10(self.beta**2 / self.alpha**2) if self.beta > 0 else -np.inf


@dataclass(frozen=True)
class ConditionalPbz:
    """Symmetric P_{B|Z}: q = P(B=0 | z=-1) = P(B=1 | z=+1)."""

    q: float

    def __post_init__(self):
        if not 0.0 < self.q < 1.0:
            raise ValueError(f"q must lie in (0, 1), got {self.q}")

    def matrix(self) -> np.ndarray:
        """Rows b = 0, 1; columns z = -1, +1."""
        q = self.q
        return np.array([[q, 1 - q], [1 - q, q]])


def bpsk_map(b):
    """x_0 = -1, x_1 = +1."""
    return 2.0 * np.asarray(b, dtype=np.float64) - 1.0


def transmit(b, z, params: DpcChannelParams, noise) -> np.ndarray:
    """Channel output for bits ``b`` and interferer ``z``.

    ``noise`` is either an integer seed or a ``numpy.random.Generator``.
    """
    z = np.asarray(z, dtype=np.float64)
    x = bpsk_map(b)
    if x.shape != z.shape:
        raise ValueError(f"shape mismatch: bits {x.shape}, interferer {z.shape}")
    rng = noise if isinstance(noise, np.random.Generator) else np.random.default_rng(noise)
    return params.alpha * x + params.beta * z + params.sigma * rng.standard_normal(x.shape)


def _log_mixture(y, means, weights, sigma):
    """log Σ_i w_i·exp(-(y-μ_i)²/2σ²), common normalization dropped."""
    terms = [np.log(w) - (y - mu) ** 2 / (2 * sigma**2) for mu, w in zip(means, weights) if w > 0]
    return np.logaddexp.reduce(np.stack(terms), axis=0)


def llr_int_as_noise(y, params: DpcChannelParams, clip: float | None = LLR_CLIP):
    """log p(y|0)/p(y|1) with the interferer treated as equiprobable noise."""
    y = np.asarray(y, dtype=np.float64)
    a, b, s = params.alpha, params.beta, params.sigma
    l0 = _log_mixture(y, (-a - b, -a + b), (0.5, 0.5), s)
    l1 = _log_mixture(y, (a - b, a + b), (0.5, 0.5), s)
    llr = l0 - l1
    return np.clip(llr, -clip, clip) if clip else llr


def llr_dpc(y, params: DpcChannelParams, pbz: ConditionalPbz | float, clip: float | None = LLR_CLIP):
    """DPC demapper: mixtures weighted by P_{B|Z}; the uniform prior P_B cancels."""
    q = pbz.q if isinstance(pbz, ConditionalPbz) else float(pbz)
    y = np.asarray(y, dtype=np.float64)
    a, b, s = params.alpha, params.beta, params.sigma
    # b=0: z=-1 with weight q (mean -a-b), z=+1 with weight 1-q (mean -a+b)
    l0 = _log_mixture(y, (-a - b, -a + b), (q, 1 - q), s)
    l1 = _log_mixture(y, (a - b, a + b), (1 - q, q), s)
    llr = l0 - l1
    return np.clip(llr, -clip, clip) if clip else llr
