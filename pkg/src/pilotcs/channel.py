"""Generic K-sparse combined channels and receiver AWGN."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

MAGNITUDE_MODELS = ("unit", "rayleigh")


@dataclass(frozen=True, eq=False)
class SparseChannel:
    """Combined channel of length N stored as (support, coefficients).

    ``support`` holds 0-based indices in increasing order.
    """

    length: int
    support: np.ndarray
    coefficients: np.ndarray

    def __post_init__(self):
        support = np.asarray(self.support, dtype=np.int64).ravel()
        coefs = np.asarray(self.coefficients, dtype=np.complex128).ravel()
        if support.size != coefs.size:
            raise ValueError("support and coefficients differ in length")
        if support.size and (support.min() < 0 or support.max() >= self.length):
            raise ValueError(f"support index out of range [0, {self.length})")
        if np.unique(support).size != support.size:
            raise ValueError("support indices must be distinct")
        order = np.argsort(support)
        object.__setattr__(self, "support", support[order])
        object.__setattr__(self, "coefficients", coefs[order])

    @property
    def K(self) -> int:
        return int(self.support.size)

    def dense(self) -> np.ndarray:
        h = np.zeros(self.length, dtype=np.complex128)
        h[self.support] = self.coefficients
        return h

    @classmethod
    def from_dense(cls, h, tol: float = 0.0) -> "SparseChannel":
        h = np.asarray(h, dtype=np.complex128).ravel()
        idx = np.flatnonzero(np.abs(h) > tol)
        return cls(h.size, idx, h[idx])


@dataclass(frozen=True)
class NoiseSpec:
    snr_db: float
    realized_sigma_sq: float = 0.0


def generate_sparse_channel(N: int, K: int, magnitude_model: str = "unit", rng_seed=None,
                            candidates=None) -> SparseChannel:
    """Draw a generic K-sparse channel.

    The support is uniform without replacement over ``candidates`` (default
    all N positions) and phases are i.i.d. uniform on [0, 2*pi). Magnitudes
    are 1 for the "unit" model or Rayleigh with unit mean power.
    ``rng_seed`` is anything :func:`numpy.random.default_rng` accepts.
    """
    if magnitude_model not in MAGNITUDE_MODELS:
        raise ValueError(f"unknown magnitude model {magnitude_model!r}; use one of {MAGNITUDE_MODELS}")
    pool = np.arange(N) if candidates is None else np.asarray(candidates, dtype=np.int64)
    if not 0 <= K <= pool.size:
        raise ValueError(f"need 0 <= K <= {pool.size}, got K={K}")
    rng = np.random.default_rng(rng_seed)
    support = rng.choice(pool, size=K, replace=False)
    phases = rng.uniform(0.0, 2 * np.pi, size=K)
    if magnitude_model == "unit":
        mags = np.ones(K)
    else:
        mags = np.sqrt(rng.exponential(1.0, size=K))
    return SparseChannel(N, support, mags * np.exp(1j * phases))


def noise_variance(y, snr_db: float) -> float:
    """Per-sample complex noise variance (|y|^2 / M) * 10^(-snr/10)."""
    y = np.asarray(y)
    return float(np.vdot(y, y).real / y.size * 10.0 ** (-snr_db / 10.0))


def add_awgn(y, snr_db: float, rng_seed=None) -> tuple:
    """Add circular complex Gaussian noise at the requested measurement SNR.

    snr_db = inf returns y unchanged with zero variance.
    """
    y = np.asarray(y, dtype=np.complex128)
    if math.isinf(snr_db) and snr_db > 0:
        return y.copy(), NoiseSpec(snr_db, 0.0)
    if not np.any(y):
        raise ValueError("cannot set a finite SNR on an all-zero signal")
    sigma_sq = noise_variance(y, snr_db)
    rng = np.random.default_rng(rng_seed)
    w = rng.standard_normal(y.shape) + 1j * rng.standard_normal(y.shape)
    w *= math.sqrt(sigma_sq / 2)
    return y + w, NoiseSpec(snr_db, sigma_sq)
