"""
Periodic correlation functions, family correlation profiles and the
Welch / Sarwate bounds.

Correlation convention throughout:

    theta(a, b)(l) = sum_k a(k) * conj(b((k + l) mod M))
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import TYPE_CHECKING, Optional

import numpy as np

if TYPE_CHECKING:
    from pilotcs.seqgen import PeriodicSequence


@dataclass(frozen=True)
class CorrelationProfile:
    theta_a: float
    theta_c: Optional[float]
    family_size: int
    period: int


def _values(seq) -> np.ndarray:
    return np.asarray(getattr(seq, "values", seq), dtype=np.complex128)


def periodic_crosscorr(a: "PeriodicSequence", b: "PeriodicSequence", lag: int) -> complex:
    """Periodic crosscorrelation of a and b at a single lag (any integer)."""
    av, bv = _values(a), _values(b)
    if av.size != bv.size:
        raise ValueError(f"period mismatch: {av.size} != {bv.size}")
    M = av.size
    idx = (np.arange(M) + lag) % M
    return complex(np.sum(av * np.conj(bv[idx])))


def crosscorr_all_lags(a, b) -> np.ndarray:
    """theta(a, b)(l) for l = 0..M-1 via the FFT.

    theta(a, b) is the conjugate of the circular crosscorrelation
    ifft(conj(A) * B), where A, B are the DFTs of a, b.
    """
    av, bv = _values(a), _values(b)
    if av.size != bv.size:
        raise ValueError(f"period mismatch: {av.size} != {bv.size}")
    return np.conj(np.fft.ifft(np.conj(np.fft.fft(av)) * np.fft.fft(bv)))


def crosscorr_naive(a, b) -> np.ndarray:
    """O(M^2) reference for :func:`crosscorr_all_lags`."""
    av, bv = _values(a), _values(b)
    M = av.size
    out = np.empty(M, dtype=np.complex128)
    for lag in range(M):
        acc = 0j
        for k in range(M):
            acc += av[k] * np.conj(bv[(k + lag) % M])
        out[lag] = acc
    return out


def _profile_from_values(vals: np.ndarray) -> tuple:
    """Max out-of-phase autocorrelation and max crosscorrelation of the rows of vals."""
    spectra = np.fft.fft(vals, axis=1)
    T = vals.shape[0]
    auto = np.abs(np.fft.ifft(np.abs(spectra) ** 2, axis=1))
    theta_a = float(auto[:, 1:].max()) if vals.shape[1] > 1 else 0.0
    theta_c = None
    for u in range(T - 1):
        # all v > u at once; |theta(a,b)| = |theta(b,a)| at the mirrored lag, so pairs u<v suffice
        cross = np.abs(np.fft.ifft(np.conj(spectra[u]) * spectra[u + 1:], axis=1)).max()
        theta_c = float(cross) if theta_c is None else max(theta_c, float(cross))
    return theta_a, theta_c


def correlation_profile(family) -> CorrelationProfile:
    """theta_a and theta_c of a family (or any sequence of PeriodicSequence).

    theta_a scans lags 1..M-1 of every autocorrelation, theta_c scans lags
    0..M-1 of every distinct pair. theta_c is None for a single member.
    """
    seqs = list(getattr(family, "sequences", family))
    if not seqs:
        raise ValueError("family must be nonempty")
    vals = np.stack([_values(s) for s in seqs])
    theta_a, theta_c = _profile_from_values(vals)
    return CorrelationProfile(theta_a, theta_c, len(seqs), vals.shape[1])


def correlation_profile_naive(family) -> CorrelationProfile:
    """Double-loop reference for :func:`correlation_profile`."""
    seqs = list(getattr(family, "sequences", family))
    M = _values(seqs[0]).size
    theta_a, theta_c = 0.0, None
    for u, a in enumerate(seqs):
        for v, b in enumerate(seqs):
            c = np.abs(crosscorr_naive(a, b))
            if u == v:
                if M > 1:
                    theta_a = max(theta_a, float(c[1:].max()))
            else:
                theta_c = float(c.max()) if theta_c is None else max(theta_c, float(c.max()))
    return CorrelationProfile(theta_a, theta_c, len(seqs), M)


def sarwate_lhs(profile) -> float:
    """Left-hand side of Sarwate's bound; any family satisfies lhs >= 1/M^2.

    lhs = theta_c^2/M + (M-1)/(M(T-1)) * theta_a^2/M
    """
    T, M = profile.family_size, profile.period
    if T < 2:
        raise ValueError(f"Sarwate bound needs at least two sequences, got T={T}")
    theta_c = profile.theta_c or 0.0
    return theta_c ** 2 / M + (M - 1) / (M * (T - 1)) * (profile.theta_a ** 2 / M)


def welch_bound(M: int, N: int) -> float:
    """Welch lower bound sqrt((N-M)/(M(N-1))) on the coherence of an M x N unit-column matrix."""
    if M < 1 or N < 2:
        raise ValueError(f"need M >= 1 and N >= 2, got M={M}, N={N}")
    if N < M:
        raise ValueError(f"need N >= M, got M={M}, N={N}")
    return math.sqrt((N - M) / (M * (N - 1)))
