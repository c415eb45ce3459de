"""
Measurement model and the concatenated-circulant operator.

The per-transmitter observation is the linear convolution of pilot and
channel; folding its first L-1 samples onto its last L-1 samples gives the
circular model y_i = Phi_i h_i. Stacking all transmitters gives
y = Phi h with Phi = [A(b_1) ... A(b_q)], where A(b) is the M x M circulant
with first row b, i.e. A(b)[r, c] = b[(c - r) mod M].
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields
from typing import Optional, Sequence

import numpy as np

from pilotcs.correlation import _profile_from_values, welch_bound
from pilotcs.errors import MatrixTooLargeError

DENSE_LIMIT = 2 ** 22


def _as_array(x) -> np.ndarray:
    return np.asarray(getattr(x, "values", x), dtype=np.complex128)


def linear_convolve(pilot, h) -> np.ndarray:
    """Linear convolution of a length-M pilot with a length-L channel (length M+L-1)."""
    p = _as_array(pilot).ravel()
    h = np.asarray(h, dtype=np.complex128).ravel()
    if h.size > p.size:
        raise ValueError(f"channel length {h.size} exceeds pilot length {p.size}")
    return np.convolve(p, h)


def fold_to_circular(y0, M: int, L: int) -> np.ndarray:
    """Add the first L-1 samples of y0 onto the last L-1 and keep the last M."""
    y0 = np.asarray(y0, dtype=np.complex128).ravel()
    if y0.size != M + L - 1:
        raise ValueError(f"expected length M+L-1={M + L - 1}, got {y0.size}")
    z = y0.copy()
    z[M:] += z[:L - 1]
    return z[L - 1:]


def partial_circulant(pilot, L: int) -> np.ndarray:
    """Dense M x L folded-convolution matrix of a pilot: Phi[r, c] = phi[(L-1+r-c) mod M]."""
    p = _as_array(pilot).ravel()
    M = p.size
    r = np.arange(M)[:, None]
    c = np.arange(L)[None, :]
    return p[(L - 1 + r - c) % M]


def circulant(b) -> np.ndarray:
    """Dense circulant with first row b."""
    b = _as_array(b).ravel()
    M = b.size
    r = np.arange(M)[:, None]
    c = np.arange(M)[None, :]
    return b[(c - r) % M]


class MeasurementOperator:
    """Concatenation of q circulant blocks, applied through the FFT.

    Parameters
    ----------
    base_sequences : sequence of PeriodicSequence or array-like
        First rows of the circulant blocks; all of period M.
    dense_limit : int
        Largest M*N for which :meth:`materialize` will build a dense matrix.
    """

    def __init__(self, base_sequences: Sequence, dense_limit: int = DENSE_LIMIT):
        bases = np.stack([_as_array(b).ravel() for b in base_sequences])
        if bases.ndim != 2 or bases.shape[0] == 0:
            raise ValueError("need at least one base sequence")
        bases.setflags(write=False)
        self._bases = bases
        self.q, self.M = bases.shape
        self.N = self.q * self.M
        self.dense_limit = dense_limit
        # A(b) has first column g[r] = b[-r mod M]; A(b) x = ifft(fft(g) * fft(x)).
        first_cols = bases[:, (-np.arange(self.M)) % self.M]
        self._spectra = np.fft.fft(first_cols, axis=1)
        self._spectra.setflags(write=False)
        self._norm_sq = None

    @classmethod
    def from_plan(cls, plan, **kwargs) -> "MeasurementOperator":
        return cls(plan.base_family.sequences, **kwargs)

    @property
    def base_values(self) -> np.ndarray:
        return self._bases

    @property
    def shape(self) -> tuple:
        return (self.M, self.N)

    def forward(self, h) -> np.ndarray:
        h = np.asarray(h, dtype=np.complex128)
        if h.shape != (self.N,):
            raise ValueError(f"expected vector of length N={self.N}, got shape {h.shape}")
        H = np.fft.fft(h.reshape(self.q, self.M), axis=1)
        return np.fft.ifft(np.sum(self._spectra * H, axis=0))

    def adjoint(self, y) -> np.ndarray:
        y = np.asarray(y, dtype=np.complex128)
        if y.shape != (self.M,):
            raise ValueError(f"expected vector of length M={self.M}, got shape {y.shape}")
        Y = np.fft.fft(y)
        return np.fft.ifft(np.conj(self._spectra) * Y, axis=1).ravel()

    def columns(self, indices) -> np.ndarray:
        """Dense M x len(indices) matrix of the selected columns (0-based)."""
        idx = np.asarray(indices, dtype=np.int64).ravel()
        if idx.size and (idx.min() < 0 or idx.max() >= self.N):
            raise IndexError(f"column index out of range [0, {self.N})")
        u, c = np.divmod(idx, self.M)
        r = np.arange(self.M)[:, None]
        return self._bases[u[None, :], (c[None, :] - r) % self.M]

    def materialize(self) -> np.ndarray:
        """Dense M x N matrix [A(b_1) ... A(b_q)]."""
        if self.M * self.N > self.dense_limit:
            raise MatrixTooLargeError(
                f"dense operator would hold {self.M * self.N} entries ({self.M}x{self.N}), "
                f"limit is {self.dense_limit}")
        return np.hstack([circulant(b) for b in self._bases])

    def coherence(self) -> float:
        """Largest |<column i, column j>| over distinct columns.

        Columns of one block are cyclic shifts of its base, so the inner
        products are exactly the periodic auto/crosscorrelations of the bases.
        """
        theta_a, theta_c = _profile_from_values(self._bases)
        return max(theta_a, theta_c or 0.0)

    def spectral_norm_sq(self) -> float:
        """Largest eigenvalue of Phi Phi^H = max_k sum_u |B_u(k)|^2."""
        if self._norm_sq is None:
            self._norm_sq = float(np.max(np.sum(np.abs(self._spectra) ** 2, axis=0)))
        return self._norm_sq

    def column_norms(self) -> np.ndarray:
        """Norm of each column (equal within a block)."""
        return np.repeat(np.linalg.norm(self._bases, axis=1), self.M)


def guarantee_margin(mu: float, spectral_norm_sq: float, K: int, N: int, c0: float = 1.0,
                     log=math.log) -> float:
    """sqrt(mu^2 K c0 log N) + (K/N) ||Phi||^2, natural log unless ``log`` is given."""
    if K < 0:
        raise ValueError(f"K must be nonnegative, got {K}")
    if N < 2:
        raise ValueError(f"N must be >= 2, got {N}")
    if c0 < 1:
        raise ValueError(f"c0 must be >= 1, got {c0}")
    return math.sqrt(mu ** 2 * K * c0 * log(N)) + K / N * spectral_norm_sq


@dataclass(frozen=True)
class AnalysisReport:
    coherence: float
    welch: float
    spectral_norm_sq: float
    spectral_lower: float
    spectral_upper: float
    theta_a: float
    theta_c: Optional[float]
    guarantee_margin: float

    def violations(self, slack: float = 1e-10) -> list:
        """Names of the coherence/spectral-norm sandwich inequalities that fail."""
        out = []
        corr_max = max(self.theta_a, self.theta_c or 0.0)
        if self.coherence < self.welch - slack:
            out.append("coherence >= welch")
        if self.coherence > corr_max + slack:
            out.append("coherence <= max(theta_a, theta_c)")
        if self.spectral_norm_sq < self.spectral_lower - slack:
            out.append("spectral_norm_sq >= N/M")
        if self.spectral_norm_sq > self.spectral_upper + slack:
            out.append("spectral_norm_sq <= (N/M)(1+theta_a(M-1))")
        return out

    def rows(self) -> list:
        return [(f.name, getattr(self, f.name)) for f in fields(self)]

    def format_text(self) -> str:
        width = max(len(f.name) for f in fields(self))
        lines = []
        for name, value in self.rows():
            shown = "n/a" if value is None else f"{value:.12g}"
            lines.append(f"{name:<{width}}  {shown}")
        return "\n".join(lines)

    def csv(self) -> str:
        names = [f.name for f in fields(self)]
        vals = ["" if getattr(self, n) is None else repr(float(getattr(self, n))) for n in names]
        return ",".join(names) + "\n" + ",".join(vals) + "\n"


def analyze_operator(op: MeasurementOperator, K: int = 0, c0: float = 1.0,
                     theta_a: Optional[float] = None, theta_c: Optional[float] = None,
                     log=math.log) -> AnalysisReport:
    """Coherence and spectral-norm report with the bounds they must satisfy.

    theta_a / theta_c default to the correlation profile of the operator's
    base sequences.
    """
    if theta_a is None:
        theta_a, theta_c = _profile_from_values(op.base_values)
    mu = op.coherence()
    norm_sq = op.spectral_norm_sq()
    ratio = op.N / op.M
    return AnalysisReport(
        coherence=mu,
        welch=welch_bound(op.M, op.N) if op.N >= 2 else 0.0,
        spectral_norm_sq=norm_sq,
        spectral_lower=ratio,
        spectral_upper=ratio * (1 + theta_a * (op.M - 1)),
        theta_a=theta_a,
        theta_c=theta_c,
        guarantee_margin=guarantee_margin(mu, norm_sq, K, op.N, c0, log) if op.N >= 2 else 0.0,
    )
