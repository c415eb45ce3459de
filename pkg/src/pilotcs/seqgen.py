"""
Deterministic periodic sequence families.

Frank-Zadoff-Chu (FZC) polyphase sequences with the number-theoretic
family construction, LFSR m-sequences, Gold and small-set Kasami families.
Every sequence is scaled to unit energy, i.e. entries of binary sequences
are +-1/sqrt(M) and FZC entries have modulus 1/sqrt(M).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

from pilotcs.correlation import correlation_profile
from pilotcs.errors import NoInverseError, NonPrimitivePolynomialError, NoPreferredPairError

ENERGY_TOL = 1e-12

# Connection polynomials 1 + sum(x^t), listed by tap exponents. Each one is
# primitive over GF(2), so a nonzero seed runs through all 2^s - 1 states.
PRIMITIVE_TAPS = {
    3: (3, 1),
    4: (4, 1),
    5: (5, 2),
    6: (6, 1),
    7: (7, 1),
    8: (8, 4, 3, 2),
    9: (9, 4),
    10: (10, 3),
}

# Preferred pairs for Gold families (three-valued crosscorrelation).
GOLD_PREFERRED_PAIRS = {
    5: ((5, 2), (5, 4, 3, 2)),
    7: ((7, 3), (7, 3, 2, 1)),
    9: ((9, 4), (9, 6, 4, 3)),
}


class FamilyKind(str, enum.Enum):
    FZC = "FZC"
    GOLD = "Gold"
    KASAMI = "Kasami"
    MSEQUENCE = "MSequence"
    CUSTOM = "Custom"


@dataclass(frozen=True, eq=False)
class PeriodicSequence:
    """One period of a unit-energy complex sequence."""

    values: np.ndarray

    def __post_init__(self):
        v = np.array(self.values, dtype=np.complex128).ravel()
        if v.size == 0:
            raise ValueError("sequence must be nonempty")
        energy = float(np.vdot(v, v).real)
        if abs(energy - 1.0) > ENERGY_TOL:
            raise ValueError(f"sequence energy must be 1, got {energy!r}")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @classmethod
    def normalized(cls, values) -> "PeriodicSequence":
        """Build a sequence from arbitrary nonzero values, rescaled to unit energy."""
        v = np.asarray(values, dtype=np.complex128).ravel()
        norm = np.linalg.norm(v)
        if norm == 0:
            raise ValueError("cannot normalize an all-zero sequence")
        return cls(v / norm)

    @property
    def period(self) -> int:
        return self.values.size

    def __len__(self) -> int:
        return self.values.size

    def shifted(self, m: int) -> "PeriodicSequence":
        """Left cyclic shift by m positions: result(k) = self((k + m) mod M)."""
        return PeriodicSequence(np.roll(self.values, -m))


@dataclass(frozen=True, eq=False)
class SequenceFamily:
    """A set of equal-period sequences together with its correlation profile.

    ``theta_c`` is None for single-member families (no distinct pairs).
    """

    sequences: tuple
    family_kind: FamilyKind
    theta_a: float
    theta_c: Optional[float]

    @classmethod
    def build(cls, sequences: Iterable[PeriodicSequence], kind=FamilyKind.CUSTOM) -> "SequenceFamily":
        seqs = tuple(sequences)
        if not seqs:
            raise ValueError("family must be nonempty")
        periods = {s.period for s in seqs}
        if len(periods) != 1:
            raise ValueError(f"family members have differing periods {sorted(periods)}")
        prof = correlation_profile(seqs)
        return cls(seqs, FamilyKind(kind), prof.theta_a, prof.theta_c)

    @property
    def period(self) -> int:
        return self.sequences[0].period

    def __len__(self) -> int:
        return len(self.sequences)

    def __getitem__(self, i) -> PeriodicSequence:
        return self.sequences[i]

    def __iter__(self):
        return iter(self.sequences)

    def subset(self, indices: Sequence[int]) -> "SequenceFamily":
        """Family restricted to the given member positions (0-based), in that order."""
        idx = list(indices)
        if len(set(idx)) != len(idx):
            raise ValueError("subset indices must be distinct")
        for i in idx:
            if not 0 <= i < len(self.sequences):
                raise IndexError(f"member index {i} out of range for family of size {len(self)}")
        return SequenceFamily.build([self.sequences[i] for i in idx], self.family_kind)


@dataclass(frozen=True)
class LfsrSpec:
    """Fibonacci LFSR: bit(n) = XOR of bit(n - t) over taps t.

    The connection polynomial is 1 + sum(x^t); ``seed_state`` gives the
    first ``degree`` output bits.
    """

    taps: frozenset
    degree: int
    seed_state: tuple = field(default=())

    def __post_init__(self):
        taps = frozenset(int(t) for t in self.taps)
        if not taps or min(taps) < 1:
            raise ValueError("taps must be positive integers")
        if self.degree != max(taps):
            raise ValueError(f"degree {self.degree} must equal the largest tap {max(taps)}")
        seed = tuple(int(b) for b in self.seed_state) or (1,) * self.degree
        if len(seed) != self.degree or any(b not in (0, 1) for b in seed):
            raise ValueError(f"seed_state must be {self.degree} bits")
        if not any(seed):
            raise ValueError("seed_state must not be all zero")
        object.__setattr__(self, "taps", taps)
        object.__setattr__(self, "seed_state", seed)

    @classmethod
    def from_taps(cls, taps: Iterable[int], seed_state: Sequence[int] = ()) -> "LfsrSpec":
        taps = frozenset(taps)
        return cls(taps, max(taps), tuple(seed_state))

    @classmethod
    def primitive(cls, degree: int, seed_state: Sequence[int] = ()) -> "LfsrSpec":
        """Spec using the built-in primitive polynomial of the given degree."""
        if degree not in PRIMITIVE_TAPS:
            raise ValueError(f"no built-in primitive polynomial for degree {degree}; "
                             f"available: {sorted(PRIMITIVE_TAPS)}")
        return cls.from_taps(PRIMITIVE_TAPS[degree], seed_state)


# ---------------------------------------------------------------------------
# number theory
# ---------------------------------------------------------------------------

def smallest_prime_divisor(M: int) -> int:
    """Least prime dividing M (M >= 2), by trial division."""
    M = int(M)
    if M < 2:
        raise ValueError(f"M must be >= 2, got {M}")
    if M % 2 == 0:
        return 2
    for d in range(3, math.isqrt(M) + 1, 2):
        if M % d == 0:
            return d
    return M


def mod_inverse(i: int, M: int) -> int:
    """Return u in [1, M-1] with i*u = 1 (mod M)."""
    if math.gcd(i, M) != 1:
        raise NoInverseError(f"{i} has no inverse modulo {M}")
    return pow(int(i), -1, int(M))


# ---------------------------------------------------------------------------
# FZC
# ---------------------------------------------------------------------------

def fzc_sequence(u: int, M: int) -> PeriodicSequence:
    """FZC sequence with root u and period M.

    a_u(k) = exp(j*pi*u*k^2/M)/sqrt(M) for even M and
    exp(j*pi*u*k*(k+1)/M)/sqrt(M) for odd M, k = 0..M-1.
    """
    if M < 1:
        raise ValueError(f"M must be positive, got {M}")
    if not 1 <= u <= M - 1:
        raise ValueError(f"root u must lie in [1, {M - 1}], got {u}")
    k = np.arange(M, dtype=np.int64)
    # Reduce the phase numerator mod 2M in integers to keep the angle exact.
    num = u * k * k if M % 2 == 0 else u * k * (k + 1)
    num %= 2 * M
    return PeriodicSequence(np.exp(1j * np.pi * num / M) / np.sqrt(M))


def fzc_family(M: int) -> SequenceFamily:
    """FZC family {a_{u_i}: u_i = i^{-1} mod M, i = 1..p-1} for odd M.

    p is the smallest prime divisor of M. The family has ideal
    autocorrelation and crosscorrelation magnitude exactly 1/sqrt(M).
    """
    if M < 3:
        raise ValueError(f"M must be >= 3, got {M}")
    if M % 2 == 0:
        raise ValueError(f"FZC family construction requires odd M, got {M}")
    p = smallest_prime_divisor(M)
    roots = [mod_inverse(i, M) for i in range(1, p)]
    return SequenceFamily.build([fzc_sequence(u, M) for u in roots], FamilyKind.FZC)


# ---------------------------------------------------------------------------
# binary sequences
# ---------------------------------------------------------------------------

def lfsr_bits(spec: LfsrSpec) -> np.ndarray:
    """One period (2^s - 1 bits) of the LFSR output.

    Raises NonPrimitivePolynomialError if the state cycle is shorter.
    """
    s = spec.degree
    M = 2 ** s - 1
    bits = np.zeros(M + s, dtype=np.uint8)
    bits[:s] = spec.seed_state
    taps = sorted(spec.taps)
    for n in range(s, M + s):
        b = 0
        for t in taps:
            b ^= bits[n - t]
        bits[n] = b
        # state = bits[n-s+1 .. n]; returning to the seed early means a short cycle
        if n < M + s - 1 and np.array_equal(bits[n - s + 1:n + 1], bits[:s]):
            raise NonPrimitivePolynomialError(
                f"taps {taps} give period {n - s + 1} < {M}; polynomial is not primitive")
    if not np.array_equal(bits[M:M + s], bits[:s]):
        raise NonPrimitivePolynomialError(f"taps {taps} do not give period {M}")
    return bits[:M].copy()


def _binary_to_sequence(bits: np.ndarray) -> PeriodicSequence:
    M = bits.size
    return PeriodicSequence((1.0 - 2.0 * bits.astype(np.float64)) / np.sqrt(M))


def m_sequence(spec: LfsrSpec) -> PeriodicSequence:
    """Maximal-length sequence of period 2^s - 1, bit 0 -> +1/sqrt(M), bit 1 -> -1/sqrt(M)."""
    return _binary_to_sequence(lfsr_bits(spec))


def _decimate(bits: np.ndarray, d: int) -> np.ndarray:
    M = bits.size
    return bits[(d * np.arange(M)) % M]


def _gold_bits(s: int, pair: Optional[Sequence[LfsrSpec]]):
    if pair is not None:
        a, b = pair
        if a.degree != s or b.degree != s:
            raise ValueError(f"preferred pair degrees {a.degree}, {b.degree} do not match s={s}")
        return lfsr_bits(a), lfsr_bits(b)
    if s in GOLD_PREFERRED_PAIRS:
        ta, tb = GOLD_PREFERRED_PAIRS[s]
        return lfsr_bits(LfsrSpec.from_taps(ta)), lfsr_bits(LfsrSpec.from_taps(tb))
    # Decimation by 2^e + 1 with s/gcd(s, e) odd yields a preferred pair.
    u = lfsr_bits(LfsrSpec.primitive(s))
    e = 1 if s % 2 else 2
    return u, _decimate(u, 2 ** e + 1)


def gold_family(s: int, pair: Optional[Sequence[LfsrSpec]] = None) -> SequenceFamily:
    """Gold family of size M + 2, M = 2^s - 1.

    Members are the two m-sequences u, v of a preferred pair followed by
    u XOR (v shifted left by j) for j = 0..M-1. Without an explicit ``pair``
    the built-in table is used (s = 5, 7, 9), otherwise a decimation of the
    built-in primitive m-sequence.
    """
    if s % 4 == 0:
        raise NoPreferredPairError(f"no preferred pair of m-sequences exists for s={s} (s divisible by 4)")
    if s < 3:
        raise ValueError(f"s must be >= 3, got {s}")
    u, v = _gold_bits(s, pair)
    members = [u, v] + [u ^ np.roll(v, -j) for j in range(u.size)]
    return SequenceFamily.build([_binary_to_sequence(b) for b in members], FamilyKind.GOLD)


def kasami_family(s: int) -> SequenceFamily:
    """Small-set Kasami family of size 2^(s/2), M = 2^s - 1.

    The base m-sequence u is followed by u XOR (w shifted left by j),
    j = 0..2^(s/2) - 2, where w is u decimated by 2^(s/2) + 1.
    """
    if s % 2 or s < 4:
        raise ValueError(f"small-set Kasami needs even s >= 4, got {s}")
    u = lfsr_bits(LfsrSpec.primitive(s))
    half = 2 ** (s // 2)
    w = _decimate(u, half + 1)
    members = [u] + [u ^ np.roll(w, -j) for j in range(half - 1)]
    return SequenceFamily.build([_binary_to_sequence(b) for b in members], FamilyKind.KASAMI)


def msequence_family(s: int) -> SequenceFamily:
    """Two m-sequences of degree s: the built-in polynomial and its reciprocal."""
    spec = LfsrSpec.primitive(s)
    recip = LfsrSpec.from_taps([s] + [s - t for t in spec.taps if t != s])
    return SequenceFamily.build([m_sequence(spec), m_sequence(recip)], FamilyKind.MSEQUENCE)


def gold_max_correlation(s: int) -> int:
    """Largest integer crosscorrelation magnitude of a Gold family, 2^floor((s+2)/2) + 1."""
    return 2 ** ((s + 2) // 2) + 1


def kasami_max_correlation(s: int) -> int:
    """Largest integer correlation magnitude of a small Kasami family, 2^(s/2) + 1."""
    return 2 ** (s // 2) + 1
