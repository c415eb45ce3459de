"""
Cyclic-shift pilot assignment.

Transmitters are grouped M/L at a time onto one base sequence; within a
group, transmitter i receives the base left-shifted by a multiple of L.
The emitted pilot is the re-indexed shifted base whose partial circulant
(the folded convolution matrix) equals an L-column slab of the base's
circulant, so the stacked measurement matrix becomes
[A(b_1) A(b_2) ... A(b_q)] with A(b) the circulant with first row b.

Transmitter and base numbers are 1-based labels; sequence positions are 0-based.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from pilotcs.errors import ConfigurationError, InsufficientFamilyError
from pilotcs.seqgen import PeriodicSequence, SequenceFamily


@dataclass(frozen=True, eq=False)
class PilotAssignment:
    transmitter_index: int
    base_index: int
    shift: int
    pilot: PeriodicSequence


@dataclass(frozen=True, eq=False)
class PilotPlan:
    assignments: tuple
    M: int
    L: int
    t: int
    q: int
    base_family: SequenceFamily

    @property
    def N(self) -> int:
        return self.t * self.L

    @property
    def pilots(self) -> list:
        return [a.pilot for a in self.assignments]

    def manifest_lines(self) -> list:
        """One ``index, base, shift`` line per transmitter."""
        return [f"{a.transmitter_index}, {a.base_index}, {a.shift}" for a in self.assignments]


def _check_dims(M: int, L: int) -> None:
    if L < 1 or M < 1:
        raise ConfigurationError(f"M and L must be positive, got M={M}, L={L}")
    if M % L:
        raise ConfigurationError(f"M mod L must be 0, got M={M}, L={L}")


def shift_index(i: int, M: int, L: int) -> tuple:
    """(base_index, shift) for transmitter i (1-based).

    base = ceil(i*L/M), shift = ((i-1) mod (M/L)) * L.
    """
    _check_dims(M, L)
    if i < 1:
        raise ValueError(f"transmitter index must be >= 1, got {i}")
    base = -(-i * L // M)
    shift = ((i - 1) % (M // L)) * L
    return base, shift


def pilot_from_base(b: PeriodicSequence, L: int) -> PeriodicSequence:
    """Pilot phi with phi(j) = b((L - 1 - j) mod M), j = 0..M-1.

    This is the unique pilot whose folded convolution matrix equals the
    first L columns of the circulant with first row b.
    """
    M = b.period
    if not 1 <= L <= M:
        raise ValueError(f"L must lie in [1, {M}], got {L}")
    return PeriodicSequence(b.values[(L - 1 - np.arange(M)) % M])


def base_from_pilot(phi: PeriodicSequence, L: int) -> PeriodicSequence:
    """Inverse of :func:`pilot_from_base`."""
    M = phi.period
    if not 1 <= L <= M:
        raise ValueError(f"L must lie in [1, {M}], got {L}")
    return PeriodicSequence(phi.values[(L - 1 - np.arange(M)) % M])


def assign_pilots(family: SequenceFamily, t: int, M: int, L: int,
                  base_indices: Optional[Sequence[int]] = None) -> PilotPlan:
    """Assign a cyclically shifted base sequence to each of t transmitters.

    Parameters
    ----------
    family : SequenceFamily
        Source set; members must have period M.
    t, M, L : int
        Transmitter count, pilot length and channel length. Requires
        M mod L == 0 and t*L mod M == 0; q = t*L/M bases are used.
    base_indices : sequence of int, optional
        0-based family positions forming the base subset. Defaults to the
        first q members.
    """
    _check_dims(M, L)
    if t < 1:
        raise ConfigurationError(f"t must be positive, got {t}")
    if (t * L) % M:
        raise ConfigurationError(f"t*L mod M must be 0, got t*L={t * L}, M={M}")
    if family.period != M:
        raise ConfigurationError(f"family period {family.period} != M={M}")
    q = t * L // M
    if base_indices is None:
        if q > len(family):
            raise InsufficientFamilyError(f"plan needs q={q} base sequences, family has {len(family)}")
        base_indices = range(q)
    base_indices = list(base_indices)
    if len(base_indices) != q:
        raise ConfigurationError(f"expected {q} base indices, got {len(base_indices)}")
    bases = family.subset(base_indices)

    assignments = []
    for i in range(1, t + 1):
        beta, alpha = shift_index(i, M, L)
        pilot = pilot_from_base(bases[beta - 1].shifted(alpha), L)
        assignments.append(PilotAssignment(i, beta, alpha, pilot))
    return PilotPlan(tuple(assignments), M, L, t, q, bases)
