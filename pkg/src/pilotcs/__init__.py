"""Deterministic pilot design for compressive multi-transmitter channel estimation."""

from pilotcs.errors import (
    ConfigurationError,
    InsufficientFamilyError,
    MatrixTooLargeError,
    NoInverseError,
    NonPrimitivePolynomialError,
    NoPreferredPairError,
    OverdeterminedSupportError,
)
from pilotcs.seqgen import (
    FamilyKind,
    LfsrSpec,
    PeriodicSequence,
    SequenceFamily,
    fzc_family,
    fzc_sequence,
    gold_family,
    kasami_family,
    m_sequence,
    mod_inverse,
    msequence_family,
    smallest_prime_divisor,
)
from pilotcs.correlation import (
    CorrelationProfile,
    correlation_profile,
    periodic_crosscorr,
    sarwate_lhs,
    welch_bound,
)
from pilotcs.pilot import PilotAssignment, PilotPlan, assign_pilots, pilot_from_base, shift_index
from pilotcs.measurement import (
    AnalysisReport,
    MeasurementOperator,
    analyze_operator,
    fold_to_circular,
    guarantee_margin,
    linear_convolve,
)
from pilotcs.channel import NoiseSpec, SparseChannel, add_awgn, generate_sparse_channel
from pilotcs.recovery import RecoveryResult, SolverConfig, basis_pursuit, debias_on_support, lasso

__version__ = "0.1.0"
