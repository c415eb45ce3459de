"""Exception types. All derive from ValueError so callers can catch broadly."""


class NoInverseError(ValueError):
    """Raised when a modular inverse does not exist."""


class NonPrimitivePolynomialError(ValueError):
    """Raised when LFSR taps do not produce a maximal-length sequence."""


class NoPreferredPairError(ValueError):
    """Raised when no preferred pair of m-sequences exists for the degree."""


class ConfigurationError(ValueError):
    """Raised for inconsistent system dimensions (M, L, t, q)."""


class InsufficientFamilyError(ValueError):
    """Raised when a plan needs more base sequences than the family holds."""


class OverdeterminedSupportError(ValueError):
    """Raised when a least-squares support is larger than the row count."""


class MatrixTooLargeError(ValueError):
    """Raised when dense materialization would exceed the size threshold."""
