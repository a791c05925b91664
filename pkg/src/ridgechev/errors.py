class RidgechevError(Exception):
    """Base class for library errors."""


class InputError(RidgechevError, ValueError):
    """Malformed or inconsistent input."""


class OracleCapError(InputError):
    """Instance too large for brute-force enumeration."""


class CorruptDualError(RidgechevError):
    """A dual witness violates total-variation or fiber orthogonality."""


class SolverError(RidgechevError):
    """Internal invariant breach inside the LP solver."""
