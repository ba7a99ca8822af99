"""Exception taxonomy shared across modules.

The CLI maps these onto exit codes: usage/config problems -> 2,
verification failures -> 3, insufficient truncation/support -> 4.
"""


class DomainError(ValueError):
    """Invalid argument for a mathematical operation."""


class ResourceError(RuntimeError):
    """Request exceeds configured resource caps (sieve size, memory)."""


class IncompleteSumError(ValueError):
    """A truncation is too small to exhaust the analytically nonzero terms."""


class VerificationError(RuntimeError):
    """An internal consistency or oracle check failed."""
