class InvariantViolation(ArithmeticError):
    """A numerical invariant failed (non-unitary evolution, complex energy, ...).

    Raised when an input passed validation but the arithmetic produced
    something unphysical; usually a sign of a bug upstream.
    """


class ConfigError(ValueError):
    """Invalid or unreadable CLI configuration."""
