"""Exception types shared across the package."""


class InvalidStateError(ValueError):
    """Weights or matrices violate a state invariant."""


class BelowThresholdError(ValueError):
    """Gate noise is too strong for the requested protocol to purify."""


class UnreachableTargetError(ValueError):
    """A target fidelity lies outside what the protocol can reach."""
