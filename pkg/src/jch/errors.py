"""Exception types shared across the package."""


class JCHError(Exception):
    """Base class for all errors raised by this package."""


class TruncationError(JCHError):
    """A finite cutoff (photon number, search bound) is too small to trust."""


class NumericalError(JCHError):
    """An eigensolve, bisection or minimization failed to converge.

    ``params`` carries the offending inputs so that failures inside grid
    sweeps can be reproduced in isolation.
    """

    def __init__(self, message, params=None):
        super().__init__(message)
        self.params = dict(params or {})


class BracketError(NumericalError):
    """A root or minimum could not be bracketed; ``bracket`` is the last one tried."""

    def __init__(self, message, bracket=None, params=None):
        super().__init__(message, params)
        self.bracket = bracket


class LobeClosedError(JCHError):
    """The requested Mott lobe does not exist at this hopping (tip passed)."""
