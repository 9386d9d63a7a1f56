"""Exception types shared across the package."""


class OutOfRegimeError(ValueError):
    """Parameters lie outside the regime where the requested quantity exists.

    ``reason`` names the governing statement, e.g.
    ``"two-photon Rabi bound: |g|>1/2 unbounded below"``.
    """

    def __init__(self, reason: str):
        super().__init__(reason)
        self.reason = reason


class ConvergenceError(RuntimeError):
    """Truncation escalation hit its cap before the requested levels settled."""


class ContractError(ValueError):
    """Input violates a structural precondition (e.g. a non-symmetric matrix)."""


class UnsupportedError(NotImplementedError):
    """The requested check has no stated bound for this model family."""


class StatisticalFailure(RuntimeError):
    """A Monte Carlo estimate is too noisy for the requested derived quantity."""
