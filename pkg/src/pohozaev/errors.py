"""Exception and warning types shared across the package."""


class ParameterError(ValueError):
    """An argument violates a documented precondition (ranges, orderings)."""


class DegenerateInputError(ValueError):
    """An input is degenerate for the requested operation (zero function,
    vanishing norm, empty fiber)."""


class ConvergenceError(RuntimeError):
    """An iterative solver failed to reach its tolerance.  Carries whatever
    diagnostics the solver had at the point of failure."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class InfeasibleBranchError(RuntimeError):
    """The requested solution branch does not exist at these parameters,
    e.g. the coupling sits above the fiber threshold along the search path."""


class ResolutionWarning(UserWarning):
    """The grid no longer resolves the function being represented."""


class CompactnessLossWarning(UserWarning):
    """A continuation run drifted toward the energy threshold where the
    minimizing sequence may concentrate; results past this point are suspect."""
