"""Error types shared across the estimation library."""


class FeasibilityError(ValueError):
    """System dimensions violate the identifiability requirements."""


class SingularityError(ValueError):
    """A least-squares step hit a (numerically) rank-deficient matrix.

    Carries the offending smallest singular value so callers can report
    conditioning diagnostics.
    """

    def __init__(self, message, smallest_sv=None):
        super().__init__(message)
        self.smallest_sv = smallest_sv


class AmbiguityError(ValueError):
    """Scaling-ambiguity removal failed (near-zero reference entry)."""


class NumericalFailure(RuntimeError):
    """An iterative solver produced an invalid internal state.

    ``iteration`` records the step at which the failure occurred.
    """

    def __init__(self, message, iteration=None):
        super().__init__(message)
        self.iteration = iteration
