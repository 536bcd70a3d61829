"""
eigenbound/errors.py — Exception types shared by the library and the CLI

Every failure the library can report has its own class so callers (mostly
the experiment commands) can tell a violated theorem precondition apart from
a numerical breakdown or a bad config file. The classes carry the numbers
that explain the failure (slack, iteration count and so on) as attributes.
"""


class EigenboundError(Exception):
    """Base class for every error raised by eigenbound."""
    pass


class ArgumentError(EigenboundError, ValueError):
    """Raised when an argument is out of range or has the wrong shape."""
    pass


class ConfigError(EigenboundError):
    """Raised when an experiment config file or flag set is invalid."""
    pass


class NumericalFailureError(EigenboundError):
    """Raised when a dense decomposition does not converge."""

    def __init__(self, message, iterations=None):
        super().__init__(message)
        self.iterations = iterations


class SingularityError(EigenboundError):
    """Raised when a resolvent is requested too close to the spectrum."""

    def __init__(self, message, eigenvalue, distance):
        super().__init__(message)
        self.eigenvalue = eigenvalue
        self.distance = distance


class PreconditionError(EigenboundError):
    """Raised when an analytic bound is evaluated outside its hypotheses.

    `name` is the inequality as written (e.g. '4|E| <= delta_p') and `slack`
    is rhs - lhs, so a negative slack tells you by how much it failed.
    """

    def __init__(self, name, slack, bound=None):
        label = f'{bound}: ' if bound else ''
        super().__init__(f'{label}precondition {name} fails (slack {slack:.6g})')
        self.name = name
        self.slack = slack
        self.bound = bound


class DegenerateGapError(PreconditionError):
    """Raised when a contour is requested around a block with zero gap."""

    def __init__(self, index, bound='contour'):
        super().__init__(f'delta_{index} > 0', 0.0, bound=bound)
        self.index = index


class EnclosureError(EigenboundError):
    """Raised when a contour does not separate the spectrum as required."""

    def __init__(self, message, eigenvalue=None):
        super().__init__(message)
        self.eigenvalue = eigenvalue


class QuadratureError(EigenboundError):
    """Raised when a contour integral fails to converge within budget."""

    def __init__(self, message, estimate, refinements):
        super().__init__(message)
        self.estimate = estimate
        self.refinements = refinements


class BreakdownError(EigenboundError):
    """Raised when power iteration lands in the kernel (A v = 0)."""

    def __init__(self, iteration):
        super().__init__(f'power iteration broke down at step {iteration}: A v = 0')
        self.iteration = iteration
