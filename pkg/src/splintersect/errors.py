"""Exception hierarchy shared across the library.

Input-side problems derive from :class:`InputError` (CLI exit code 1),
solver-side problems from :class:`ComputationError` (CLI exit code 2).
"""


class SplintersectError(Exception):
    """Base class for all library errors."""


class InputError(SplintersectError):
    """Invalid arguments, files or geometry supplied by the caller."""


class InvalidArgumentError(InputError, ValueError):
    pass


class UnsupportedInputError(InputError):
    """Input is well formed but outside the supported feature set."""


class BasePointError(InputError):
    """All four homogeneous coordinates vanish at the queried parameter."""

    def __init__(self, theta):
        self.theta = theta
        super().__init__(f"base point encountered at theta={theta}")


class OpenSurfaceError(InputError):
    """A lattice line crossed the surface an odd number of times."""


class ComputationError(SplintersectError):
    pass


class NumericalFailureError(ComputationError):
    """SVD / eigenvalue solver failure or non-converging reduction."""


class NotOnSurfaceError(ComputationError):
    """Parameter recovery requested at a point with no rank drop."""


class DegenerateParameterizationError(ComputationError):
    """No usable basis-function ratio for parameter recovery."""


class ToleranceUnreachableError(ComputationError):
    """Subdivision recursion exceeded its depth cap (near-tangency)."""


class MechanismError(ComputationError):
    """Truss stiffness matrix is singular after applying constraints."""

    def __init__(self, n_modes, message=None):
        self.n_modes = n_modes
        super().__init__(
            message or f"mechanism detected: {n_modes} near-zero-energy mode(s)"
        )
