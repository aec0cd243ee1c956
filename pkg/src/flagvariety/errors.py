"""Exception hierarchy shared by all modules.

Two base classes so the CLI can map failures to exit codes: bad input
data is InputError (exit 2), a computation that ran but did not succeed
is ComputationError (exit 1).
"""


class InputError(Exception):
    """Malformed or inconsistent input data."""


class ComputationError(Exception):
    """A numeric or exact computation failed or refused to certify."""


class TriangulationError(InputError):
    """Invalid triangulation file or gluing combinatorics."""


class DegenerateCoordinateError(InputError):
    """A coordinate lies on or too close to the excluded set {0, 1}."""


class InconsistentDecorationError(InputError):
    """Internal cross-ratio relations violated beyond tolerance."""


class NotASolutionError(InputError):
    """Operation requires a point satisfying the gluing equations."""


class NonConvergenceError(ComputationError):
    """Newton iteration exhausted without reaching tolerance."""

    def __init__(self, message, best=None, history=None):
        super().__init__(message)
        self.best = best
        self.history = history or []


class IdentityViolationError(ComputationError):
    """An exact lattice identity failed; signals a convention bug."""
