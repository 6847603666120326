"""Exception hierarchy shared by every module.

The CLI maps each family to a distinct exit code, so new errors should
subclass the closest existing family rather than ``SFTreeError`` directly.
"""


class SFTreeError(Exception):
    """Base class for all package errors."""


class GraphInputError(SFTreeError, ValueError):
    """Malformed graph input (loop, duplicate edge, vertex out of range, bad file)."""

    def __init__(self, message, pair=None):
        super().__init__(message)
        self.pair = pair


class DisconnectedGraphError(SFTreeError):
    """A tree-seeking operation received a disconnected graph."""


class TreeValidationError(SFTreeError):
    """An edge set is not a spanning tree of its host.

    ``kind`` is one of ``"bad_edge"``, ``"wrong_count"``, ``"cycle"``,
    ``"disconnected"``.
    """

    def __init__(self, kind, message):
        super().__init__(message)
        self.kind = kind


class PreconditionError(SFTreeError, ValueError):
    """Input is well formed but outside the domain of the operation
    (non-cubic host for the cubic checks, non-split graph, ...)."""


class SwitchError(PreconditionError):
    """Invalid neighbor-switch descriptor."""


class MissingHostEdgeError(SwitchError):
    def __init__(self, edge):
        super().__init__(f"new edge {edge} is not an edge of the host graph")
        self.edge = edge


class RefusedError(SFTreeError):
    """Enumeration or solve refused because it exceeds a configured cap."""

    def __init__(self, message, count=None):
        super().__init__(message)
        self.count = count


class SolveTimeout(SFTreeError):
    """A deadline passed before the solve finished."""


class SolverError(SFTreeError):
    """Base for external MILP solver failures."""


class SolverConfigError(SolverError):
    """No solver command configured, or the command template is unusable."""


class SolverNotFoundError(SolverError):
    pass


class SolverFailedError(SolverError):
    def __init__(self, message, returncode=None, stderr=""):
        super().__init__(message)
        self.returncode = returncode
        self.stderr = stderr


class SolutionParseError(SolverError):
    pass


class SolverTimeoutError(SolverError, SolveTimeout):
    pass


class SolutionMismatchError(SolverError):
    """A solver assignment does not decode to a consistent spanning tree."""
