"""
Error hierarchy for the dipole-removal library

Every error carries the process exit code the CLI reports for it.
"""

from typing import Optional


class DipoleError(Exception):
    """Base class for all library errors"""
    exit_code: int = 1


class MalformedInput(DipoleError, ValueError):
    """Input document or geometry cannot be interpreted"""
    exit_code = 3


class NonPlanarEmbedding(MalformedInput):
    """Two straight-line edges cross, overlap or share a direction at a vertex"""


class NotBidirectional(MalformedInput):
    """An edge appears without its reverse"""


class DuplicateEdge(MalformedInput):
    """An unordered vertex pair was listed twice"""


class EmptyDiscretization(MalformedInput):
    """No lattice cell fits inside the domain"""


class HypothesisViolated(DipoleError):
    """A theorem hypothesis does not hold for the given input"""
    exit_code = 2

    def __init__(self, message: str, clause: Optional[str] = None):
        super().__init__(message)
        self.clause = clause

    def __str__(self) -> str:
        base = super().__str__()
        return f"[{self.clause}] {base}" if self.clause else base


class PreconditionViolated(HypothesisViolated):
    """A reconstruction precondition failed; `clause` names it"""


class NonzeroCurl(PreconditionViolated):
    """A form expected to be curl-free has a face with nonzero curl"""

    def __init__(self, message: str, clause: str = "curl"):
        super().__init__(message, clause)


class H0Unsatisfiable(HypothesisViolated):
    """Lattice spacing is too coarse for the boundary datum's modulus"""

    def __init__(self, message: str, clause: str = "H0"):
        super().__init__(message, clause)


class NotStarShaped(HypothesisViolated):
    """Discretized domain is not star-shaped with respect to the origin"""

    def __init__(self, message: str, clause: str = "star-shaped"):
        super().__init__(message, clause)


class NotAdmissible(DipoleError):
    """Complex is disconnected or has a boundary edge on no bounded face"""
    exit_code = 2


class IntegralityViolation(DipoleError):
    """A divergence or curl that must be integral is not"""
    exit_code = 2


class DisconnectedGraph(DipoleError):
    """Flow engine was given a disconnected graph"""


class EmptyTerminalSet(DipoleError):
    """Source or sink set of a flow problem is empty"""


class NotAFlow(DipoleError):
    """Form has nonzero divergence away from the terminals"""


class TooLarge(DipoleError):
    """Instance exceeds what an exhaustive oracle can enumerate"""


class Infeasible(DipoleError):
    """Constraints admit no solution"""


class InternalConsistencyError(DipoleError):
    """A guarantee of the construction failed numerically"""
