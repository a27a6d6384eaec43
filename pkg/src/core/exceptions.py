"""Exception hierarchy for bondspan.

Library code raises these; only the command line maps them to exit codes.
"""


class BondspanError(Exception):
    """Base class for all bondspan errors."""

    kind = "error"


class InstanceParseError(BondspanError):
    """Raised when an instance file cannot be parsed or has the wrong shape."""

    kind = "parse"

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        super().__init__(message)
        self.line = line
        self.column = column


class InvalidInstanceError(BondspanError):
    """Raised when an instance is well-formed but not a valid input."""

    kind = "invalid-instance"


class DisconnectedGraphError(InvalidInstanceError):
    """Raised when an operation requires a connected graph."""

    kind = "disconnected"


class InvalidMinorError(InvalidInstanceError):
    """Raised for contraction or deletion of an unknown edge or element."""

    kind = "invalid-minor"


class InvalidEdgeSetError(InvalidInstanceError):
    """Raised when an edge subset does not belong to the graph or is not a tree."""

    kind = "invalid-edge-set"


class DistributionError(InvalidInstanceError):
    """Raised for malformed distributions or an unsupported distribution family."""

    kind = "distribution"


class SizeGuardError(BondspanError):
    """Raised when an exponential enumeration would exceed its size guard."""

    kind = "size-guard"


class UsageError(BondspanError):
    """Raised for bad command-line arguments or environment settings."""

    kind = "usage"
