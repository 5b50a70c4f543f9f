"""Exception hierarchy shared by every module of the package."""


class PathObliviousError(Exception):
    """Base class for all errors raised by this package."""


class InvalidTopologyError(PathObliviousError, ValueError):
    pass


class UnreachableError(PathObliviousError):
    """Two nodes lie in distinct connected components of the generation graph."""


class InvalidPairError(PathObliviousError, ValueError):
    pass


class InvalidSwapError(PathObliviousError, ValueError):
    pass


class InvalidCandidateError(PathObliviousError, ValueError):
    pass


class InsufficientPairsError(PathObliviousError):
    pass


class InvalidLengthError(PathObliviousError, ValueError):
    pass


class PathNotFoundError(PathObliviousError):
    pass


class PartialExecutionError(PathObliviousError):
    """A multi-swap fulfillment ran short midway; ``executed`` lists the swaps kept."""

    def __init__(self, message, executed):
        super().__init__(message)
        self.executed = list(executed)


class LpBuildError(PathObliviousError, ValueError):
    pass


class DegenerateDemandError(LpBuildError):
    pass


class SolverStalledError(PathObliviousError):
    pass


class ConfigError(PathObliviousError, ValueError):
    """Invalid scenario or sweep configuration; ``field`` is a dotted path."""

    def __init__(self, field, message):
        super().__init__(f"{field}: {message}" if field else message)
        self.field = field
        self.message = message
