"""Exception hierarchy shared by all roguewave modules."""


class RogueWaveError(Exception):
    """Base class for every error raised by this package."""


class StepTooLarge(RogueWaveError):
    pass


class NonFiniteValue(RogueWaveError):
    pass


class LengthNotPowerOfTwo(RogueWaveError, ValueError):
    pass


class ScaleOutOfRange(RogueWaveError, ValueError):
    pass


class MTooLarge(RogueWaveError, ValueError):
    pass


class PlanMismatch(RogueWaveError, ValueError):
    pass


class GridMismatch(RogueWaveError, ValueError):
    pass


class ZeroReference(RogueWaveError, ValueError):
    pass


class DegenerateSpectrum(RogueWaveError):
    """The scaleogram carries no energy (e.g. a pure unit background)."""


class NotConverged(RogueWaveError):
    """The l1 solver hit its iteration cap.

    ``result`` holds the best feasible point found so far so callers can
    keep going with degraded accuracy.
    """

    def __init__(self, iterations: int, residual: float, result=None):
        super().__init__(
            f"basis pursuit did not converge after {iterations} iterations "
            f"(residual {residual:.3e})"
        )
        self.iterations = iterations
        self.residual = residual
        self.result = result


class ParseError(RogueWaveError, ValueError):
    def __init__(self, path, line: int, message: str):
        super().__init__(f"{path}:{line}: {message}")
        self.path = path
        self.line = line
