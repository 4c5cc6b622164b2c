"""
Exception hierarchy for the grid-forming inverter tuner.
"""


class GfmTunerError(Exception):
    """Base class for all errors raised by this package."""


class ParameterError(GfmTunerError, ValueError):
    """A physical or control parameter is outside its valid range."""


class UndefinedAngleError(GfmTunerError, ValueError):
    """The electrical angle of a zero-length vector was requested."""


class SimulationDivergedError(GfmTunerError, ArithmeticError):
    """The plant state became non-finite."""

    def __init__(self, t: float, message: str = "plant state became non-finite"):
        super().__init__(f"{message} at t={t:.6g} s")
        self.t = t


class ConfigurationError(GfmTunerError):
    """A configuration or scenario document is invalid."""


class ScenarioNotFoundError(ConfigurationError):
    """The requested scenario file does not exist."""

    def __init__(self, path):
        super().__init__(f"scenario not found: {path}")
        self.path = path
