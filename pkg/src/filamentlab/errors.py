"""Exception types raised across the package."""


class FilamentError(Exception):
    """Base class for all package errors."""


class DegenerateSegment(FilamentError):
    """Two consecutive curve nodes coincide."""


class NotAsymptoticallyStraight(FilamentError):
    """Open-curve endpoint tangents are not aligned with the reference axis."""


class StepTooLarge(FilamentError):
    """Time step exceeds the explicit integrator stability guard."""


class NonUniformGrid(FilamentError):
    """A field or curve expected on a uniform grid is not uniformly spaced."""


class WindowTooNarrow(FilamentError):
    """Sampling window does not reach far enough into the soliton tails."""


class UndefinedFrame(FilamentError):
    """Frenet frame is undefined (zero curvature) where it is required."""


class DomainError(FilamentError, ValueError):
    """Argument outside the mathematical domain of a formula."""


class EmptyTrajectory(FilamentError):
    """A trajectory with no snapshots was supplied."""


class NormalizationUnsatisfiable(FilamentError):
    """A trial profile cannot be rescaled to the requested norm."""


class ConfigParse(FilamentError):
    """Experiment configuration file is malformed or has unknown keys."""


class UnknownExperiment(ConfigParse):
    """Experiment name is not registered."""
