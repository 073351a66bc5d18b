"""Exception types raised across the package."""


class NHPlanError(Exception):
    pass


class OutOfBounds(NHPlanError, ValueError):
    pass


class ParseError(NHPlanError, ValueError):
    pass


class InvalidProblem(NHPlanError, ValueError):
    pass


class InvalidBias(NHPlanError, ValueError):
    pass


class InvalidThreshold(NHPlanError, ValueError):
    pass


class DimensionMismatch(NHPlanError, ValueError):
    pass


class EmptyInput(NHPlanError, ValueError):
    pass


class EmptyTruth(NHPlanError, ValueError):
    pass


class NonBinaryTruth(NHPlanError, ValueError):
    pass


class DegenerateDenominator(NHPlanError, ZeroDivisionError):
    pass


class InconsistentTruth(NHPlanError, ValueError):
    pass


class GenerationFailed(NHPlanError, RuntimeError):
    pass


class Unsolvable(NHPlanError, RuntimeError):
    pass


class InsufficientSolutions(NHPlanError, RuntimeError):
    pass


class MissingPrediction(NHPlanError, FileNotFoundError):
    pass


class ConfigError(NHPlanError, ValueError):
    pass
