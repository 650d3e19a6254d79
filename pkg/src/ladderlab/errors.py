"""Exception types shared across the package."""


class LadderLabError(Exception):
    """Base class for all package-specific errors."""


class ZeroDenominator(LadderLabError, ZeroDivisionError):
    pass


class PoleAtValue(LadderLabError, ZeroDivisionError):
    pass


class NotDominant(LadderLabError, ValueError):
    pass


class NotAPermutation(LadderLabError, ValueError):
    pass


class InvalidWeight(LadderLabError, ValueError):
    pass


class PathMismatch(LadderLabError, ValueError):
    pass


class WeightMismatch(LadderLabError, ValueError):
    pass


class LabelOutOfRange(LadderLabError, ValueError):
    pass


class DimensionMismatch(LadderLabError, ValueError):
    pass


class InvalidPattern(LadderLabError, ValueError):
    pass


class InvalidInput(LadderLabError, ValueError):
    pass


class NonUniqueSolution(LadderLabError, ArithmeticError):
    pass


class DegenerateKappa(LadderLabError, ArithmeticError):
    pass


class UnsupportedRank(LadderLabError, ValueError):
    pass


class ParseError(LadderLabError, ValueError):
    pass


class ValidationError(LadderLabError, ValueError):
    pass
