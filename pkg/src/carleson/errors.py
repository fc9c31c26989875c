"""Exception types raised across the package."""


class CarlesonError(Exception):
    """Base class for every error raised by this package."""


class SpecError(CarlesonError, ValueError):
    """An input spec (domain, measure, map, open set) failed validation."""


class InvalidDomain(SpecError):
    pass


class InvalidWeights(SpecError):
    pass


class PoleHit(CarlesonError, ArithmeticError):
    """A map was evaluated at (or numerically on top of) one of its poles."""


class AtomOutsideDomain(SpecError):
    pass


class AtomInNoComponent(SpecError):
    pass


class TooManyAtoms(CarlesonError, ValueError):
    pass


class EvaluationPointOnBoundary(CarlesonError, ValueError):
    pass


class EvaluationPointOutsideDomain(CarlesonError, ValueError):
    pass


class PoleTooCloseToBoundary(CarlesonError, ArithmeticError):
    pass


class NoConvergence(CarlesonError, ArithmeticError):
    pass
