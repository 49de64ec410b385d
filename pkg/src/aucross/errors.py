"""Exception hierarchy shared by every module of the package."""


class AUCrossError(Exception):
    """Base class for all package errors."""


class ValidationError(AUCrossError, ValueError):
    """Malformed input: bad shapes, out-of-range values, unknown options."""


class DegenerateSample(AUCrossError, ValueError):
    """A sample lacks one of the two classes, so AUC is undefined."""


class WrongClass(ValidationError):
    pass


class Underflow(DegenerateSample):
    """Removing the instance would empty its class."""


class EmptyInput(ValidationError):
    pass


class InvalidCoverage(ValidationError):
    pass


class InvalidSpec(ValidationError):
    pass


class FoldDegenerate(DegenerateSample):
    """A fold plan that cannot train a scorer on every complement."""


class TrainerFailure(AUCrossError, RuntimeError):
    pass


class ParseError(ValidationError):
    pass


def check_coverage(c: float) -> float:
    c = float(c)
    if not 0.0 < c <= 1.0:
        raise InvalidCoverage(f"target coverage must lie in (0, 1], got {c}")
    return c
