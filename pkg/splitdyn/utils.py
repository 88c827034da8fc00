from typing import Union


class SplitDynError(Exception):
    """Base class for every toolkit failure. `code` is the CLI exit code."""
    code = 1


class DegenerateMap(SplitDynError):
    code = 2


class DegenerateFiber(SplitDynError):
    code = 2

    def __init__(self, t, message: str = ""):
        self.t = t
        super().__init__(message or f"Degenerate fiber at t={t}")


class DegreeNonZero(SplitDynError):
    code = 2


class NonDominant(SplitDynError):
    code = 2


class SpecialCurve(SplitDynError):
    code = 2


class ExceptionalStart(SplitDynError):
    code = 2


class InvalidInput(SplitDynError):
    code = 2


class BudgetExceeded(SplitDynError):
    code = 3


class InsufficientSamples(SplitDynError):
    code = 3


class NoConvergence(SplitDynError):
    code = 4


error_codes = {
    "DegenerateMap": (2, "Degenerate Map: resultant vanishes or degree below 2"),
    "DegenerateFiber": (2, "Degenerate Fiber: specialization is not a morphism"),
    "DegreeNonZero": (2, "Divisor Degree Not Zero"),
    "NonDominant": (2, "Projection Not Dominant"),
    "SpecialCurve": (2, "Curve Is Weakly Special"),
    "ExceptionalStart": (2, "Exceptional Starting Point"),
    "InvalidInput": (2, "Invalid Input"),
    "BudgetExceeded": (3, "Budget Exceeded"),
    "InsufficientSamples": (3, "Insufficient Samples"),
    "NoConvergence": (4, "Numeric Failure: No Convergence"),
}


def _error_name(error: Union[BaseException, str]) -> str:
    if isinstance(error, BaseException):
        return type(error).__name__
    return error.strip()


def get_error_message(error: Union[BaseException, str]) -> str:
    """
    Return the human message for an exception instance or class name.
    Unmapped names come back as "Unknown error: <name>".
    """
    name = _error_name(error)
    entry = error_codes.get(name)
    if entry is None:
        return f"Unknown error: {name}"
    message = entry[1]
    if isinstance(error, BaseException) and str(error):
        message = f"{message}: {error}"
    return message


def get_exit_code(error: Union[BaseException, str]) -> int:
    """Exit code of the CLI contract (0 ok, 2 degeneracy, 3 budget, 4 numeric failure)."""
    entry = error_codes.get(_error_name(error))
    if entry is None:
        return 1
    return entry[0]


__all__ = [
    'SplitDynError',
    'DegenerateMap',
    'DegenerateFiber',
    'DegreeNonZero',
    'NonDominant',
    'SpecialCurve',
    'ExceptionalStart',
    'InvalidInput',
    'BudgetExceeded',
    'InsufficientSamples',
    'NoConvergence',
    'error_codes',
    'get_error_message',
    'get_exit_code',
]
