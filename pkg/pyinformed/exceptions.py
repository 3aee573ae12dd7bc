from __future__ import annotations

from typing import Sequence


class InvalidInputError(ValueError):
    """Exception to be raised when an argument violates an operation's preconditions"""


class DimensionMismatchError(InvalidInputError):
    """Exception to be raised when states of different dimensions are mixed"""

    def __init__(self, expected: int, got: int) -> None:
        message = f"Expected a state of dimension {expected}, got dimension {got}"
        super().__init__(message)


class DegenerateGeometryError(ValueError):
    """Exception to be raised when the foci of the informed set coincide"""


class InfeasibleCostError(ValueError):
    """Exception to be raised when a solution cost is below the theoretical minimum"""

    def __init__(self, c_best: float, c_min: float) -> None:
        self.c_best = c_best
        self.c_min = c_min
        message = f"Cost {c_best!r} is below the theoretical minimum {c_min!r}"
        super().__init__(message)


class SamplingStalledError(RuntimeError):
    """Exception to be raised when rejection sampling runs out of attempts"""

    def __init__(self, attempts: int) -> None:
        self.attempts = attempts
        message = f"No sample inside the state space after {attempts} attempts"
        super().__init__(message)


class EmptyIndexError(LookupError):
    """Exception to be raised when querying an index with no points"""


class NoSolutionError(LookupError):
    """Exception to be raised when a path is requested from a run without a solution"""


class WorldGenerationError(RuntimeError):
    """Exception to be raised when a feasible random world could not be generated"""

    def __init__(self, seed: int, attempts: int) -> None:
        self.seed = seed
        self.attempts = attempts
        message = f"Could not generate a feasible world for seed {seed} in {attempts} attempts"
        super().__init__(message)


class UnsupportedDimensionError(NotImplementedError):
    """Exception to be raised when an operation is only defined for some dimensions"""

    def __init__(self, operation: str, n: int, supported: Sequence[int]) -> None:
        message = f"{operation} does not support dimension {n}. Supported dimensions: {list(supported)}"
        super().__init__(message)


class UnsupportedFormatError(ValueError):
    """Exception to be raised when an output format is not known"""

    def __init__(self, fmt: str, supported: Sequence[str]) -> None:
        message = f"Unsupported format {fmt!r}. Supported formats are: {', '.join(supported)}"
        super().__init__(message)


class TreeConsistencyError(RuntimeError):
    """Exception to be raised when a planner tree violates one of its invariants"""
