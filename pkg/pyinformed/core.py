from __future__ import annotations

import inspect
import math
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Iterator, Sequence

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .exceptions import DimensionMismatchError, InvalidInputError
from .utils import PyinformedOptions, _parse_state, _parse_states

if TYPE_CHECKING:
    from .worlds import World

StateVec = NDArray[np.float64]


def state_parser(*pos):
    """Decorator to parse states in any function

        Accepts the 0-indexed position of the parameter for which state parsing needs to be done.
        Works even if function is used with keyword arguments while not maintaining parameter order.
        All parsed states must share the dimension of the first one.

    Example:
    --------
    >>> @state_parser(0, 1)
    >>> def midpoint(a, b):
    ...     return (a + b) / 2
    ...
    >>> midpoint([0, 0], b=(2, 4))
    array([1., 2.])

    Each of the states is converted to a read-only numpy array of float64.
    """

    def parse_states(func):
        sig: inspect.Signature = inspect.signature(func)
        params: list = [i[0] for i in sig.parameters.items()]

        def wrapper_func(*args, **kwargs):
            args: list = list(args)
            dimension: int = None

            for j in pos:
                kwarg: str = params[j]
                in_args: bool = kwarg not in kwargs
                if in_args:
                    if j >= len(args):
                        continue
                    state = args[j]
                else:
                    state = kwargs[kwarg]

                if state is None:
                    continue

                parsed_state: StateVec = _parse_state(state, dimension)
                dimension = parsed_state.size
                if in_args:
                    args[j] = parsed_state
                else:
                    kwargs[kwarg] = parsed_state
            return func(*args, **kwargs)

        wrapper_func.__name__ = func.__name__
        wrapper_func.__doc__ = func.__doc__
        wrapper_func.__wrapped__ = func
        return wrapper_func

    return parse_states


def as_state(coords: ArrayLike, dimension: int = None) -> StateVec:
    """Create a state from a list of coordinates

    Parameters
    ----------
    coords : ArrayLike
        The coordinates, in problem length units.

    dimension : int, optional
        The dimension the state must have.

    Returns
    -------
    StateVec
        A read-only numpy array of float64.
    """

    return _parse_state(coords, dimension)


@dataclass(frozen=True, order=True)
class Cost:
    """Path cost with an explicit infinite value

    The minimum of an empty set of solutions is infinite; every finite cost is smaller.
    """

    value: float = math.inf

    def __post_init__(self):
        value = float(self.value)
        if math.isnan(value) or value < 0:
            raise InvalidInputError(f"Cost must be non-negative, got {self.value!r}")
        object.__setattr__(self, "value", value)

    @classmethod
    def infinite(cls) -> Cost:
        return cls(math.inf)

    @property
    def is_finite(self) -> bool:
        return math.isfinite(self.value)

    def __float__(self) -> float:
        return self.value

    def __repr__(self):
        return f"{self.__class__.__name__}({self.value!r})"


@dataclass(frozen=True, eq=False)
class PathSeq:
    """Ordered sequence of states of one dimension

    Parameters
    ----------
    states : Sequence[ArrayLike]
        The states of the path, in order. Stored as a read-only (k, n) array.
    """

    states: NDArray[np.float64]

    def __post_init__(self):
        object.__setattr__(self, "states", _parse_states(self.states))

    @property
    def dimension(self) -> int:
        return self.states.shape[1]

    @property
    def cost(self) -> Cost:
        return path_cost(self)

    def reversed(self) -> PathSeq:
        return PathSeq(self.states[::-1])

    def __len__(self) -> int:
        return self.states.shape[0]

    def __iter__(self) -> Iterator[StateVec]:
        return iter(self.states)

    def __getitem__(self, i) -> StateVec:
        return self.states[i]


def path_cost(path: PathSeq | Sequence[ArrayLike]) -> Cost:
    """Returns the length of a path

    The cost of a path is the sum of the Euclidean lengths of its segments.

    Parameters
    ----------
    path : PathSeq | Sequence[ArrayLike]
        The path. A list of states is converted to a PathSeq first.

    Returns
    -------
    Cost
        Zero for a single state or for a path whose states all coincide.

    Raises
    ------
    InvalidInputError
        If the states do not share one dimension.
    """

    if not isinstance(path, PathSeq):
        path = PathSeq(path)

    segments = np.diff(path.states, axis=0)
    return Cost(float(np.linalg.norm(segments, axis=1).sum()))


@state_parser(0, 1, 2)
def heuristic_f(x: ArrayLike, x_start: ArrayLike, x_goal: ArrayLike) -> Cost:
    """Admissible estimate of the cost of a solution constrained to pass through x

    Returns ‖x_start − x‖ + ‖x − x_goal‖, which is never below ‖x_goal − x_start‖.
    """

    return Cost(float(np.linalg.norm(x_start - x) + np.linalg.norm(x - x_goal)))


def _heuristic_values(points: NDArray[np.float64], x_start: StateVec, x_goal: StateVec) -> NDArray[np.float64]:
    """Vectorised heuristic_f over a (k, n) array"""

    return np.linalg.norm(points - x_start, axis=-1) + np.linalg.norm(points - x_goal, axis=-1)


@dataclass(frozen=True, eq=False)
class ProblemDef:
    """Definition of a planning problem

    Parameters
    ----------
    bounds_lo, bounds_hi : ArrayLike
        Corners of the state space X, a box in R^n.

    x_start, x_goal : ArrayLike
        Start and goal states. Both must be inside the bounds and collision-free.

    r_goal : float, optional
        Radius of the goal ball. Defaults to PyinformedOptions.goal_radius_fraction times c_min.

    world : World, optional
        Obstacles of the problem. Its bounds must equal the problem bounds.
        If None, the whole box is free.
    """

    bounds_lo: StateVec
    bounds_hi: StateVec
    x_start: StateVec
    x_goal: StateVec
    r_goal: float = None
    world: World = field(default=None, compare=False)

    def __post_init__(self):
        lo = _parse_state(self.bounds_lo)
        n = lo.size
        hi = _parse_state(self.bounds_hi, n)
        if np.any(lo >= hi):
            raise InvalidInputError("bounds_lo must be strictly below bounds_hi on every axis")

        x_start = _parse_state(self.x_start, n)
        x_goal = _parse_state(self.x_goal, n)
        c_min = float(np.linalg.norm(x_goal - x_start))
        if c_min <= 0:
            raise InvalidInputError("Start and goal must be distinct states")

        r_goal = self.r_goal
        if r_goal is None:
            r_goal = PyinformedOptions.goal_radius_fraction * c_min
        if not math.isfinite(r_goal) or r_goal < 0:
            raise InvalidInputError(f"r_goal must be a non-negative number, got {r_goal!r}")

        for name, value in (("bounds_lo", lo), ("bounds_hi", hi), ("x_start", x_start), ("x_goal", x_goal)):
            object.__setattr__(self, name, value)
        object.__setattr__(self, "r_goal", float(r_goal))

        if self.world is not None:
            if self.world.dimension != n:
                raise DimensionMismatchError(n, self.world.dimension)
            if not (np.array_equal(self.world.bounds_lo, lo) and np.array_equal(self.world.bounds_hi, hi)):
                raise InvalidInputError("World bounds do not match the problem bounds")

        if not self.is_state_free(x_start):
            raise InvalidInputError(f"Start state {x_start.tolist()} is outside the bounds or in collision")
        if not self.is_state_free(x_goal):
            raise InvalidInputError(f"Goal state {x_goal.tolist()} is outside the bounds or in collision")

    @classmethod
    def from_world(cls, world: World, x_start: ArrayLike, x_goal: ArrayLike, r_goal: float = None) -> ProblemDef:
        return cls(world.bounds_lo, world.bounds_hi, x_start, x_goal, r_goal, world)

    @property
    def dimension(self) -> int:
        return self.bounds_lo.size

    @property
    def c_min(self) -> float:
        """Theoretical minimum: the straight-line distance from start to goal"""

        return float(np.linalg.norm(self.x_goal - self.x_start))

    @property
    def bounds_measure(self) -> float:
        return float(np.prod(self.bounds_hi - self.bounds_lo))

    @property
    def bounds_diameter(self) -> float:
        return float(np.linalg.norm(self.bounds_hi - self.bounds_lo))

    def in_bounds(self, x: StateVec) -> bool:
        return bool(np.all(x >= self.bounds_lo) and np.all(x <= self.bounds_hi))

    def is_state_free(self, x: StateVec) -> bool:
        if self.world is None:
            return self.in_bounds(x)
        return self.world.is_state_free(x)

    def is_segment_free(self, a: StateVec, b: StateVec) -> bool:
        if self.world is None:
            return self.in_bounds(a) and self.in_bounds(b)
        return self.world.is_segment_free(a, b)

    def in_goal_region(self, x: StateVec) -> bool:
        return bool(np.linalg.norm(x - self.x_goal) <= self.r_goal)
