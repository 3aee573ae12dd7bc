from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .exceptions import DimensionMismatchError, InvalidInputError


@dataclass
class PyinformedOptions:
    clamp_tolerance: float = 1e-9  # relative to c_min
    max_sample_attempts: int = 10**6
    goal_radius_fraction: float = 0.01
    tree_tolerance: float = 1e-9
    nn_linear_threshold: int = 64
    nn_buffer_limit: int = 2048
    obstacle_retries: int = 100
    world_retries: int = 20
    gamma_factor: float = 1.1


def _parse_state(coords: ArrayLike, dimension: int = None) -> NDArray[np.float64]:
    """Parses a state and handles errors

    Parameters:
    -----------
    coords: ArrayLike
        The coordinates of the state.
        If an array of float64 which is already read-only is passed, it is returned unprocessed.

    dimension: int, default None
        The expected dimension of the state.
        If None, any dimension of at least 1 is accepted.

    Returns:
    --------
        Returns a read-only 1-dimensional numpy array of float64.

    Raises:
    -------
        InvalidInputError: If the coordinates are not a flat, finite, non-empty list of numbers
        DimensionMismatchError: If the state does not have the expected dimension
    """

    if isinstance(coords, np.ndarray) and coords.dtype == np.float64 and not coords.flags.writeable:
        state = coords
    else:
        try:
            state = np.array(coords, dtype=np.float64)
        except (TypeError, ValueError):
            raise InvalidInputError("State does not seem to be a list of numbers")
        state.flags.writeable = False

    if state.ndim != 1 or state.size == 0:
        raise InvalidInputError(f"A state must be a non-empty flat list of coordinates, got shape {state.shape}")
    if not np.all(np.isfinite(state)):
        raise InvalidInputError("All coordinates of a state must be finite")
    if dimension is not None and state.size != dimension:
        raise DimensionMismatchError(dimension, state.size)

    return state


def _parse_states(points: Sequence[ArrayLike] | ArrayLike, dimension: int = None) -> NDArray[np.float64]:
    """Converts a list of states to a read-only (k, n) array"""

    try:
        states = np.array(points, dtype=np.float64)
    except (TypeError, ValueError):
        raise InvalidInputError("States do not all share one dimension")

    if states.ndim != 2 or states.shape[0] == 0:
        raise InvalidInputError(f"Expected a non-empty list of states, got shape {states.shape}")
    if not np.all(np.isfinite(states)):
        raise InvalidInputError("All coordinates of a state must be finite")
    if dimension is not None and states.shape[1] != dimension:
        raise DimensionMismatchError(dimension, states.shape[1])

    states.flags.writeable = False
    return states


def _resolve_rng(rng: np.random.Generator | int | None) -> np.random.Generator:
    """Accepts a generator or a seed and returns a generator"""

    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(rng)
