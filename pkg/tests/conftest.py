import dataclasses
from typing import Tuple

import numpy as np
import pyinformed as pin
import pytest


@pytest.fixture(autouse=True)
def restore_options():
    """Tests may change PyinformedOptions; the defaults are put back after each test"""

    saved = {f.name: getattr(pin.PyinformedOptions, f.name) for f in dataclasses.fields(pin.PyinformedOptions)}
    yield
    for name, value in saved.items():
        setattr(pin.PyinformedOptions, name, value)


def make_empty_problem(n: int = 2, d: float = 100.0, width: float = 200.0, r_goal: float = None) -> pin.ProblemDef:
    """Obstacle-free box [-width/2, width/2]^n with start and goal at ∓d/2 on the first axis"""

    x_start, x_goal = np.zeros(n), np.zeros(n)
    x_start[0], x_goal[0] = -d / 2, d / 2
    world = pin.World(np.full(n, -width / 2), np.full(n, width / 2))
    return pin.ProblemDef.from_world(world, x_start, x_goal, r_goal)


@pytest.fixture
def empty_problem():
    return make_empty_problem


def make_wall_problem(
    n: int = 2, l: float = 200.0, d: float = 100.0, w: float = 10.0, h: float = 50.0, **kwargs
) -> pin.ProblemDef:
    _, problem = pin.wall_world(n, l, d, w, h, **kwargs)
    return problem


@pytest.fixture
def wall_problem():
    return make_wall_problem


@pytest.fixture
def rng_factory():
    """Seeded generators. Several tests check statistics at the 0.999 quantile for these seeds."""

    def make(seed: int = 1234) -> np.random.Generator:
        return np.random.default_rng(seed)

    return make


def random_segments(rng: np.random.Generator, lo, hi, count: int, max_length: float = None) -> Tuple[np.ndarray, np.ndarray]:
    """Random segments inside a box, optionally no longer than max_length"""

    lo, hi = np.asarray(lo, dtype=float), np.asarray(hi, dtype=float)
    a = rng.uniform(lo, hi, (count, lo.size))
    if max_length is None:
        b = rng.uniform(lo, hi, (count, lo.size))
    else:
        b = np.clip(a + rng.uniform(-max_length, max_length, (count, lo.size)) / np.sqrt(lo.size), lo, hi)
    return a, b


@pytest.fixture
def segment_factory():
    return random_segments
