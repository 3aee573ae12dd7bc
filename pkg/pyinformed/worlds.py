from __future__ import annotations

import hashlib
import json
import math
import pathlib
import warnings
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, List, Sequence, Tuple

import numpy as np
from numpy.typing import ArrayLike

from .core import Cost, ProblemDef, StateVec, state_parser
from .exceptions import DimensionMismatchError, InvalidInputError, UnsupportedDimensionError, WorldGenerationError
from .utils import PyinformedOptions, _parse_state


@dataclass(frozen=True, eq=False)
class AabbObstacle:
    """Closed axis-aligned box, lo[i] < hi[i] on every axis"""

    lo: StateVec
    hi: StateVec

    def __post_init__(self):
        lo = _parse_state(self.lo)
        hi = _parse_state(self.hi, lo.size)
        if np.any(lo >= hi):
            raise InvalidInputError(f"Obstacle corners must satisfy lo < hi on every axis: {lo.tolist()}, {hi.tolist()}")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @property
    def dimension(self) -> int:
        return self.lo.size

    def distance_to(self, x: StateVec) -> float:
        """Euclidean distance from x to the box, zero inside it"""

        gap = np.maximum(np.maximum(self.lo - x, 0.0), x - self.hi)
        return float(np.linalg.norm(gap))


class World:
    """Bounded state space with axis-aligned box obstacles

    Obstacles are closed sets: a state on an obstacle face is in collision.
    The bounds are closed as well: a state on the boundary of the box is inside it.

    Parameters
    ----------
    bounds_lo, bounds_hi : ArrayLike
        Corners of the state space.

    obstacles : Iterable[AabbObstacle]
        The obstacles. Each must intersect the bounds.
    """

    def __init__(self, bounds_lo: ArrayLike, bounds_hi: ArrayLike, obstacles: Iterable[AabbObstacle] = ()):
        self.bounds_lo: StateVec = _parse_state(bounds_lo)
        self.bounds_hi: StateVec = _parse_state(bounds_hi, self.bounds_lo.size)
        if np.any(self.bounds_lo >= self.bounds_hi):
            raise InvalidInputError("bounds_lo must be strictly below bounds_hi on every axis")

        self.obstacles: Tuple[AabbObstacle, ...] = tuple(obstacles)
        for obstacle in self.obstacles:
            if obstacle.dimension != self.dimension:
                raise DimensionMismatchError(self.dimension, obstacle.dimension)
            if np.any(obstacle.lo > self.bounds_hi) or np.any(obstacle.hi < self.bounds_lo):
                raise InvalidInputError(f"Obstacle {obstacle.lo.tolist()}-{obstacle.hi.tolist()} is outside the bounds")

        n = self.dimension
        self._lo = np.array([o.lo for o in self.obstacles]).reshape(-1, n)
        self._hi = np.array([o.hi for o in self.obstacles]).reshape(-1, n)

    @property
    def dimension(self) -> int:
        return self.bounds_lo.size

    def __repr__(self):
        return f"{self.__class__.__name__}(dimension={self.dimension}, obstacles={len(self.obstacles)})"

    def _in_bounds(self, x: StateVec) -> bool:
        return bool(np.all(x >= self.bounds_lo) and np.all(x <= self.bounds_hi))

    @state_parser(1)
    def is_state_free(self, x: ArrayLike) -> bool:
        """True iff x is within the bounds and outside every closed obstacle"""

        if x.size != self.dimension:
            raise DimensionMismatchError(self.dimension, x.size)
        if not self._in_bounds(x):
            return False
        inside = np.all((x >= self._lo) & (x <= self._hi), axis=1)
        return not bool(np.any(inside))

    @state_parser(1, 2)
    def is_segment_free(self, a: ArrayLike, b: ArrayLike) -> bool:
        """True iff the closed segment [a, b] stays within the bounds and touches no obstacle

        Exact slab test: for each box the segment parameters inside every slab are intersected,
        and a non-empty (possibly zero-width) intersection with [0, 1] is a collision.
        """

        if a.size != self.dimension:
            raise DimensionMismatchError(self.dimension, a.size)
        if not (self._in_bounds(a) and self._in_bounds(b)):
            return False
        if not self.obstacles:
            return True

        # fixed endpoint order makes the test exactly symmetric
        if tuple(b) < tuple(a):
            a, b = b, a

        direction = b - a
        parallel = direction == 0
        with np.errstate(divide="ignore", invalid="ignore"):
            t_lo = (self._lo - a) / direction
            t_hi = (self._hi - a) / direction
        t_near = np.minimum(t_lo, t_hi)
        t_far = np.maximum(t_lo, t_hi)

        if np.any(parallel):
            inside_slab = (a >= self._lo) & (a <= self._hi)
            t_near = np.where(parallel, np.where(inside_slab, -np.inf, np.inf), t_near)
            t_far = np.where(parallel, np.where(inside_slab, np.inf, -np.inf), t_far)

        t_enter = np.maximum(t_near.max(axis=1), 0.0)
        t_exit = np.minimum(t_far.min(axis=1), 1.0)
        return not bool(np.any(t_enter <= t_exit))

    def to_dict(self) -> dict:
        return {
            "dimension": self.dimension,
            "bounds_lo": self.bounds_lo.tolist(),
            "bounds_hi": self.bounds_hi.tolist(),
            "obstacles": [{"lo": o.lo.tolist(), "hi": o.hi.tolist()} for o in self.obstacles],
        }

    @classmethod
    def from_dict(cls, data: dict) -> World:
        obstacles = [AabbObstacle(o["lo"], o["hi"]) for o in data.get("obstacles", [])]
        world = cls(data["bounds_lo"], data["bounds_hi"], obstacles)
        if world.dimension != data.get("dimension", world.dimension):
            raise DimensionMismatchError(data["dimension"], world.dimension)
        return world


def problem_to_dict(problem: ProblemDef) -> dict:
    world = problem.world if problem.world is not None else World(problem.bounds_lo, problem.bounds_hi)
    data = world.to_dict()
    data["x_start"] = problem.x_start.tolist()
    data["x_goal"] = problem.x_goal.tolist()
    data["r_goal"] = problem.r_goal
    return data


def problem_from_dict(data: dict) -> ProblemDef:
    return ProblemDef.from_world(World.from_dict(data), data["x_start"], data["x_goal"], data["r_goal"])


def problem_to_json(problem: ProblemDef) -> str:
    """Serializes a problem and its world. Floats are written with repr and read back exactly."""

    return json.dumps(problem_to_dict(problem), sort_keys=True, indent=1)


def problem_from_json(text: str) -> ProblemDef:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise InvalidInputError(f"World document could not be parsed: {e}")
    return problem_from_dict(data)


def save_problem(problem: ProblemDef, file_path: str | pathlib.Path) -> pathlib.Path:
    file_path = pathlib.Path(file_path)
    file_path.write_text(problem_to_json(problem), encoding="utf-8")
    return file_path


def load_problem(file_path: str | pathlib.Path) -> ProblemDef:
    file_path = pathlib.Path(file_path)
    if not file_path.exists():
        raise InvalidInputError(f"File not found: {file_path}")
    return problem_from_json(file_path.read_text(encoding="utf-8"))


def world_hash(problem: ProblemDef) -> str:
    """SHA-256 of the canonical serialization of a problem"""

    canonical = json.dumps(problem_to_dict(problem), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def _check_positive(**params):
    for name, value in params.items():
        if not value > 0:
            raise InvalidInputError(f"{name} must be positive, got {value!r}")


def wall_world(
    n: int, l: float, d: float, w: float, h: float, wall_offset: float = 0.0, r_goal: float = None
) -> Tuple[World, ProblemDef]:
    """Start and goal on either side of a single wall

    The map is the box [−l/2, l/2]^n. Start and goal are at ∓d/2 on the first axis.
    The wall is centred on the first axis with thickness w, and spans h on every other axis,
    centred at wall_offset on the second axis. Parts of the wall beyond the map are cut off.

    Parameters
    ----------
    n : int
        Dimension, at least 2.

    l : float
        Map width.

    d : float
        Distance between start and goal, at most l.

    w : float
        Wall thickness along the start-goal axis, below d.

    h : float
        Wall extent perpendicular to the start-goal axis.

    wall_offset : float, default 0.0
        Position of the wall centre on the second axis. The wall must still cross the
        start-goal segment, i.e. |wall_offset| <= h/2.

    Raises
    ------
    InvalidInputError
        If a parameter is out of range or the wall seals the map.
    """

    _check_positive(l=l, d=d, w=w, h=h)
    if n < 2:
        raise UnsupportedDimensionError("wall_world", n, range(2, 100))
    if not w < d:
        raise InvalidInputError(f"Wall thickness {w} must be below the start-goal distance {d}")
    if d > l:
        raise InvalidInputError(f"Start-goal distance {d} does not fit in a map of width {l}")
    if abs(wall_offset) > h / 2:
        raise InvalidInputError("The wall must cross the straight line between start and goal")

    half = l / 2
    wall_lo = np.full(n, max(-h / 2, -half))
    wall_hi = np.full(n, min(h / 2, half))
    wall_lo[0], wall_hi[0] = -w / 2, w / 2
    wall_lo[1], wall_hi[1] = max(wall_offset - h / 2, -half), min(wall_offset + h / 2, half)

    open_above = wall_offset + h / 2 < half
    open_below = wall_offset - h / 2 > -half
    open_elsewhere = n > 2 and h < l
    if not (open_above or open_below or open_elsewhere):
        raise InvalidInputError("The wall seals the map, no path exists")

    world = World(np.full(n, -half), np.full(n, half), [AabbObstacle(wall_lo, wall_hi)])
    x_start = np.zeros(n)
    x_goal = np.zeros(n)
    x_start[0], x_goal[0] = -d / 2, d / 2
    return world, ProblemDef.from_world(world, x_start, x_goal, r_goal)


def _corner_route_cost(d: float, w: float, y: float) -> float:
    """Start to the near wall corner at height y, along the wall face, then to the goal"""

    return 2 * math.hypot((d - w) / 2, y) + w


def analytic_optimum_wall(n: int, l: float, d: float, w: float, h: float, wall_offset: float = 0.0) -> Cost:
    """Exact shortest path cost around the wall of wall_world in 2D

    The shortest path is the tight polyline through the two wall corners on the cheaper open
    side. A side whose corner lies on or beyond the map boundary is closed.

    Raises
    ------
    UnsupportedDimensionError
        If n is not 2.
    """

    if n != 2:
        raise UnsupportedDimensionError("analytic_optimum_wall", n, [2])
    _check_positive(l=l, d=d, w=w, h=h)

    routes = []
    for corner in (wall_offset + h / 2, wall_offset - h / 2):
        if abs(corner) < l / 2:
            routes.append(_corner_route_cost(d, w, corner))
    if not routes:
        return Cost.infinite()
    return Cost(min(routes))


def _validate_gap(h: float, h_g: float, y_g: float, w: float, d: float, l: float):
    _check_positive(h=h, h_g=h_g, w=w, d=d, l=l)
    if h_g > h:
        raise InvalidInputError(f"Gap height {h_g} exceeds the wall extent {h}")
    if abs(y_g) + h_g / 2 > h / 2:
        raise InvalidInputError(f"Gap at {y_g} of height {h_g} is outside the wall of extent {h}")
    if not w < d:
        raise InvalidInputError(f"Wall thickness {w} must be below the start-goal distance {d}")
    if d > l:
        raise InvalidInputError(f"Start-goal distance {d} does not fit in a map of width {l}")
    if not h < l:
        raise InvalidInputError(f"Wall extent {h} must be below the map width {l} to leave both flanks open")


def gap_world(
    n: int = 2,
    h: float = 100.0,
    h_g: float = 5.0,
    y_g: float = 3.0,
    w: float = 10.0,
    d: float = 100.0,
    l: float = 200.0,
    r_goal: float = None,
) -> Tuple[World, ProblemDef]:
    """A wall with a narrow gap between start and goal

    Same frame as wall_world. The wall of extent h is split into two boxes leaving an opening
    of height h_g centred at y_g on the second axis. Both flanks stay open.

    Raises
    ------
    InvalidInputError
        If the gap is not inside the wall or the geometry is out of range.
    """

    if n != 2:
        raise UnsupportedDimensionError("gap_world", n, [2])
    _validate_gap(h, h_g, y_g, w, d, l)

    obstacles = []
    if y_g - h_g / 2 > -h / 2:
        obstacles.append(AabbObstacle([-w / 2, -h / 2], [w / 2, y_g - h_g / 2]))
    if y_g + h_g / 2 < h / 2:
        obstacles.append(AabbObstacle([-w / 2, y_g + h_g / 2], [w / 2, h / 2]))

    world = World([-l / 2, -l / 2], [l / 2, l / 2], obstacles)
    return world, ProblemDef.from_world(world, [-d / 2, 0.0], [d / 2, 0.0], r_goal)


def flanking_cost(h: float, w: float, d: float) -> Cost:
    """Cost of the shortest path around either end of the centred wall of gap_world"""

    _check_positive(h=h, w=w, d=d)
    return Cost(_corner_route_cost(d, w, h / 2))


def through_gap_cost(h_g: float, y_g: float, w: float, d: float) -> Cost:
    """Cost of the shortest path through the gap of gap_world"""

    gap_lo, gap_hi = y_g - h_g / 2, y_g + h_g / 2
    if gap_lo <= 0 <= gap_hi:
        return Cost(d)
    nearest_edge = gap_lo if gap_lo > 0 else gap_hi
    return Cost(_corner_route_cost(d, w, nearest_edge))


def analytic_optimum_gap(h: float, h_g: float, y_g: float, w: float, d: float, l: float = 200.0) -> Cost:
    """Exact shortest path cost of gap_world: the cheaper of the gap and the flanks"""

    _validate_gap(h, h_g, y_g, w, d, l)
    return min(through_gap_cost(h_g, y_g, w, d), flanking_cost(h, w, d))


@dataclass
class RandomWorldSpec:
    """Parameters of a random world

    Parameters
    ----------
    dimension : int
        State dimension.

    seed : int
        Seed of the generator. Equal specs produce identical worlds.

    obstacle_count : int
        Number of boxes.

    size_range : Tuple[float, float]
        Edge lengths are drawn uniformly from this range, independently per axis.

    start, goal : Sequence[float], optional
        Defaults to the points at 10% and 90% of the map on every axis.

    width : float, default 100.0
        The map is [0, width]^n.

    r_goal : float, optional
        Goal radius. Boxes within r_goal of the start or the goal are redrawn.
    """

    dimension: int
    seed: int
    obstacle_count: int = 30
    size_range: Tuple[float, float] = (5.0, 20.0)
    start: Sequence[float] = None
    goal: Sequence[float] = None
    width: float = 100.0
    r_goal: float = None
    grid_cells: dict = field(default_factory=lambda: {2: 100, 3: 30})

    def __post_init__(self):
        if int(self.dimension) != self.dimension or self.dimension < 1:
            raise InvalidInputError(f"Dimension must be a positive integer, got {self.dimension!r}")
        if self.obstacle_count < 0:
            raise InvalidInputError("obstacle_count cannot be negative")
        lo, hi = self.size_range
        if not 0 < lo <= hi < self.width:
            raise InvalidInputError(f"size_range {self.size_range} must satisfy 0 < min <= max < width")
        if self.start is None:
            self.start = [0.1 * self.width] * self.dimension
        if self.goal is None:
            self.goal = [0.9 * self.width] * self.dimension


def _grid_connected(world: World, x_start: StateVec, x_goal: StateVec, cells: int) -> bool:
    """Conservative connectivity check on a grid of closed cells

    A cell is free only if it touches no obstacle, so a chain of face-adjacent free cells from
    the start cell to the goal cell certifies a collision-free path.
    """

    n = world.dimension
    step = (world.bounds_hi - world.bounds_lo) / cells
    blocked = np.zeros((cells,) * n, dtype=bool)
    for lo, hi in zip(world._lo, world._hi):
        i_min = np.clip(np.ceil((lo - world.bounds_lo) / step - 1), 0, cells - 1).astype(int)
        i_max = np.clip(np.floor((hi - world.bounds_lo) / step), 0, cells - 1).astype(int)
        blocked[tuple(slice(a, b + 1) for a, b in zip(i_min, i_max))] = True

    def cell_of(x):
        return tuple(np.clip(np.floor((x - world.bounds_lo) / step), 0, cells - 1).astype(int))

    start, goal = cell_of(x_start), cell_of(x_goal)
    if blocked[start] or blocked[goal]:
        return False

    seen = np.zeros_like(blocked)
    seen[start] = True
    queue = deque([start])
    while queue:
        cell = queue.popleft()
        if cell == goal:
            return True
        for axis in range(n):
            for delta in (-1, 1):
                nxt = list(cell)
                nxt[axis] += delta
                nxt = tuple(nxt)
                if 0 <= nxt[axis] < cells and not blocked[nxt] and not seen[nxt]:
                    seen[nxt] = True
                    queue.append(nxt)
    return False


def _draw_obstacles(
    spec: RandomWorldSpec, rng: np.random.Generator, keep_clear: List[Tuple[StateVec, float]]
) -> List[AabbObstacle] | None:
    n = spec.dimension
    obstacles = []
    for _ in range(spec.obstacle_count):
        for _ in range(PyinformedOptions.obstacle_retries):
            edges = rng.uniform(spec.size_range[0], spec.size_range[1], n)
            lo = rng.uniform(0.0, spec.width - edges)
            candidate = AabbObstacle(lo, lo + edges)
            if all(candidate.distance_to(x) > radius for x, radius in keep_clear):
                obstacles.append(candidate)
                break
        else:
            return None
    return obstacles


def random_world(spec: RandomWorldSpec) -> Tuple[World, ProblemDef]:
    """Random axis-aligned boxes between a start and a goal

    Deterministic in spec.seed. Boxes within r_goal of the start or the goal are redrawn.
    In 2 and 3 dimensions the world is accepted only when a conservative grid connectivity
    check certifies a path; otherwise it is regenerated. Higher dimensions are not certified
    here (see bench, which retries on planner failure).

    Raises
    ------
    WorldGenerationError
        If no acceptable world was generated within PyinformedOptions.world_retries attempts.
    """

    n = spec.dimension
    x_start = _parse_state(spec.start, n)
    x_goal = _parse_state(spec.goal, n)
    bounds_lo, bounds_hi = np.zeros(n), np.full(n, float(spec.width))

    # validates start, goal and r_goal before any drawing
    empty = ProblemDef(bounds_lo, bounds_hi, x_start, x_goal, spec.r_goal)
    keep_clear = [(empty.x_start, empty.r_goal), (empty.x_goal, empty.r_goal)]

    rng = np.random.default_rng(spec.seed)
    attempts = PyinformedOptions.world_retries
    for attempt in range(1, attempts + 1):
        obstacles = _draw_obstacles(spec, rng, keep_clear)
        if obstacles is None:
            continue
        world = World(bounds_lo, bounds_hi, obstacles)
        if not (world.is_state_free(x_start) and world.is_state_free(x_goal)):
            continue
        cells = spec.grid_cells.get(n)
        if cells is not None and not _grid_connected(world, x_start, x_goal, cells):
            continue
        if attempt > 1:
            warnings.warn(f"Random world for seed {spec.seed} was accepted on attempt {attempt}")
        return world, ProblemDef.from_world(world, x_start, x_goal, empty.r_goal)

    raise WorldGenerationError(spec.seed, attempts)
