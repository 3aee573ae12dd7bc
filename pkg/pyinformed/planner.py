from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass, field
from enum import Enum
from typing import List, Literal, NamedTuple, Sequence, Tuple

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .core import Cost, PathSeq, ProblemDef, StateVec, _heuristic_values, state_parser
from .exceptions import InvalidInputError, NoSolutionError, TreeConsistencyError
from .neighbors import NearestNeighborIndex, VertexId
from .sampling import InformedSampler, phs_measure, unit_ball_measure
from .utils import PyinformedOptions, _resolve_rng

logger = logging.getLogger(__name__)

PLANNER_MODES = ("rrt_star", "informed_rrt_star")
NEIGHBORHOODS = ("radius", "informed_set")


class TerminationReason(Enum):
    MAX_ITERATIONS = "max_iterations"
    TIME_BUDGET = "time_budget"
    TARGET_COST = "target_cost"
    OPTIMUM_REACHED = "optimum_reached"
    POST_SOLUTION_BUDGET = "post_solution_budget"


class CostEvent(NamedTuple):
    iteration: int
    elapsed: float
    cost: float


class Tree:
    """The planner graph: vertex states, parent links and cost-to-come

    The root has id 0, is its own parent and has cost 0. Edge lengths are stored so that a
    rewire can push the cost change down to every descendant.

    Parameters
    ----------
    root : ArrayLike
        The start state.

    capacity : int, default 1024
        Initial size of the arrays.
    """

    def __init__(self, root: ArrayLike, capacity: int = 1024):
        root = np.asarray(root, dtype=np.float64)
        self.dimension = root.size
        self._states = np.empty((capacity, self.dimension))
        self._parent = np.empty(capacity, dtype=np.int64)
        self._cost = np.empty(capacity)
        self._edge = np.empty(capacity)
        self._children: List[List[VertexId]] = []
        self.size = 0

        self._append(root, 0, 0.0, 0.0)

    def __len__(self) -> int:
        return self.size

    def _grow(self):
        capacity = 2 * self._states.shape[0]
        for name in ("_states", "_parent", "_cost", "_edge"):
            old = getattr(self, name)
            new = np.empty((capacity,) + old.shape[1:], dtype=old.dtype)
            new[: self.size] = old[: self.size]
            setattr(self, name, new)

    def _append(self, x: StateVec, parent: VertexId, cost: float, edge: float) -> VertexId:
        if self.size == self._states.shape[0]:
            self._grow()
        v = self.size
        self._states[v] = x
        self._parent[v] = parent
        self._cost[v] = cost
        self._edge[v] = edge
        self._children.append([])
        self.size += 1
        return v

    def add_vertex(self, x: StateVec, parent: VertexId) -> VertexId:
        edge = float(np.linalg.norm(x - self._states[parent]))
        v = self._append(x, parent, self._cost[parent] + edge, edge)
        self._children[parent].append(v)
        return v

    def rewire(self, child: VertexId, new_parent: VertexId) -> float:
        """Makes new_parent the parent of child and updates the costs of its subtree

        Returns the cost reduction of child.
        """

        old_cost = self._cost[child]
        self._children[self._parent[child]].remove(child)
        self._children[new_parent].append(child)
        self._parent[child] = new_parent
        self._edge[child] = float(np.linalg.norm(self._states[child] - self._states[new_parent]))
        self._cost[child] = self._cost[new_parent] + self._edge[child]

        stack = list(self._children[child])
        while stack:
            v = stack.pop()
            self._cost[v] = self._cost[self._parent[v]] + self._edge[v]
            stack.extend(self._children[v])
        return old_cost - self._cost[child]

    @property
    def states(self) -> NDArray[np.float64]:
        return self._states[: self.size]

    @property
    def parents(self) -> NDArray[np.int64]:
        return self._parent[: self.size]

    @property
    def costs(self) -> NDArray[np.float64]:
        return self._cost[: self.size]

    def state(self, v: VertexId) -> StateVec:
        return self._states[v]

    def parent(self, v: VertexId) -> VertexId:
        return int(self._parent[v])

    def cost_to_come(self, v: VertexId) -> Cost:
        return Cost(float(self._cost[v]))

    def path_to_root(self, v: VertexId) -> List[VertexId]:
        """Vertex ids from the root to v"""

        path = [v]
        while path[-1] != 0:
            path.append(int(self._parent[path[-1]]))
            if len(path) > self.size:
                raise TreeConsistencyError(f"Parent links from vertex {v} contain a cycle")
        return path[::-1]

    def snapshot(self) -> Tree:
        """A copy of the tree that later planning does not change"""

        copy = Tree.__new__(Tree)
        copy.dimension = self.dimension
        copy.size = self.size
        copy._states = self._states[: self.size].copy()
        copy._parent = self._parent[: self.size].copy()
        copy._cost = self._cost[: self.size].copy()
        copy._edge = self._edge[: self.size].copy()
        copy._children = [list(c) for c in self._children]
        return copy

    def check_consistency(self, problem: ProblemDef, tolerance: float = None) -> None:
        """Checks parent-link acyclicity, the cost recursion and collision-free edges

        The cost recursion must hold to the absolute tolerance, PyinformedOptions.tree_tolerance
        by default, whatever the magnitude of the cost.

        Raises
        ------
        TreeConsistencyError
            On the first violated invariant.
        """

        if tolerance is None:
            tolerance = PyinformedOptions.tree_tolerance
        if self._parent[0] != 0 or self._cost[0] != 0:
            raise TreeConsistencyError("The root must be its own parent with cost 0")

        for v in range(1, self.size):
            self.path_to_root(v)
            p = self._parent[v]
            edge = np.linalg.norm(self._states[v] - self._states[p])
            if abs(self._cost[v] - (self._cost[p] + edge)) > tolerance:
                raise TreeConsistencyError(f"Cost-to-come of vertex {v} does not match its parent {p}")
            if not problem.is_segment_free(self._states[p], self._states[v]):
                raise TreeConsistencyError(f"Edge {p} -> {v} is in collision")


@dataclass
class PlannerConfig:
    """Settings of one planner run

    Parameters
    ----------
    mode : 'rrt_star' | 'informed_rrt_star'
        rrt_star always samples the whole state space. informed_rrt_star samples the
        informed set once a solution exists.

    gamma_factor : float, default PyinformedOptions.gamma_factor
        Multiple of the lower bound on the rewiring constant, at least 1.

    eta : 'equal_to_rewire_radius' | float
        Steer distance. By default the rewiring radius of each iteration.

    max_iterations : int, optional
        Iteration limit.

    time_budget : float, optional
        Wall-clock limit in seconds.

    seed : int, optional
        Seed of the run's random source.

    target_cost : float, optional
        The run stops once the best cost is at or below this value.

    checkpoint_schedule : Sequence[int], optional
        Iterations at which the best cost is recorded even if it has not changed.

    sample_informed, rewire_informed : bool, optional
        Override the use of informed sampling and of the informed rewiring radius.
        None follows the mode. In informed mode, setting both to False reproduces rrt_star.

    iterations_after_solution, time_after_solution : optional
        Budgets counted from the first solution.

    record_samples : bool, default False
        Keep every sample with the c_max it was drawn with.

    neighborhood : 'radius' | 'informed_set', default 'radius'
        Near vertices of each iteration. 'radius' uses the shrinking rewiring radius.
        'informed_set' applies once a solution exists and rewiring is informed: the radius, and
        so the default steer distance, is c_best, the diameter of the informed set, and the near
        vertices are the tree vertices inside the informed set within that radius. Without
        obstacles this lets every new vertex connect straight to the start.
    """

    mode: Literal["rrt_star", "informed_rrt_star"] = "informed_rrt_star"
    gamma_factor: float = None
    eta: Literal["equal_to_rewire_radius"] | float = "equal_to_rewire_radius"
    max_iterations: int = None
    time_budget: float = None
    seed: int = None
    target_cost: float = None
    checkpoint_schedule: Sequence[int] = ()
    sample_informed: bool = None
    rewire_informed: bool = None
    iterations_after_solution: int = None
    time_after_solution: float = None
    record_samples: bool = False
    neighborhood: Literal["radius", "informed_set"] = "radius"

    def __post_init__(self):
        if self.mode not in PLANNER_MODES:
            raise InvalidInputError(f"Invalid planner mode {self.mode!r}. Valid modes are {PLANNER_MODES}")
        if self.neighborhood not in NEIGHBORHOODS:
            raise InvalidInputError(f"Invalid neighborhood {self.neighborhood!r}. Valid values are {NEIGHBORHOODS}")
        if self.gamma_factor is None:
            self.gamma_factor = PyinformedOptions.gamma_factor
        if self.gamma_factor < 1:
            raise InvalidInputError(f"gamma_factor must be at least 1, got {self.gamma_factor!r}")
        if self.eta != "equal_to_rewire_radius" and not (isinstance(self.eta, (int, float)) and self.eta > 0):
            raise InvalidInputError(f"eta must be 'equal_to_rewire_radius' or a positive number, got {self.eta!r}")
        if self.max_iterations is None and self.time_budget is None:
            raise InvalidInputError("At least one of max_iterations or time_budget is required")
        if self.target_cost is not None:
            self.target_cost = float(self.target_cost)

        informed = self.mode == "informed_rrt_star"
        if self.sample_informed is None:
            self.sample_informed = informed
        if self.rewire_informed is None:
            self.rewire_informed = informed
        self.checkpoint_schedule = tuple(sorted(set(self.checkpoint_schedule)))


@dataclass
class PlanResult:
    """Outcome of one planner run

    best_cost is the minimum over the solution set of cost-to-come plus the length of the
    straight connection from the solution vertex to x_goal.
    """

    problem: ProblemDef
    config: PlannerConfig
    tree: Tree
    solutions: List[VertexId]
    best_vertex: VertexId | None
    best_cost: Cost
    events: List[CostEvent]
    termination: TerminationReason
    iterations: int
    elapsed: float
    first_solution_iteration: int | None = None
    first_solution_vertex_count: int | None = None
    samples: List[Tuple[StateVec, float]] = field(default_factory=list)

    @property
    def has_solution(self) -> bool:
        return self.best_vertex is not None

    @property
    def best_path(self) -> PathSeq:
        return extract_path(self)


@state_parser(0, 1)
def steer(x_from: ArrayLike, x_to: ArrayLike, eta: float) -> StateVec:
    """x_to if it is within eta of x_from, otherwise the point at distance eta towards x_to"""

    if not eta > 0:
        raise InvalidInputError(f"eta must be positive, got {eta!r}")
    return _steer(x_from, x_to, eta)


def _steer(x_from: StateVec, x_to: StateVec, eta: float) -> StateVec:
    delta = x_to - x_from
    distance = np.linalg.norm(delta)
    if distance <= eta:
        return x_to.copy()
    return x_from + delta * (eta / distance)


def rewiring_radius(
    num_vertices: int, domain_measure: float, n: int, gamma_factor: float, max_radius: float = math.inf
) -> float:
    """Radius of the near-vertex neighbourhood

    gamma_factor·2·(1 + 1/n)^(1/n)·(measure/ζ_n)^(1/n)·(log m/m)^(1/n) for m >= 2 vertices.
    With fewer than two vertices the radius is max_radius, the diameter of the bounds box.

    Parameters
    ----------
    num_vertices : int
        m, the number of vertices the radius is computed for.

    domain_measure : float
        Measure of the sampled domain: the bounds box, or the informed set.

    n : int
        State dimension.

    gamma_factor : float
        Multiple of the lower bound, at least 1 for asymptotic optimality.

    max_radius : float
        Radius returned for m < 2.

    Raises
    ------
    InvalidInputError
        If domain_measure is not positive.
    """

    if not domain_measure > 0:
        raise InvalidInputError(f"Domain measure must be positive, got {domain_measure!r}")
    if num_vertices < 2:
        return max_radius

    gamma = 2 * (1 + 1 / n) ** (1 / n) * (domain_measure / unit_ball_measure(n)) ** (1 / n)
    return gamma_factor * gamma * (math.log(num_vertices) / num_vertices) ** (1 / n)


class _InformedRRTStar:
    """State of one planner run. Use plan()."""

    def __init__(self, problem: ProblemDef, config: PlannerConfig):
        self.problem = problem
        self.config = config
        self.rng = _resolve_rng(config.seed)
        self.sampler = InformedSampler.from_problem(problem)
        self.n = problem.dimension
        self.c_min = problem.c_min

        self.tree = Tree(problem.x_start)
        self.index = NearestNeighborIndex(self.n)
        self.index.insert(problem.x_start, 0)
        # f̂ of every vertex, indexed by vertex id
        self._heuristic = np.empty(1024)
        self._heuristic[0] = float(_heuristic_values(problem.x_start, problem.x_start, problem.x_goal))

        self.solutions: List[VertexId] = []
        self._goal_edge: List[float] = []
        self.best_cost = math.inf
        self.best_vertex: VertexId = None
        self.informed_count = 1
        self.events: List[CostEvent] = []
        self.samples: List[Tuple[StateVec, float]] = []
        self.first_solution_iteration: int = None
        self.first_solution_vertex_count: int = None

        if problem.in_goal_region(problem.x_start):
            self._try_add_solution(0)
            self._update_best(0, 0.0)

    def _try_add_solution(self, v: VertexId) -> None:
        x = self.tree.state(v)
        if self.problem.is_segment_free(x, self.problem.x_goal):
            self.solutions.append(v)
            self._goal_edge.append(float(np.linalg.norm(self.problem.x_goal - x)))

    def _update_best(self, iteration: int, elapsed: float) -> bool:
        if not self.solutions:
            return False
        costs = self.tree.costs[self.solutions] + np.asarray(self._goal_edge)
        k = int(np.argmin(costs))
        if costs[k] >= self.best_cost:
            return False

        if self.best_vertex is None:
            self.first_solution_iteration = iteration
            self.first_solution_vertex_count = self.tree.size
        self.best_cost = float(costs[k])
        self.best_vertex = self.solutions[k]
        self.events.append(CostEvent(iteration, elapsed, self.best_cost))
        self.informed_count = int(np.count_nonzero(self._heuristic[: self.tree.size] <= self.best_cost))
        logger.debug("Iteration %d: best cost %.12g", iteration, self.best_cost)
        return True

    def _append_heuristic(self, v: VertexId, x: StateVec) -> None:
        if v == self._heuristic.size:
            self._heuristic = np.concatenate([self._heuristic, np.empty(v)])
        self._heuristic[v] = float(_heuristic_values(x, self.problem.x_start, self.problem.x_goal))
        if self._heuristic[v] <= self.best_cost:
            self.informed_count += 1

    @property
    def _informed_neighborhood(self) -> bool:
        return (
            self.config.neighborhood == "informed_set"
            and self.config.rewire_informed
            and self.best_vertex is not None
        )

    def _near(self, x: StateVec, radius: float) -> NDArray[np.int64]:
        near = np.asarray(self.index.near(x, radius), dtype=np.int64)
        if self._informed_neighborhood:
            near = near[self._heuristic[near] <= self.best_cost]
        return near

    def _choose_parent(self, x_new: StateVec, nearest: VertexId, near: NDArray[np.int64]) -> VertexId:
        """The near vertex giving x_new the lowest cost-to-come over a free edge

        Ties go to the earlier vertex of near. The nearest vertex is kept unless a candidate is
        strictly cheaper.
        """

        costs = self.tree.costs
        nearest_cost = costs[nearest] + np.linalg.norm(x_new - self.tree.state(nearest))
        candidates = costs[near] + np.linalg.norm(self.tree.states[near] - x_new, axis=1)
        for k in np.argsort(candidates, kind="stable"):
            if not candidates[k] < nearest_cost:
                break
            v = int(near[k])
            if self.problem.is_segment_free(self.tree.state(v), x_new):
                return v
        return nearest

    def _rewire(self, new: VertexId, near: NDArray[np.int64]) -> None:
        x_new = self.tree.state(new)
        costs = self.tree.costs
        distances = np.linalg.norm(self.tree.states[near] - x_new, axis=1)
        # rewiring only lowers costs, so this is a superset of the vertices that get rewired
        better = (distances > 0) & (costs[new] + distances < costs[near])
        for v, distance in zip(near[better], distances[better]):
            if costs[new] + distance < costs[v] and self.problem.is_segment_free(x_new, self.tree.state(v)):
                self.tree.rewire(int(v), new)

    def _radius(self) -> float:
        if self._informed_neighborhood:
            return self.best_cost
        measure = self.problem.bounds_measure
        m = self.tree.size
        if self.config.rewire_informed and self.best_vertex is not None:
            measure = min(measure, phs_measure(self.best_cost, self.c_min, self.n))
            m = self.informed_count
        if measure <= 0:
            return 0.0
        return rewiring_radius(m, measure, self.n, self.config.gamma_factor, self.problem.bounds_diameter)

    def _optimum_reached(self) -> bool:
        return self.best_cost - self.c_min <= PyinformedOptions.clamp_tolerance * self.c_min

    def iterate(self) -> bool:
        """One iteration of the main loop. Returns True if the tree changed."""

        c_max = self.best_cost if self.config.sample_informed else math.inf
        x_rand = self.sampler.sample(c_max, self.rng)
        if self.config.record_samples:
            self.samples.append((x_rand, c_max))

        nearest = self.index.nearest(x_rand)
        x_nearest = self.tree.state(nearest)
        radius = self._radius()
        eta = radius if self.config.eta == "equal_to_rewire_radius" else self.config.eta
        if not eta > 0:
            return False
        x_new = _steer(x_nearest, x_rand, eta)

        if not self.problem.is_segment_free(x_nearest, x_new):
            return False

        near = self._near(x_new, radius)
        parent = self._choose_parent(x_new, nearest, near)

        new = self.tree.add_vertex(x_new, parent)
        self.index.insert(x_new, new)
        self._append_heuristic(new, x_new)
        self._rewire(new, near)

        if self.problem.in_goal_region(x_new):
            self._try_add_solution(new)
        return True

    def run(self) -> PlanResult:
        config = self.config
        max_iterations = config.max_iterations if config.max_iterations is not None else math.inf
        time_budget = config.time_budget if config.time_budget is not None else math.inf
        checkpoints = list(config.checkpoint_schedule)
        solution_time = None

        start = time.perf_counter()
        iteration = 0
        termination = TerminationReason.MAX_ITERATIONS
        while True:
            if self.best_vertex is not None:
                if config.target_cost is not None and self.best_cost <= config.target_cost:
                    termination = TerminationReason.TARGET_COST
                    break
                if self._optimum_reached():
                    termination = TerminationReason.OPTIMUM_REACHED
                    break
                if solution_time is None:
                    solution_time = time.perf_counter() - start
                after_iterations = iteration - self.first_solution_iteration
                after_time = time.perf_counter() - start - solution_time
                if config.iterations_after_solution is not None and after_iterations >= config.iterations_after_solution:
                    termination = TerminationReason.POST_SOLUTION_BUDGET
                    break
                if config.time_after_solution is not None and after_time >= config.time_after_solution:
                    termination = TerminationReason.POST_SOLUTION_BUDGET
                    break
            if iteration >= max_iterations:
                termination = TerminationReason.MAX_ITERATIONS
                break
            if time.perf_counter() - start >= time_budget:
                termination = TerminationReason.TIME_BUDGET
                break

            iteration += 1
            if self.iterate():
                self._update_best(iteration, time.perf_counter() - start)
            while checkpoints and checkpoints[0] <= iteration:
                checkpoints.pop(0)
                self.events.append(CostEvent(iteration, time.perf_counter() - start, self.best_cost))

        elapsed = time.perf_counter() - start
        if not self.events or self.events[-1].iteration != iteration:
            self.events.append(CostEvent(iteration, elapsed, self.best_cost))

        return PlanResult(
            problem=self.problem,
            config=config,
            tree=self.tree.snapshot(),
            solutions=list(self.solutions),
            best_vertex=self.best_vertex,
            best_cost=Cost(self.best_cost),
            events=self.events,
            termination=termination,
            iterations=iteration,
            elapsed=elapsed,
            first_solution_iteration=self.first_solution_iteration,
            first_solution_vertex_count=self.first_solution_vertex_count,
            samples=self.samples,
        )


def plan(problem: ProblemDef, config: PlannerConfig) -> PlanResult:
    """Runs RRT* or Informed RRT* on a problem

    Stops after config.max_iterations iterations, config.time_budget seconds, once the best
    cost reaches config.target_cost or the theoretical minimum, or once a post-solution budget
    is spent, whichever comes first.

    Raises
    ------
    InvalidInputError
        If the start or the goal is not a free state of the problem.

    SamplingStalledError
        If the informed set could not be sampled inside the bounds.
    """

    if not (problem.is_state_free(problem.x_start) and problem.is_state_free(problem.x_goal)):
        raise InvalidInputError("Start and goal must be collision-free")
    return _InformedRRTStar(problem, config).run()


def extract_path(result: PlanResult) -> PathSeq:
    """The best path of a run: tree path from x_start to the best solution vertex, then x_goal

    x_goal is appended when the best solution vertex is not x_goal itself, so that the path cost
    equals result.best_cost.

    Raises
    ------
    NoSolutionError
        If the run found no solution.
    """

    if result.best_vertex is None:
        raise NoSolutionError("The run found no solution")

    tree = result.tree
    states = [tree.state(v) for v in tree.path_to_root(result.best_vertex)]
    if not np.array_equal(states[-1], result.problem.x_goal):
        states.append(result.problem.x_goal)
    return PathSeq(states)
