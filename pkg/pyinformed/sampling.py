from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy import special

from .core import Cost, ProblemDef, StateVec, _heuristic_values, state_parser
from .exceptions import (
    DegenerateGeometryError,
    InfeasibleCostError,
    InvalidInputError,
    SamplingStalledError,
)
from .utils import PyinformedOptions, _resolve_rng


def _check_dimension(n: int) -> int:
    if int(n) != n or n < 1:
        raise InvalidInputError(f"Dimension must be a positive integer, got {n!r}")
    return int(n)


def _clamp_cost(c_best: float, c_min: float) -> float:
    """Returns c_best, raised to c_min if it is below it only by floating-point noise"""

    c_best = float(c_best)
    if math.isnan(c_best) or math.isinf(c_best):
        raise InvalidInputError(f"The informed set needs a finite cost, got {c_best!r}")
    if c_best >= c_min:
        return c_best
    if c_best >= c_min - PyinformedOptions.clamp_tolerance * c_min:
        return c_min
    raise InfeasibleCostError(c_best, c_min)


def sample_unit_n_ball(rng: np.random.Generator | int, n: int, size: int = None) -> NDArray[np.float64]:
    """Uniform sample from the volume of the unit n-ball

    Normalised Gaussian vectors are uniform on the sphere; scaling by u^(1/n), u ~ U[0, 1],
    makes the radius distributed as P(‖x‖ ≤ r) = r^n.

    Parameters
    ----------
    rng : np.random.Generator | int
        Random source, or a seed for a new one.

    n : int
        Dimension of the ball.

    size : int, optional
        Number of samples. If None, a single sample of shape (n,) is returned,
        otherwise an array of shape (size, n).

    Returns
    -------
    NDArray[np.float64]
        The sample(s).
    """

    n = _check_dimension(n)
    rng = _resolve_rng(rng)

    if size is None:
        direction = rng.standard_normal(n)
        radius = rng.random() ** (1.0 / n)
        return radius * direction / np.linalg.norm(direction)

    directions = rng.standard_normal((size, n))
    radii = rng.random(size) ** (1.0 / n)
    return (radii / np.linalg.norm(directions, axis=1))[:, np.newaxis] * directions


@state_parser(0, 1)
def rotation_to_world_frame(x_start: ArrayLike, x_goal: ArrayLike) -> NDArray[np.float64]:
    """Rotation from the hyperspheroid-aligned frame to the world frame

    The first column of the rotation is the unit transverse axis a1 = (x_goal − x_start)/c_min.
    For M = a1·e1ᵀ the right singular vectors are the canonical basis (V = I), so only U is
    needed: its first column is a1 and the remaining columns are an orthonormal completion
    built by Gram-Schmidt over the canonical basis, skipping the vector most parallel to a1.
    The last column is then multiplied by det(U)·det(V) so that the result is in SO(n).

    For n = 1 no proper rotation can map e1 to −e1, and C = [[a1]] is returned.

    Raises
    ------
    DegenerateGeometryError
        If the start and goal coincide.
    """

    transverse = x_goal - x_start
    c_min = np.linalg.norm(transverse)
    if c_min == 0:
        raise DegenerateGeometryError("The foci coincide, the transverse axis is undefined")

    a1 = transverse / c_min
    n = a1.size
    skip = int(np.argmax(np.abs(a1)))

    basis = [a1]
    for k in range(n):
        if k == skip:
            continue
        v = np.zeros(n)
        v[k] = 1.0
        # two passes keep the columns orthogonal to 1e-15
        for _ in range(2):
            for b in basis:
                v = v - np.dot(v, b) * b
        basis.append(v / np.linalg.norm(v))

    rotation = np.column_stack(basis)
    if n > 1:
        rotation[:, -1] *= np.sign(np.linalg.det(rotation))
    rotation.flags.writeable = False
    return rotation


@dataclass(frozen=True, eq=False)
class ProlateHyperspheroid:
    """The informed set: states whose heuristic cost does not exceed c_best

    Use phs_new to create one. The rotation and the centre depend only on the foci;
    with_cost reuses them and only recomputes the radii.
    """

    x_start_focus: StateVec
    x_goal_focus: StateVec
    c_min: float
    c_best: float
    x_centre: StateVec
    rotation: NDArray[np.float64]
    radii: NDArray[np.float64]

    @property
    def dimension(self) -> int:
        return self.x_centre.size

    @property
    def transverse_axis(self) -> StateVec:
        return self.rotation[:, 0]

    @property
    def is_degenerate(self) -> bool:
        return self.dimension > 1 and self.radii[1] == 0

    @property
    def measure(self) -> float:
        return phs_measure(self.c_best, self.c_min, self.dimension)

    def with_cost(self, c_best: float | Cost) -> ProlateHyperspheroid:
        """Returns the hyperspheroid with the same foci and a new transverse diameter"""

        c_best = _clamp_cost(float(c_best), self.c_min)
        return ProlateHyperspheroid(
            self.x_start_focus,
            self.x_goal_focus,
            self.c_min,
            c_best,
            self.x_centre,
            self.rotation,
            _radii(c_best, self.c_min, self.dimension),
        )

    def contains(self, x: ArrayLike, tolerance: float = 1e-9) -> bool:
        x = np.asarray(x, dtype=np.float64)
        return bool(_heuristic_values(x, self.x_start_focus, self.x_goal_focus) <= self.c_best + tolerance)


def _radii(c_best: float, c_min: float, n: int) -> NDArray[np.float64]:
    radii = np.full(n, math.sqrt(c_best**2 - c_min**2) / 2)
    radii[0] = c_best / 2
    radii.flags.writeable = False
    return radii


@state_parser(0, 1)
def phs_new(
    x_start: ArrayLike, x_goal: ArrayLike, c_best: float | Cost, rotation: NDArray[np.float64] = None
) -> ProlateHyperspheroid:
    """Create the prolate hyperspheroid with foci x_start, x_goal and transverse diameter c_best

    Parameters
    ----------
    x_start, x_goal : ArrayLike
        The foci.

    c_best : float | Cost
        The transverse diameter. Values below c_min by less than
        PyinformedOptions.clamp_tolerance·c_min are raised to c_min.

    rotation : NDArray, optional
        A rotation already computed for these foci. Computed if not given.

    Raises
    ------
    DegenerateGeometryError
        If the foci coincide.

    InfeasibleCostError
        If c_best is below c_min by more than the clamp tolerance.
    """

    if rotation is None:
        rotation = rotation_to_world_frame(x_start, x_goal)
    c_min = float(np.linalg.norm(x_goal - x_start))
    c_best = _clamp_cost(float(c_best), c_min)

    x_centre = (x_start + x_goal) / 2
    x_centre.flags.writeable = False
    return ProlateHyperspheroid(
        x_start, x_goal, c_min, c_best, x_centre, rotation, _radii(c_best, c_min, x_start.size)
    )


def phs_sample(phs: ProlateHyperspheroid, rng: np.random.Generator | int, size: int = None) -> NDArray[np.float64]:
    """Uniform sample from the volume of a prolate hyperspheroid: x = C·L·x_ball + x_centre"""

    x_ball = sample_unit_n_ball(rng, phs.dimension, size)
    if size is None:
        return phs.rotation @ (phs.radii * x_ball) + phs.x_centre
    return (x_ball * phs.radii) @ phs.rotation.T + phs.x_centre


def rect_rejection_sample(phs: ProlateHyperspheroid, rng: np.random.Generator | int) -> Tuple[StateVec, int]:
    """Uniform sample from a prolate hyperspheroid by rejection from its bounding hyperrectangle

    This is the baseline direct sampling replaces: the acceptance rate is ζ_n/2^n,
    which falls below 8% at n = 6.

    Returns
    -------
    Tuple[StateVec, int]
        The sample and the number of draws it took.

    Raises
    ------
    SamplingStalledError
        If no draw was accepted within PyinformedOptions.max_sample_attempts.
    """

    rng = _resolve_rng(rng)
    n = phs.dimension
    for attempt in range(1, PyinformedOptions.max_sample_attempts + 1):
        local = rng.uniform(-1.0, 1.0, n) * phs.radii
        x = phs.rotation @ local + phs.x_centre
        if phs.contains(x):
            return x, attempt
    raise SamplingStalledError(PyinformedOptions.max_sample_attempts)


class InformedSampler:
    """Sampler of the informed set of one problem

    The rotation and centre of the informed set are computed once at construction.
    The hyperspheroid is rebuilt only when c_max changes.

    Parameters
    ----------
    x_start, x_goal : ArrayLike
        Foci of the informed set.

    bounds_lo, bounds_hi : ArrayLike
        Corners of the state space. Informed samples outside them are redrawn.
    """

    def __init__(self, x_start: ArrayLike, x_goal: ArrayLike, bounds_lo: ArrayLike, bounds_hi: ArrayLike):
        self._base = phs_new(x_start, x_goal, np.linalg.norm(np.subtract(x_goal, x_start)))
        self.bounds_lo = np.asarray(bounds_lo, dtype=np.float64)
        self.bounds_hi = np.asarray(bounds_hi, dtype=np.float64)
        self._phs: ProlateHyperspheroid = self._base
        self.rejections: int = 0

    @classmethod
    def from_problem(cls, problem: ProblemDef) -> InformedSampler:
        return cls(problem.x_start, problem.x_goal, problem.bounds_lo, problem.bounds_hi)

    @property
    def c_min(self) -> float:
        return self._base.c_min

    def informed_set(self, c_max: float | Cost) -> ProlateHyperspheroid:
        c_max = float(c_max)
        if c_max != self._phs.c_best:
            self._phs = self._base.with_cost(c_max)
        return self._phs

    def sample(self, c_max: float | Cost, rng: np.random.Generator) -> StateVec:
        """Uniform sample from the informed set intersected with the bounds

        With an infinite c_max the sample is uniform over the bounds box.
        """

        if math.isinf(float(c_max)):
            return rng.uniform(self.bounds_lo, self.bounds_hi)

        phs = self.informed_set(c_max)
        max_attempts = PyinformedOptions.max_sample_attempts
        for attempt in range(max_attempts):
            x = phs_sample(phs, rng)
            if np.all(x >= self.bounds_lo) and np.all(x <= self.bounds_hi):
                return x
            self.rejections += 1
        raise SamplingStalledError(max_attempts)


def sample(
    x_start: ArrayLike,
    x_goal: ArrayLike,
    c_max: float | Cost,
    domain: ProblemDef,
    rng: np.random.Generator | int,
) -> StateVec:
    """Draws one sample for a planner holding a best cost c_max

    Returns a uniform sample of the bounds of domain if c_max is infinite, otherwise a uniform
    sample of the informed set intersected with the bounds. Out-of-bounds draws are redrawn,
    never clamped.

    Use InformedSampler to keep the rotation between calls.
    """

    sampler = InformedSampler(x_start, x_goal, domain.bounds_lo, domain.bounds_hi)
    return sampler.sample(c_max, _resolve_rng(rng))


def unit_ball_measure(n: int) -> float:
    """Volume of the unit n-ball, ζ_n = π^(n/2)/Γ(n/2 + 1)"""

    n = _check_dimension(n)
    return float(math.pi ** (n / 2) / special.gamma(n / 2 + 1))


def phs_measure(c_best: float, c_min: float, n: int) -> float:
    """Volume of the prolate hyperspheroid with transverse diameter c_best and focal distance c_min

    c_best·(c_best² − c_min²)^((n−1)/2)·ζ_n/2^n

    Raises
    ------
    InfeasibleCostError
        If c_best is below c_min beyond the clamp tolerance.
    """

    n = _check_dimension(n)
    c_best = _clamp_cost(c_best, c_min)
    return c_best * (c_best**2 - c_min**2) ** ((n - 1) / 2) * unit_ball_measure(n) / 2**n


def bounding_box_measure(c_best: float, c_min: float, n: int) -> float:
    """Volume of the hyperrectangle that tightly bounds the prolate hyperspheroid"""

    n = _check_dimension(n)
    c_best = _clamp_cost(c_best, c_min)
    return c_best * math.sqrt(c_best**2 - c_min**2) ** (n - 1)


def improvement_probability_bound(c_best: float, c_min: float, n: int, sample_measure: float) -> float:
    """Upper bound on the probability that one uniform sample improves the solution

    The ratio of the measure of the informed set to the measure of the sampled set, capped at 1.

    Parameters
    ----------
    c_best : float
        Current best solution cost.

    c_min : float
        Theoretical minimum cost.

    n : int
        State dimension.

    sample_measure : float
        Measure of the set samples are drawn from, e.g. the bounds box.

    Raises
    ------
    InvalidInputError
        If sample_measure is not positive.
    """

    if not sample_measure > 0:
        raise InvalidInputError(f"The sampled set must have a positive measure, got {sample_measure!r}")
    return min(1.0, phs_measure(c_best, c_min, n) / sample_measure)


def expected_heuristic(c_best: float, c_min: float, n: int) -> float:
    """Expected heuristic cost of a uniform sample of the informed set

    (n·c_best² + c_min²)/((n + 1)·c_best). Without obstacles this is the expected next
    solution cost, and its derivative at c_best = c_min is convergence_rate(n).
    """

    n = _check_dimension(n)
    if not c_min > 0:
        raise InvalidInputError(f"c_min must be positive, got {c_min!r}")
    try:
        c_best = _clamp_cost(c_best, c_min)
    except InfeasibleCostError as e:
        raise InvalidInputError(str(e))
    return (n * c_best**2 + c_min**2) / ((n + 1) * c_best)


def convergence_rate(n: int) -> float:
    """Linear convergence rate of obstacle-free informed search, (n − 1)/(n + 1)"""

    n = _check_dimension(n)
    return (n - 1) / (n + 1)
