"""Brute-force validators for the sampler, the collision checker, the index and the planner

Every oracle here works from its own arithmetic: no function of the sampling, worlds or
neighbors modules is used to compute a result.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import List, NamedTuple

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy import optimize, sparse, stats
from scipy.sparse import csgraph

from .core import Cost, ProblemDef
from .exceptions import InvalidInputError, UnsupportedDimensionError
from .utils import _parse_state, _parse_states, _resolve_rng

_CHUNK = 100_000


class MonteCarloEstimate(NamedTuple):
    value: float
    standard_error: float
    acceptance: float
    draws: int


@dataclass(frozen=True)
class ChiSquareReport:
    bins: int
    statistic: float
    dof: int
    threshold: float
    passed: bool


class GridOptimum(NamedTuple):
    cost: Cost
    metrication_bias: float


def _check_costs(c_best: float, c_min: float, strict: bool = False):
    if not (math.isfinite(c_best) and math.isfinite(c_min)) or c_min < 0:
        raise InvalidInputError(f"Costs must be finite and non-negative, got c_best={c_best!r}, c_min={c_min!r}")
    if c_best < c_min or (strict and c_best == c_min):
        relation = ">" if strict else ">="
        raise InvalidInputError(f"Expected c_best {relation} c_min, got c_best={c_best!r}, c_min={c_min!r}")


def _aligned_box_draws(c_best: float, c_min: float, n: int, size: int, rng: np.random.Generator):
    """Uniform draws from the tight box around the hyperspheroid, in its own frame

    The foci are at ∓c_min/2 on the first axis. Returns the draws and a mask of those whose
    summed focal distance is at most c_best.
    """

    half_widths = np.full(n, math.sqrt(c_best**2 - c_min**2) / 2)
    half_widths[0] = c_best / 2
    x = rng.uniform(-1.0, 1.0, (size, n)) * half_widths

    focus = np.zeros(n)
    focus[0] = c_min / 2
    f_hat = np.linalg.norm(x - focus, axis=1) + np.linalg.norm(x + focus, axis=1)
    return f_hat, f_hat <= c_best


def mc_volume_estimate(
    c_best: float, c_min: float, n: int, draws: int, rng: np.random.Generator | int
) -> MonteCarloEstimate:
    """Rejection estimate of the volume of the informed set

    Draws uniformly from the hyperrectangle that tightly bounds the prolate hyperspheroid
    (side c_best along the transverse axis, √(c_best² − c_min²) on the others) and counts
    the draws with f̂ ≤ c_best.

    Parameters
    ----------
    c_best, c_min : float
        Transverse diameter and focal distance.

    n : int
        Dimension.

    draws : int
        Number of draws, at least 10^4.

    rng : np.random.Generator | int
        Random source or seed.

    Returns
    -------
    MonteCarloEstimate
        value is the box volume times the acceptance fraction, with its binomial standard error.
    """

    _check_costs(c_best, c_min)
    if draws < 10**4:
        raise InvalidInputError(f"At least 10^4 draws are needed, got {draws}")
    rng = _resolve_rng(rng)

    box_volume = c_best * math.sqrt(c_best**2 - c_min**2) ** (n - 1)
    accepted = 0
    for start in range(0, draws, _CHUNK):
        size = min(_CHUNK, draws - start)
        _, inside = _aligned_box_draws(c_best, c_min, n, size, rng)
        accepted += int(np.count_nonzero(inside))

    p = accepted / draws
    return MonteCarloEstimate(
        value=box_volume * p,
        standard_error=box_volume * math.sqrt(p * (1 - p) / draws),
        acceptance=p,
        draws=draws,
    )


def one_step_contraction_estimate(
    c_best: float, c_min: float, n: int, draws: int, rng: np.random.Generator | int
) -> MonteCarloEstimate:
    """Empirical mean of f̂ over uniform samples of the informed set

    Samples are produced by box rejection in the frame of the hyperspheroid until draws of them
    are accepted. Without obstacles this is the expected cost after one improving sample.
    """

    _check_costs(c_best, c_min, strict=True)
    if draws < 1:
        raise InvalidInputError(f"draws must be positive, got {draws}")
    rng = _resolve_rng(rng)

    accepted: List[NDArray[np.float64]] = []
    count, total = 0, 0
    while count < draws:
        f_hat, inside = _aligned_box_draws(c_best, c_min, n, _CHUNK, rng)
        accepted.append(f_hat[inside])
        count += int(np.count_nonzero(inside))
        total += _CHUNK

    values = np.concatenate(accepted)[:draws]
    return MonteCarloEstimate(
        value=float(values.mean()),
        standard_error=float(values.std(ddof=1) / math.sqrt(draws)) if draws > 1 else math.inf,
        acceptance=count / total,
        draws=draws,
    )


def chi_square_uniformity(samples: ArrayLike, phs, bins: int = 20) -> ChiSquareReport:
    """Chi-square test of samples against the uniform distribution on a prolate hyperspheroid

    The hyperspheroid is cut into bins concentric shells of equal measure. A sample at normalised
    radius ρ (ρ = 1 on the surface) falls into shell floor(bins·ρ^n); under uniformity each shell
    expects len(samples)/bins samples. The threshold is the 0.999 quantile of the chi-square
    distribution with bins − 1 degrees of freedom.

    Parameters
    ----------
    samples : ArrayLike
        (k, n) array of samples.

    phs : ProlateHyperspheroid
        Only its foci and c_best are used.

    bins : int, default 20
        Number of shells.

    Raises
    ------
    InvalidInputError
        If fewer than 50 samples are expected per shell, or if the hyperspheroid is degenerate.
    """

    samples = _parse_states(samples, phs.x_centre.size)
    k, n = samples.shape
    if bins < 2:
        raise InvalidInputError(f"At least 2 bins are needed, got {bins}")
    expected = k / bins
    if expected < 50:
        raise InvalidInputError(f"At least 50 samples per bin are needed, got {expected:.1f}")

    start = np.asarray(phs.x_start_focus, dtype=np.float64)
    goal = np.asarray(phs.x_goal_focus, dtype=np.float64)
    c_min = float(np.linalg.norm(goal - start))
    c_best = float(phs.c_best)
    transverse = c_best / 2
    conjugate = math.sqrt(max(c_best**2 - c_min**2, 0.0)) / 2
    if conjugate == 0 and n > 1:
        raise InvalidInputError("A degenerate hyperspheroid has shells of zero measure")

    axis = (goal - start) / c_min
    offset = samples - (start + goal) / 2
    axial = offset @ axis
    perpendicular_sq = np.maximum(np.einsum("ij,ij->i", offset, offset) - axial**2, 0.0)
    rho_sq = (axial / transverse) ** 2
    if n > 1:
        rho_sq = rho_sq + perpendicular_sq / conjugate**2

    u = np.minimum(rho_sq ** (n / 2), 1.0)
    observed = np.bincount(np.minimum((u * bins).astype(int), bins - 1), minlength=bins)

    statistic = float(((observed - expected) ** 2 / expected).sum())
    dof = bins - 1
    threshold = float(stats.chi2.ppf(0.999, dof))
    return ChiSquareReport(bins=bins, statistic=statistic, dof=dof, threshold=threshold, passed=statistic < threshold)


def metrication_bias(n: int) -> float:
    """Worst-case relative excess of a shortest path on the (3^n − 1)-connected lattice

    A straight segment is replaced by lattice moves along the 1, 2, ..., n-diagonals; the worst
    direction gives a length ratio of sqrt(Σ_k (√k − √(k−1))²). 2D: 8.24%, 3D: 12.81%.
    """

    return math.sqrt(sum((math.sqrt(k) - math.sqrt(k - 1)) ** 2 for k in range(1, n + 1))) - 1


def _free_states(lo: NDArray, hi: NDArray, points: NDArray) -> NDArray[np.bool_]:
    if lo.shape[0] == 0:
        return np.ones(points.shape[0], dtype=bool)
    inside = np.all((points[:, None, :] >= lo) & (points[:, None, :] <= hi), axis=2)
    return ~inside.any(axis=1)


def _free_segments(lo: NDArray, hi: NDArray, a: NDArray, b: NDArray) -> NDArray[np.bool_]:
    """Slab test of many segments against many closed boxes, segments assumed inside the bounds"""

    free = np.ones(a.shape[0], dtype=bool)
    if lo.shape[0] == 0:
        return free

    chunk = max(1, 2_000_000 // (lo.shape[0] * lo.shape[1]))
    for s in range(0, a.shape[0], chunk):
        p, q = a[s : s + chunk, None, :], b[s : s + chunk, None, :]
        direction = q - p
        with np.errstate(divide="ignore", invalid="ignore"):
            t1 = (lo - p) / direction
            t2 = (hi - p) / direction
        parallel = direction == 0
        inside_slab = (p >= lo) & (p <= hi)
        t_near = np.where(parallel, np.where(inside_slab, -np.inf, np.inf), np.minimum(t1, t2))
        t_far = np.where(parallel, np.where(inside_slab, np.inf, -np.inf), np.maximum(t1, t2))
        enter = np.maximum(t_near.max(axis=2), 0.0)
        leave = np.minimum(t_far.min(axis=2), 1.0)
        free[s : s + chunk] = ~(enter <= leave).any(axis=1)
    return free


def grid_dijkstra_optimum(problem: ProblemDef, resolution: float) -> GridOptimum:
    """Shortest path on a lattice over the free space

    Lattice nodes are spaced resolution apart over the bounds, each linked to its 3^n − 1
    neighbours by collision-free straight edges. The start and the goal are linked to the
    corners of the lattice cell containing them. The result upper-bounds the true optimum and
    approaches it as resolution shrinks, from above by at most metrication_bias(n).

    Parameters
    ----------
    problem : ProblemDef
        The problem. 2 or 3 dimensions.

    resolution : float
        Lattice spacing. Must divide the extent of the bounds on every axis.

    Returns
    -------
    GridOptimum
        The cost, infinite if the lattice does not connect start and goal, and the worst-case
        relative metrication bias.

    Raises
    ------
    UnsupportedDimensionError
        If the problem has more than 3 dimensions.

    InvalidInputError
        If resolution does not divide the bounds.
    """

    n = problem.dimension
    if n > 3:
        raise UnsupportedDimensionError("grid_dijkstra_optimum", n, [1, 2, 3])
    if not resolution > 0:
        raise InvalidInputError(f"resolution must be positive, got {resolution!r}")

    extent = (problem.bounds_hi - problem.bounds_lo) / resolution
    cells = np.round(extent).astype(int)
    if np.any(np.abs(extent - cells) > 1e-9 * np.maximum(extent, 1)):
        raise InvalidInputError(f"resolution {resolution} does not divide the bounds")

    world = problem.world
    n_obs = 0 if world is None else len(world.obstacles)
    lo = np.array([o.lo for o in world.obstacles]).reshape(n_obs, n) if n_obs else np.empty((0, n))
    hi = np.array([o.hi for o in world.obstacles]).reshape(n_obs, n) if n_obs else np.empty((0, n))

    shape = tuple(cells + 1)
    index = np.arange(int(np.prod(shape))).reshape(shape)
    coords = np.stack(np.meshgrid(*[np.arange(s) for s in shape], indexing="ij"), axis=-1).reshape(-1, n)
    nodes = problem.bounds_lo + coords * resolution
    node_free = _free_states(lo, hi, nodes)

    rows, cols, weights = [], [], []
    for offset in itertools.product((-1, 0, 1), repeat=n):
        # each undirected edge once
        if offset <= (0,) * n:
            continue
        offset = np.array(offset)
        src = tuple(slice(max(0, -o), s - max(0, o)) for o, s in zip(offset, shape))
        dst = tuple(slice(max(0, o), s - max(0, -o)) for o, s in zip(offset, shape))
        a, b = index[src].ravel(), index[dst].ravel()
        both = node_free[a] & node_free[b]
        a, b = a[both], b[both]
        ok = _free_segments(lo, hi, nodes[a], nodes[b])
        rows.append(a[ok])
        cols.append(b[ok])
        weights.append(np.full(int(ok.sum()), resolution * np.linalg.norm(offset)))

    n_nodes = nodes.shape[0]
    terminals = [problem.x_start, problem.x_goal]
    for t, x in enumerate(terminals):
        base = np.clip(np.floor((x - problem.bounds_lo) / resolution).astype(int), 0, cells - 1)
        corners = np.array([index[tuple(base + np.array(c))] for c in itertools.product((0, 1), repeat=n)])
        corners = corners[node_free[corners]]
        ok = _free_segments(lo, hi, np.repeat(x[None, :], corners.size, axis=0), nodes[corners])
        corners = corners[ok]
        rows.append(np.full(corners.size, n_nodes + t))
        cols.append(corners)
        # zero-length links are stored as a tiny positive weight so the sparse graph keeps them
        weights.append(np.maximum(np.linalg.norm(nodes[corners] - x, axis=1), 1e-300))

    graph = sparse.coo_matrix(
        (np.concatenate(weights), (np.concatenate(rows), np.concatenate(cols))), shape=(n_nodes + 2, n_nodes + 2)
    ).tocsr()
    distances = csgraph.dijkstra(graph, directed=False, indices=n_nodes)
    cost = float(distances[n_nodes + 1])
    return GridOptimum(cost=Cost(cost), metrication_bias=metrication_bias(n))


def dense_segment_free(problem: ProblemDef, a: ArrayLike, b: ArrayLike, points: int = 10**4) -> bool:
    """Checks points evenly spaced along [a, b], endpoints included, against the bounds and obstacles"""

    a = _parse_state(a, problem.dimension)
    b = _parse_state(b, problem.dimension)
    t = np.linspace(0.0, 1.0, points)[:, None]
    samples = a + t * (b - a)
    if np.any(samples < problem.bounds_lo) or np.any(samples > problem.bounds_hi):
        return False
    world = problem.world
    if world is None or not world.obstacles:
        return True
    lo = np.array([o.lo for o in world.obstacles])
    hi = np.array([o.hi for o in world.obstacles])
    return bool(_free_states(lo, hi, samples).all())


def _box_signed_distance(lo: NDArray, hi: NDArray, x: NDArray) -> float:
    outside = np.maximum(np.maximum(lo - x, 0.0), x - hi)
    if np.any(outside > 0):
        return float(np.linalg.norm(outside))
    return -float(min(np.min(x - lo), np.min(hi - x)))


def segment_clearance(problem: ProblemDef, a: ArrayLike, b: ArrayLike) -> float:
    """Signed clearance of [a, b] from the obstacles

    Positive: the distance between the segment and the closest obstacle. Negative: minus the
    deepest penetration of the segment into an obstacle. Zero: the segment touches a face.
    Infinite without obstacles. The signed distance to a box is convex, so each box is a
    bounded scalar minimization along the segment.
    """

    a = _parse_state(a, problem.dimension)
    b = _parse_state(b, problem.dimension)
    world = problem.world
    if world is None or not world.obstacles:
        return math.inf

    clearance = math.inf
    for obstacle in world.obstacles:
        lo, hi = np.asarray(obstacle.lo), np.asarray(obstacle.hi)
        found = optimize.minimize_scalar(
            lambda t: _box_signed_distance(lo, hi, a + t * (b - a)),
            bounds=(0.0, 1.0),
            method="bounded",
            options={"xatol": 1e-12},
        )
        endpoints = min(_box_signed_distance(lo, hi, a), _box_signed_distance(lo, hi, b))
        clearance = min(clearance, float(found.fun), endpoints)
    return clearance


def linear_scan_nearest(points: ArrayLike, x: ArrayLike) -> int:
    """Index of the closest point, the smallest index among equidistant ones"""

    points = np.asarray(points, dtype=np.float64)
    distances = np.linalg.norm(points - np.asarray(x, dtype=np.float64), axis=1)
    return int(np.flatnonzero(distances == distances.min())[0])


def linear_scan_near(points: ArrayLike, x: ArrayLike, r: float) -> List[int]:
    """Indices of all points within r of x, ascending"""

    points = np.asarray(points, dtype=np.float64)
    distances = np.linalg.norm(points - np.asarray(x, dtype=np.float64), axis=1)
    return np.flatnonzero(distances <= r).tolist()
