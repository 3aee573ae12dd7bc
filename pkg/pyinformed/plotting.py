from __future__ import annotations

import math
import pathlib
from typing import Dict, List, Sequence

import numpy as np
from matplotlib.axes import Axes
from matplotlib.collections import LineCollection
from matplotlib.figure import Figure
from matplotlib.patches import Circle, Ellipse, Rectangle

from .core import Cost, ProblemDef
from .exceptions import UnsupportedDimensionError, UnsupportedFormatError
from .planner import PlanResult, extract_path
from .statistics import SummaryRow

FIGURE_FORMATS = ("svg", "pdf", "png")


def _new_axes(ax: Axes = None) -> Axes:
    if ax is not None:
        return ax
    return Figure(figsize=(6, 6)).add_subplot()


def informed_set_ellipse(problem: ProblemDef, c_best: float | Cost, **kwargs) -> Ellipse:
    """Outline of the 2D informed set: width c_best, height √(c_best² − c_min²), along the focal axis"""

    c_best = float(c_best)
    c_min = problem.c_min
    centre = (problem.x_start + problem.x_goal) / 2
    direction = problem.x_goal - problem.x_start
    angle = math.degrees(math.atan2(direction[1], direction[0]))
    height = math.sqrt(max(c_best**2 - c_min**2, 0.0))
    kwargs.setdefault("fill", False)
    kwargs.setdefault("linestyle", "--")
    kwargs.setdefault("edgecolor", "tab:purple")
    return Ellipse(tuple(centre), width=c_best, height=height, angle=angle, **kwargs)


def plot_problem(problem: ProblemDef, result: PlanResult = None, c_best: float | Cost = None, ax: Axes = None) -> Axes:
    """Draws a 2D problem with, optionally, a planner tree, its best path and its informed set

    Parameters
    ----------
    problem : ProblemDef
        A 2D problem.

    result : PlanResult, optional
        If given, its tree and best path are drawn, and c_best defaults to its best cost.

    c_best : float | Cost, optional
        Transverse diameter of the informed set outline. No outline is drawn when infinite.

    ax : Axes, optional
        Axes to draw on. A new figure is created if not given.

    Raises
    ------
    UnsupportedDimensionError
        If the problem is not 2D.
    """

    if problem.dimension != 2:
        raise UnsupportedDimensionError("plot_problem", problem.dimension, [2])
    ax = _new_axes(ax)

    lo, hi = problem.bounds_lo, problem.bounds_hi
    ax.add_patch(Rectangle(tuple(lo), *(hi - lo), fill=False, edgecolor="black"))
    if problem.world is not None:
        for obstacle in problem.world.obstacles:
            ax.add_patch(Rectangle(tuple(obstacle.lo), *(obstacle.hi - obstacle.lo), color="0.3"))

    if result is not None:
        tree = result.tree
        if tree.size > 1:
            children = tree.states[1:]
            parents = tree.states[tree.parents[1:]]
            ax.add_collection(LineCollection(np.stack([parents, children], axis=1), colors="tab:green", linewidths=0.4))
        if result.has_solution:
            path = extract_path(result).states
            ax.plot(path[:, 0], path[:, 1], color="tab:blue", linewidth=2)
        if c_best is None:
            c_best = result.best_cost

    if c_best is not None and math.isfinite(float(c_best)):
        ax.add_patch(informed_set_ellipse(problem, c_best))

    ax.add_patch(Circle(tuple(problem.x_goal), problem.r_goal, color="tab:red", alpha=0.4))
    ax.plot(*problem.x_start, marker="o", color="tab:green")
    ax.plot(*problem.x_goal, marker="o", color="tab:red")

    ax.set_xlim(lo[0], hi[0])
    ax.set_ylim(lo[1], hi[1])
    ax.set_aspect("equal")
    return ax


def plot_summary(rows: Sequence[SummaryRow], axis_param: str, ax: Axes = None) -> Axes:
    """Medians with their confidence intervals as error bars, one series per planner

    Rows are placed on the x axis by the value of the cell parameter axis_param. Rows without
    values are left out.
    """

    ax = _new_axes(ax)
    series: Dict[str, List[SummaryRow]] = {}
    for row in rows:
        if row.empty:
            continue
        series.setdefault(row.planner, []).append(row)

    for planner, planner_rows in series.items():
        planner_rows = sorted(planner_rows, key=lambda r: dict(r.cell)[axis_param])
        x = [dict(r.cell)[axis_param] for r in planner_rows]
        median = np.array([r.median for r in planner_rows])
        errors = np.array([[r.median - r.ci_lo for r in planner_rows], [r.ci_hi - r.median for r in planner_rows]])
        ax.errorbar(x, median, yerr=errors, marker="o", capsize=3, label=planner)

    if rows:
        ax.set_ylabel(rows[0].metric_name)
    ax.set_xlabel(axis_param)
    ax.legend()
    return ax


def save_figure(ax: Axes, file_path: str | pathlib.Path, fmt: str = None) -> pathlib.Path:
    """Writes the figure of ax. The format defaults to the file suffix."""

    file_path = pathlib.Path(file_path)
    fmt = fmt or file_path.suffix.lstrip(".")
    if fmt not in FIGURE_FORMATS:
        raise UnsupportedFormatError(fmt, FIGURE_FORMATS)
    ax.figure.savefig(file_path, format=fmt, bbox_inches="tight")
    return file_path
