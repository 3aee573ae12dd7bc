from __future__ import annotations

import csv
import dataclasses
import logging
import math
import pathlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from itertools import repeat
from typing import Any, Dict, List, NamedTuple, Sequence, Tuple

import numpy as np
import yaml

from .core import ProblemDef
from .exceptions import InvalidInputError, SamplingStalledError, UnsupportedFormatError, WorldGenerationError
from .planner import NEIGHBORHOODS, PLANNER_MODES, PlannerConfig, PlanResult, plan
from .plotting import FIGURE_FORMATS, plot_summary, save_figure
from .statistics import RunRecord, SummaryRow, summarize
from .utils import PyinformedOptions
from .worlds import (
    RandomWorldSpec,
    World,
    analytic_optimum_gap,
    analytic_optimum_wall,
    flanking_cost,
    gap_world,
    random_world,
    wall_world,
    world_hash,
)

logger = logging.getLogger(__name__)

FAMILIES = ("wall_width", "tolerance", "gap", "random_worlds", "machine_zero")
PLOT_FORMATS = ("tsv",) + FIGURE_FORMATS
DEFAULT_MAX_ITERATIONS = 20_000

RAW_FILE = "raw.csv"
RUNS_FILE = "runs.csv"
SUMMARY_FILE = "summary.csv"
SPEC_FILE = "experiment.yaml"
SERIES_PREFIX = "series_"

RAW_TAIL = ["planner", "seed", "event_iter", "event_time_s", "event_cost"]
RUNS_TAIL = [
    "planner",
    "seed",
    "cell_index",
    "run_index",
    "world_hash",
    "termination",
    "iterations",
    "first_solution_iter",
    "final_cost",
    "target_cost",
    "optimum",
    "iterations_to_target",
    "time_to_target_s",
    "error",
]
SUMMARY_TAIL = ["planner", "metric_name", "median", "ci_lo", "ci_hi", "n", "failures", "warning"]
SERIES_FIELDS = ["median", "ci_lo", "ci_hi", "n", "failures", "warning"]


@dataclass
class ExperimentSpec:
    """An experiment: a family of problems, the cells it sweeps and the run budget

    Every cell is run runs_per_cell times. Run k of cell i uses the seed
    base_seed + i·runs_per_cell + k, and every planner mode of that run sees the same world.

    Parameters
    ----------
    family : str
        One of FAMILIES.
        wall_width sweeps the map width of wall_world (widths, multiples of distance).
        tolerance sweeps the target tolerance on wall_world.
        gap sweeps the gap ratio h_g/h of gap_world.
        random_worlds sweeps the dimension of random worlds.
        machine_zero runs an obstacle-free problem until the relative error reaches machine_zero_tolerance.

    runs_per_cell : int, default 100
        Runs of each cell.

    base_seed : int, default 0
        Seed of the first run.

    modes : List[str]
        Planner modes run on every world.

    max_iterations, time_budget : optional
        Planner budgets. max_iterations defaults to 20000 if neither is given.

    workers : int, default 1
        Worker processes.

    goal_radius_fraction : float, default 0.2
        Goal radius of every problem, as a fraction of its c_min.

    neighborhood : 'radius' | 'informed_set', optional
        Near-vertex rule of the planners, see PlannerConfig. Defaults to 'informed_set' for
        machine_zero and 'radius' otherwise.
    """

    family: str
    runs_per_cell: int = 100
    base_seed: int = 0
    modes: List[str] = field(default_factory=lambda: list(PLANNER_MODES))
    max_iterations: int = None
    time_budget: float = None
    workers: int = 1
    gamma_factor: float = None
    checkpoint_every: int = None
    dimensions: List[int] = field(default_factory=lambda: [2])
    distance: float = 100.0
    widths: List[float] = field(default_factory=lambda: [1.0, 2.0, 4.0])
    map_width: float = None
    wall_height: float = 50.0
    wall_thickness_range: List[float] = field(default_factory=lambda: [5.0, 20.0])
    tolerances: List[float] = field(default_factory=lambda: [0.01, 0.02, 0.05, 0.1])
    target_tolerance: float = 0.02
    gap_ratios: List[float] = field(default_factory=lambda: [0.05, 0.1, 0.2])
    gap_wall_height: float = 100.0
    gap_wall_thickness: float = 10.0
    gap_offset: float = 0.03
    obstacle_count: int = 30
    obstacle_size_range: List[float] = field(default_factory=lambda: [5.0, 20.0])
    world_width: float = 100.0
    feasibility_iterations: int = 20_000
    iterations_after_solution: int = None
    time_after_solution: float = None
    machine_zero_tolerance: float = 1e-6
    goal_radius_fraction: float = 0.2
    neighborhood: str = None

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise InvalidInputError(f"Invalid family {self.family!r}. Valid families are {FAMILIES}")
        if not self.goal_radius_fraction > 0:
            raise InvalidInputError(f"goal_radius_fraction must be positive, got {self.goal_radius_fraction!r}")
        if self.neighborhood is None:
            self.neighborhood = "informed_set" if self.family == "machine_zero" else "radius"
        if self.neighborhood not in NEIGHBORHOODS:
            raise InvalidInputError(f"Invalid neighborhood {self.neighborhood!r}. Valid values are {NEIGHBORHOODS}")
        if self.runs_per_cell < 1:
            raise InvalidInputError(f"runs_per_cell must be at least 1, got {self.runs_per_cell}")
        if self.workers < 1:
            raise InvalidInputError(f"workers must be at least 1, got {self.workers}")
        if not self.modes or set(self.modes) - set(PLANNER_MODES):
            raise InvalidInputError(f"modes must be a non-empty list of {PLANNER_MODES}, got {self.modes}")
        for name in ("dimensions", "widths", "tolerances", "gap_ratios"):
            if not getattr(self, name):
                raise InvalidInputError(f"{name} must not be empty")
        for name in ("wall_thickness_range", "obstacle_size_range"):
            lo, hi = getattr(self, name)
            if not 0 < lo <= hi:
                raise InvalidInputError(f"{name} must satisfy 0 < min <= max, got {[lo, hi]}")
        if self.max_iterations is None and self.time_budget is None:
            self.max_iterations = DEFAULT_MAX_ITERATIONS
        if self.map_width is None:
            self.map_width = 2 * self.distance

    @property
    def checkpoint_schedule(self) -> Tuple[int, ...]:
        if not self.checkpoint_every or self.max_iterations is None:
            return ()
        return tuple(range(self.checkpoint_every, self.max_iterations + 1, self.checkpoint_every))


def load_experiment_spec(file_path: str | pathlib.Path) -> ExperimentSpec:
    """Reads an ExperimentSpec from a flat YAML document

    Keys are ExperimentSpec fields. Values are scalars or lists of scalars.

    Raises
    ------
    InvalidInputError
        If the file is missing or is not a flat mapping of known keys.
    """

    file_path = pathlib.Path(file_path)
    if not file_path.exists():
        raise InvalidInputError(f"File not found: {file_path}")
    with open(file_path, encoding="utf-8") as file:
        data = yaml.safe_load(file)
    return experiment_spec_from_dict(data)


def experiment_spec_from_dict(data: Dict[str, Any]) -> ExperimentSpec:
    if not isinstance(data, dict):
        raise InvalidInputError("An experiment file must be a mapping of keys to values")

    known = {f.name for f in dataclasses.fields(ExperimentSpec)}
    unknown = set(data) - known
    if unknown:
        raise InvalidInputError(f"Unknown experiment keys: {sorted(unknown)}")
    for key, value in data.items():
        values = value if isinstance(value, list) else [value]
        if any(isinstance(v, (dict, list)) for v in values):
            raise InvalidInputError(f"Experiment key {key!r} must hold a scalar or a flat list")
    if "family" not in data:
        raise InvalidInputError("An experiment needs a family")
    return ExperimentSpec(**data)


def save_experiment_spec(spec: ExperimentSpec, file_path: str | pathlib.Path) -> pathlib.Path:
    file_path = pathlib.Path(file_path)
    with open(file_path, "w", encoding="utf-8") as file:
        yaml.safe_dump(dataclasses.asdict(spec), file, sort_keys=False)
    return file_path


def experiment_cells(spec: ExperimentSpec) -> List[Dict[str, Any]]:
    """Cell parameters of an experiment, in run order"""

    if spec.family == "wall_width":
        return [{"n": n, "l": float(width) * spec.distance} for n in spec.dimensions for width in spec.widths]
    if spec.family == "tolerance":
        return [{"n": n, "tolerance": float(tolerance)} for n in spec.dimensions for tolerance in spec.tolerances]
    if spec.family == "gap":
        return [{"n": 2, "gap_ratio": float(ratio)} for ratio in spec.gap_ratios]
    return [{"n": n} for n in spec.dimensions]


class CellProblem(NamedTuple):
    problem: ProblemDef
    optimum: float | None
    target_cost: float | None


def _wall_problem(spec: ExperimentSpec, n: int, l: float, tolerance: float, rng: np.random.Generator) -> CellProblem:
    w = rng.uniform(*spec.wall_thickness_range)
    r_goal = spec.goal_radius_fraction * spec.distance
    _, problem = wall_world(n, l, spec.distance, w, spec.wall_height, r_goal=r_goal)
    # a centred wall is symmetric in every perpendicular axis, so the planar optimum holds for any n
    optimum = analytic_optimum_wall(2, l, spec.distance, w, spec.wall_height).value
    return CellProblem(problem, optimum, optimum * (1 + tolerance))


def _gap_problem(spec: ExperimentSpec, gap_ratio: float, rng: np.random.Generator) -> CellProblem:
    h = spec.gap_wall_height
    h_g = gap_ratio * h
    if spec.gap_offset is None:
        y_g = rng.uniform(-(h - h_g) / 2, (h - h_g) / 2)
    else:
        y_g = spec.gap_offset * h
    w, d, l = spec.gap_wall_thickness, spec.distance, spec.map_width

    _, problem = gap_world(2, h, h_g, y_g, w, d, l, r_goal=spec.goal_radius_fraction * d)
    optimum = analytic_optimum_gap(h, h_g, y_g, w, d, l).value
    # any solution below the flanking cost goes through the gap
    target = flanking_cost(h, w, d).value * (1 - 1e-9)
    if optimum > target:
        logger.warning("Gap at %.6g of height %.6g is not cheaper than the flanks, the target is unreachable", y_g, h_g)
    return CellProblem(problem, optimum, target)


def _random_problem(spec: ExperimentSpec, n: int, seed: int) -> CellProblem:
    # start and goal sit at 10% and 90% of the map on every axis
    r_goal = spec.goal_radius_fraction * 0.8 * spec.world_width * math.sqrt(n)
    attempts = PyinformedOptions.world_retries
    for attempt in range(attempts):
        world_spec = RandomWorldSpec(
            dimension=n,
            seed=[seed, attempt],
            obstacle_count=spec.obstacle_count,
            size_range=tuple(spec.obstacle_size_range),
            width=spec.world_width,
            r_goal=r_goal,
        )
        try:
            _, problem = random_world(world_spec)
        except WorldGenerationError:
            logger.info("No random world for seed %d attempt %d", seed, attempt)
            continue
        if n < 4:
            return CellProblem(problem, None, None)

        # no grid certificate above 3D: accept the world once a planner connects start and goal
        feasibility = plan(
            problem,
            PlannerConfig(
                "rrt_star", max_iterations=spec.feasibility_iterations, seed=seed, iterations_after_solution=0
            ),
        )
        if feasibility.has_solution:
            return CellProblem(problem, None, None)
        logger.info("Random world for seed %d attempt %d has no solution after the feasibility pass", seed, attempt)
    raise WorldGenerationError(seed, attempts)


def _machine_zero_problem(spec: ExperimentSpec, n: int) -> CellProblem:
    half = spec.map_width / 2
    x_start, x_goal = np.zeros(n), np.zeros(n)
    x_start[0], x_goal[0] = -spec.distance / 2, spec.distance / 2
    world = World(np.full(n, -half), np.full(n, half))
    problem = ProblemDef.from_world(world, x_start, x_goal, spec.goal_radius_fraction * spec.distance)
    return CellProblem(problem, problem.c_min, problem.c_min * (1 + spec.machine_zero_tolerance))


def build_cell_problem(spec: ExperimentSpec, cell: Dict[str, Any], seed: int) -> CellProblem:
    """The problem of one run, with its optimum and target cost where they are known

    Random world parameters (wall thickness, gap position) come from a generator seeded with
    (seed, 1), so that they are independent of the planner's stream.
    """

    rng = np.random.default_rng([seed, 1])
    n = cell["n"]
    if spec.family == "wall_width":
        return _wall_problem(spec, n, cell["l"], spec.target_tolerance, rng)
    if spec.family == "tolerance":
        return _wall_problem(spec, n, spec.map_width, cell["tolerance"], rng)
    if spec.family == "gap":
        return _gap_problem(spec, cell["gap_ratio"], rng)
    if spec.family == "random_worlds":
        return _random_problem(spec, n, seed)
    return _machine_zero_problem(spec, n)


class RunTask(NamedTuple):
    cell_index: int
    run_index: int
    cell: Dict[str, Any]
    seed: int


def experiment_tasks(spec: ExperimentSpec) -> List[RunTask]:
    tasks = []
    for cell_index, cell in enumerate(experiment_cells(spec)):
        for run_index in range(spec.runs_per_cell):
            seed = spec.base_seed + cell_index * spec.runs_per_cell + run_index
            tasks.append(RunTask(cell_index, run_index, cell, seed))
    return tasks


def planner_config(spec: ExperimentSpec, mode: str, seed: int, target_cost: float = None) -> PlannerConfig:
    return PlannerConfig(
        mode=mode,
        gamma_factor=spec.gamma_factor,
        max_iterations=spec.max_iterations,
        time_budget=spec.time_budget,
        seed=seed,
        target_cost=target_cost,
        checkpoint_schedule=spec.checkpoint_schedule,
        iterations_after_solution=spec.iterations_after_solution,
        time_after_solution=spec.time_after_solution,
        neighborhood=spec.neighborhood,
    )


def _run_id(spec: ExperimentSpec, task: RunTask, mode_index: int) -> int:
    return (task.cell_index * spec.runs_per_cell + task.run_index) * len(spec.modes) + mode_index


def _record(spec: ExperimentSpec, task: RunTask, mode_index: int, **kwargs) -> RunRecord:
    return RunRecord(
        run_id=_run_id(spec, task, mode_index),
        family=spec.family,
        cell=dict(task.cell),
        planner=spec.modes[mode_index],
        seed=task.seed,
        cell_index=task.cell_index,
        run_index=task.run_index,
        **kwargs,
    )


def record_from_result(
    spec: ExperimentSpec, task: RunTask, mode_index: int, cell_problem: CellProblem, result: PlanResult
) -> RunRecord:
    return _record(
        spec,
        task,
        mode_index,
        world_hash=world_hash(cell_problem.problem),
        events=list(result.events),
        termination=result.termination.value,
        iterations=result.iterations,
        first_solution_iter=result.first_solution_iteration,
        final_cost=result.best_cost.value,
        target_cost=cell_problem.target_cost,
        optimum=cell_problem.optimum,
    )


def run_task(spec: ExperimentSpec, task: RunTask) -> List[RunRecord]:
    """Runs every planner mode of one (cell, seed) on the same world"""

    try:
        cell_problem = build_cell_problem(spec, task.cell, task.seed)
    except WorldGenerationError as e:
        logger.warning("Run %d of cell %s failed: %s", task.run_index, task.cell, e)
        return [_record(spec, task, i, termination="failed", error=str(e)) for i in range(len(spec.modes))]

    records = []
    for mode_index, mode in enumerate(spec.modes):
        config = planner_config(spec, mode, task.seed, cell_problem.target_cost)
        try:
            result = plan(cell_problem.problem, config)
        except SamplingStalledError as e:
            logger.warning("Run %d of cell %s with %s failed: %s", task.run_index, task.cell, mode, e)
            failed = _record(
                spec, task, mode_index, world_hash=world_hash(cell_problem.problem), termination="failed", error=str(e)
            )
            records.append(failed)
            continue
        records.append(record_from_result(spec, task, mode_index, cell_problem, result))
    return records


@dataclass
class ExperimentResult:
    spec: ExperimentSpec
    records: List[RunRecord]
    summary: List[SummaryRow]
    files: List[pathlib.Path] = field(default_factory=list)

    @property
    def failures(self) -> int:
        return sum(record.failed for record in self.records)


def run_experiment(spec: ExperimentSpec, out_dir: str | pathlib.Path = None, fmt: str = "tsv") -> ExperimentResult:
    """Runs an experiment and writes its outputs

    Every cell and seed is run with every planner mode on the identical world. Outputs, sorted by
    run_id whatever the completion order:
        experiment.yaml: the ExperimentSpec, for replay
        raw.csv: one row per cost event
        runs.csv: one row per run
        summary.csv: median and confidence interval per cell, planner and metric
        series_<metric>.tsv: one plottable series per metric, and a figure if fmt is a figure format

    Parameters
    ----------
    spec : ExperimentSpec
        The experiment.

    out_dir : str | pathlib.Path, optional
        Output directory, created if needed. Nothing is written if None.

    fmt : str, default 'tsv'
        One of PLOT_FORMATS.
    """

    if fmt not in PLOT_FORMATS:
        raise UnsupportedFormatError(fmt, PLOT_FORMATS)

    tasks = experiment_tasks(spec)
    cells = len(tasks) // spec.runs_per_cell
    logger.info("Running %s: %d cells, %d runs each, modes %s", spec.family, cells, spec.runs_per_cell, spec.modes)
    if spec.workers > 1:
        with ProcessPoolExecutor(max_workers=spec.workers) as pool:
            batches = list(pool.map(run_task, repeat(spec), tasks))
    else:
        batches = [run_task(spec, task) for task in tasks]
    records = sorted((record for batch in batches for record in batch), key=lambda r: r.run_id)

    for cell_index, cell in enumerate(experiment_cells(spec)):
        cell_records = [r for r in records if r.cell_index == cell_index]
        logger.info("Cell %s: %d runs, %d failed", cell, len(cell_records), sum(r.failed for r in cell_records))

    summary = summarize(records, paired=spec.family == "random_worlds")
    result = ExperimentResult(spec, records, summary)
    if out_dir is not None:
        out_dir = pathlib.Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        result.files = [
            save_experiment_spec(spec, out_dir / SPEC_FILE),
            write_raw_csv(records, out_dir / RAW_FILE),
            write_runs_csv(records, out_dir / RUNS_FILE),
            write_summary_csv(summary, out_dir / SUMMARY_FILE),
        ]
        result.files.extend(emit_plot_data(summary, out_dir, fmt))
    return result


def _format(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _parse_number(text: str) -> int | float | None:
    if text == "":
        return None
    try:
        return int(text)
    except ValueError:
        return float(text)


def _param_names(cells: Sequence[Dict[str, Any]]) -> List[str]:
    names: List[str] = []
    for cell in cells:
        names.extend(k for k in cell if k not in names)
    return names


def write_raw_csv(records: Sequence[RunRecord], file_path: str | pathlib.Path) -> pathlib.Path:
    """run_id, family, cell parameters, planner, seed, event_iter, event_time_s, event_cost"""

    params = _param_names([r.cell for r in records])
    with open(file_path, "w", newline="", encoding="utf-8") as file:
        writer = csv.writer(file)
        writer.writerow(["run_id", "family"] + params + RAW_TAIL)
        for r in records:
            head = [r.run_id, r.family] + [r.cell.get(p) for p in params] + [r.planner, r.seed]
            for event in r.events:
                writer.writerow([_format(v) for v in head + [event.iteration, event.elapsed, event.cost]])
    return pathlib.Path(file_path)


def write_runs_csv(records: Sequence[RunRecord], file_path: str | pathlib.Path) -> pathlib.Path:
    params = _param_names([r.cell for r in records])
    with open(file_path, "w", newline="", encoding="utf-8") as file:
        writer = csv.writer(file)
        writer.writerow(["run_id", "family"] + params + RUNS_TAIL)
        for r in records:
            row = [r.run_id, r.family] + [r.cell.get(p) for p in params]
            row += [r.planner, r.seed, r.cell_index, r.run_index, r.world_hash, r.termination, r.iterations]
            row += [r.first_solution_iter, r.final_cost, r.target_cost, r.optimum]
            row += [r.iterations_to_target, r.time_to_target_s, r.error]
            writer.writerow([_format(v) for v in row])
    return pathlib.Path(file_path)


def write_summary_csv(summary: Sequence[SummaryRow], file_path: str | pathlib.Path) -> pathlib.Path:
    params = _param_names([dict(row.cell) for row in summary])
    with open(file_path, "w", newline="", encoding="utf-8") as file:
        writer = csv.writer(file)
        writer.writerow(params + SUMMARY_TAIL)
        for row in summary:
            cell = dict(row.cell)
            values = [cell.get(p) for p in params]
            values += [row.planner, row.metric_name, row.median, row.ci_lo, row.ci_hi, row.n, row.failures, row.warning]
            writer.writerow([_format(v) for v in values])
    return pathlib.Path(file_path)


def read_runs_csv(file_path: str | pathlib.Path) -> List[Dict[str, str]]:
    file_path = pathlib.Path(file_path)
    if not file_path.exists():
        raise InvalidInputError(f"File not found: {file_path}")
    with open(file_path, newline="", encoding="utf-8") as file:
        return list(csv.DictReader(file))


def emit_plot_data(summary: Sequence[SummaryRow], out_dir: str | pathlib.Path, fmt: str = "tsv") -> List[pathlib.Path]:
    """Writes one tab-separated series file per metric, and its figure for a figure format

    Each series file has one row per cell: the cell parameters, then median, ci_lo, ci_hi, n,
    failures and warning for every planner, in columns named '<planner>.<field>'. Rows of a
    cell without values keep their place with NaN statistics.

    Raises
    ------
    UnsupportedFormatError
        If fmt is not one of PLOT_FORMATS.
    """

    if fmt not in PLOT_FORMATS:
        raise UnsupportedFormatError(fmt, PLOT_FORMATS)
    out_dir = pathlib.Path(out_dir)

    by_metric: Dict[str, List[SummaryRow]] = {}
    for row in summary:
        by_metric.setdefault(row.metric_name, []).append(row)

    files = []
    for metric, rows in by_metric.items():
        file_path = out_dir / f"{SERIES_PREFIX}{metric}.tsv"
        _write_series(rows, file_path)
        files.append(file_path)
        if fmt in FIGURE_FORMATS:
            axis_param = _param_names([dict(r.cell) for r in rows])[-1]
            ax = plot_summary(rows, axis_param)
            files.append(save_figure(ax, file_path.with_suffix(f".{fmt}"), fmt))
    return files


def _write_series(rows: Sequence[SummaryRow], file_path: pathlib.Path):
    params = _param_names([dict(r.cell) for r in rows])
    planners = list(dict.fromkeys(r.planner for r in rows))
    cells = list(dict.fromkeys(r.cell for r in rows))
    lookup = {(r.cell, r.planner): r for r in rows}

    with open(file_path, "w", newline="", encoding="utf-8") as file:
        writer = csv.writer(file, delimiter="\t")
        writer.writerow(params + [f"{p}.{f}" for p in planners for f in SERIES_FIELDS])
        for cell in cells:
            values = [dict(cell).get(p) for p in params]
            for planner in planners:
                row = lookup.get((cell, planner))
                values += [None] * len(SERIES_FIELDS) if row is None else [getattr(row, f) for f in SERIES_FIELDS]
            writer.writerow([_format(v) for v in values])


def read_plot_series(file_path: str | pathlib.Path) -> List[SummaryRow]:
    """Parses a series file written by emit_plot_data back into summary rows"""

    file_path = pathlib.Path(file_path)
    metric = file_path.stem[len(SERIES_PREFIX) :] if file_path.stem.startswith(SERIES_PREFIX) else file_path.stem

    with open(file_path, newline="", encoding="utf-8") as file:
        reader = csv.reader(file, delimiter="\t")
        header = next(reader)
        series_columns = [c for c in header if "." in c]
        params = [c for c in header if "." not in c]
        planners = list(dict.fromkeys(c.rsplit(".", 1)[0] for c in series_columns))

        rows = []
        for line in reader:
            values = dict(zip(header, line))
            cell = tuple((p, _parse_number(values[p])) for p in params)
            for planner in planners:
                if values[f"{planner}.median"] == "":
                    continue
                rows.append(
                    SummaryRow(
                        cell=cell,
                        planner=planner,
                        metric_name=metric,
                        median=float(values[f"{planner}.median"]),
                        ci_lo=float(values[f"{planner}.ci_lo"]),
                        ci_hi=float(values[f"{planner}.ci_hi"]),
                        n=int(values[f"{planner}.n"]),
                        failures=int(values[f"{planner}.failures"]),
                        warning=values.get(f"{planner}.warning", ""),
                    )
                )
    return rows


class ReplayOutcome(NamedTuple):
    record: RunRecord
    recorded_final_cost: float

    @property
    def matches(self) -> bool:
        recorded, replayed = self.recorded_final_cost, self.record.final_cost
        return recorded == replayed or (math.isinf(recorded) and math.isinf(replayed))


def replay(runs_csv: str | pathlib.Path, run_id: int) -> ReplayOutcome:
    """Re-runs one run of an experiment from its runs.csv and the experiment.yaml next to it

    Runs limited by iterations replay exactly; runs limited by time may stop elsewhere.

    Raises
    ------
    InvalidInputError
        If the run is not in the file or the experiment file is missing.
    """

    runs_csv = pathlib.Path(runs_csv)
    rows = [row for row in read_runs_csv(runs_csv) if int(row["run_id"]) == run_id]
    if not rows:
        raise InvalidInputError(f"Run {run_id} is not in {runs_csv}")
    row = rows[0]

    spec = load_experiment_spec(runs_csv.parent / SPEC_FILE)
    cell_index, run_index = int(row["cell_index"]), int(row["run_index"])
    cell = experiment_cells(spec)[cell_index]
    task = RunTask(cell_index, run_index, cell, int(row["seed"]))
    mode_index = spec.modes.index(row["planner"])

    cell_problem = build_cell_problem(spec, cell, task.seed)
    result = plan(cell_problem.problem, planner_config(spec, row["planner"], task.seed, cell_problem.target_cost))
    record = record_from_result(spec, task, mode_index, cell_problem, result)
    return ReplayOutcome(record, float(row["final_cost"]) if row["final_cost"] else math.inf)
