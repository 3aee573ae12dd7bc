from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from statistics import median
from typing import Any, Dict, Iterable, List, NamedTuple, Sequence, Tuple

from scipy import stats

from .exceptions import InvalidInputError
from .planner import CostEvent

METRICS = ("iterations_to_target", "time_to_target_s", "final_cost", "first_solution_iter", "relative_error")
PAIRED_METRIC = "relative_cost_difference"
PAIRED_PLANNER = "paired"

# below this many values a 95% order-statistic interval cannot reach its coverage
LOW_N = 6
WARNING_EMPTY = "empty"
WARNING_LOW_N = "low_n"

CellKey = Tuple[Tuple[str, Any], ...]


@dataclass
class RunRecord:
    """One planner run of an experiment

    events holds the (iteration, elapsed seconds, best cost) timeline of the run. A run whose world
    could not be generated, or whose planner raised, has error set and no events.
    """

    run_id: int
    family: str
    cell: Dict[str, Any]
    planner: str
    seed: int
    cell_index: int = 0
    run_index: int = 0
    world_hash: str = ""
    events: List[CostEvent] = field(default_factory=list)
    termination: str = None
    iterations: int = 0
    first_solution_iter: int = None
    final_cost: float = math.inf
    target_cost: float = None
    optimum: float = None
    error: str = None

    @property
    def failed(self) -> bool:
        return self.error is not None

    @property
    def cell_key(self) -> CellKey:
        return tuple(self.cell.items())

    def _first_event_at_target(self) -> CostEvent | None:
        if self.target_cost is None:
            return None
        for event in self.events:
            if event.cost <= self.target_cost:
                return event
        return None

    @property
    def iterations_to_target(self) -> int | None:
        event = self._first_event_at_target()
        return None if event is None else event.iteration

    @property
    def time_to_target_s(self) -> float | None:
        event = self._first_event_at_target()
        return None if event is None else event.elapsed

    @property
    def relative_error(self) -> float | None:
        if self.optimum is None or not math.isfinite(self.final_cost):
            return None
        return (self.final_cost - self.optimum) / self.optimum

    def metrics(self) -> Dict[str, float | None]:
        """Value of every metric of METRICS, None where undefined for this run"""

        if self.failed:
            return dict.fromkeys(METRICS)
        return {
            "iterations_to_target": self.iterations_to_target,
            "time_to_target_s": self.time_to_target_s,
            "final_cost": self.final_cost if math.isfinite(self.final_cost) else None,
            "first_solution_iter": self.first_solution_iter,
            "relative_error": self.relative_error,
        }


class MedianCI(NamedTuple):
    median: float
    ci_lo: float
    ci_hi: float
    low_n: bool


@dataclass(frozen=True)
class SummaryRow:
    """Median and confidence interval of one metric for one cell and planner

    warning is WARNING_EMPTY when no run had a value (median and interval are NaN), WARNING_LOW_N
    when there were fewer than LOW_N values, and empty otherwise.
    """

    cell: CellKey
    planner: str
    metric_name: str
    median: float
    ci_lo: float
    ci_hi: float
    n: int
    failures: int = 0
    warning: str = ""

    @property
    def low_n(self) -> bool:
        return self.n < LOW_N

    @property
    def empty(self) -> bool:
        return self.n == 0


def median_confidence_interval(values: Sequence[float], confidence: float = 0.95) -> MedianCI:
    """Median with a nonparametric confidence interval from binomial order statistics

    With the values sorted, the interval runs from the value of rank binom.ppf(α/2, n, 0.5) to the
    value of rank binom.ppf(1 − α/2, n, 0.5) + 1 (ranks from 1, clipped to [1, n]).
    For the values 1..100 this gives 50.5 and the interval [40, 61].

    Parameters
    ----------
    values : Sequence[float]
        The sample. Must not be empty.

    confidence : float, default 0.95
        Nominal coverage of the interval.

    Returns
    -------
    MedianCI
        low_n is set when there are too few values for the interval to reach its coverage.
    """

    if len(values) == 0:
        raise InvalidInputError("Cannot compute the median of no values")
    if not 0 < confidence < 1:
        raise InvalidInputError(f"confidence must be between 0 and 1, got {confidence!r}")

    ordered = sorted(float(v) for v in values)
    n = len(ordered)
    alpha = 1 - confidence
    lo_rank = int(stats.binom.ppf(alpha / 2, n, 0.5))
    hi_rank = int(stats.binom.ppf(1 - alpha / 2, n, 0.5)) + 1
    lo_rank = min(max(lo_rank, 1), n)
    hi_rank = min(max(hi_rank, 1), n)

    middle = float(median(ordered))
    return MedianCI(middle, ordered[lo_rank - 1], ordered[hi_rank - 1], n < LOW_N)


def _paired_differences(records: Sequence[RunRecord]) -> Dict[CellKey, Tuple[List[float], int]]:
    """(c_rrt_star − c_informed)/c_rrt_star per cell and seed, with the count of unpaired seeds"""

    by_seed: Dict[CellKey, Dict[int, Dict[str, RunRecord]]] = {}
    for record in records:
        by_seed.setdefault(record.cell_key, {}).setdefault(record.seed, {})[record.planner] = record

    differences = {}
    for cell, seeds in by_seed.items():
        values, missing = [], 0
        for pair in seeds.values():
            rrt, informed = pair.get("rrt_star"), pair.get("informed_rrt_star")
            if rrt is None and informed is None:
                continue
            if rrt is None or informed is None or rrt.failed or informed.failed:
                missing += 1
                continue
            if not (math.isfinite(rrt.final_cost) and math.isfinite(informed.final_cost)):
                missing += 1
                continue
            values.append((rrt.final_cost - informed.final_cost) / rrt.final_cost)
        differences[cell] = (values, missing)
    return differences


def summarize(
    records: Iterable[RunRecord], metrics: Sequence[str] = METRICS, paired: bool = False
) -> List[SummaryRow]:
    """Median and 95% confidence interval of each metric per cell and planner

    Runs where a metric is undefined (failed runs, or runs that never reached the target) are left
    out of its median and counted in the failures column. A cell and planner with no value
    for a metric gives a warning row: NaN statistics, n = 0 and warning WARNING_EMPTY. One with
    fewer than LOW_N values is kept with warning WARNING_LOW_N. Both also raise a UserWarning.

    Parameters
    ----------
    records : Iterable[RunRecord]
        Runs of one experiment.

    metrics : Sequence[str]
        Names from METRICS.

    paired : bool, default False
        Also summarize the paired relative cost difference of rrt_star and informed_rrt_star
        under the planner name 'paired'.
    """

    unknown = set(metrics) - set(METRICS)
    if unknown:
        raise InvalidInputError(f"Unknown metrics {sorted(unknown)}. Valid metrics are {METRICS}")

    records = sorted(records, key=lambda r: r.run_id)
    groups: Dict[Tuple[CellKey, str], List[RunRecord]] = {}
    for record in records:
        groups.setdefault((record.cell_key, record.planner), []).append(record)

    rows = []
    for (cell, planner), group in groups.items():
        all_metrics = [record.metrics() for record in group]
        for metric in metrics:
            values = [m[metric] for m in all_metrics if m[metric] is not None]
            rows.append(_summary_row(cell, planner, metric, values, len(group) - len(values)))

    if paired:
        for cell, (values, missing) in _paired_differences(records).items():
            rows.append(_summary_row(cell, PAIRED_PLANNER, PAIRED_METRIC, values, missing))
    return rows


def _summary_row(cell: CellKey, planner: str, metric: str, values: List[float], failures: int) -> SummaryRow:
    if not values:
        warnings.warn(f"No values of {metric} for {planner} in cell {dict(cell)}; the statistics are omitted")
        return SummaryRow(cell, planner, metric, math.nan, math.nan, math.nan, 0, failures, WARNING_EMPTY)

    summary = median_confidence_interval(values)
    if summary.low_n:
        warnings.warn(f"Only {len(values)} values of {metric} for {planner} in cell {dict(cell)}")
    return SummaryRow(
        cell=cell,
        planner=planner,
        metric_name=metric,
        median=summary.median,
        ci_lo=summary.ci_lo,
        ci_hi=summary.ci_hi,
        n=len(values),
        failures=failures,
        warning=WARNING_LOW_N if summary.low_n else "",
    )
