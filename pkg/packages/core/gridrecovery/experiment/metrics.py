import math

from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np
import numpy.typing as npt

from gridrecovery.domain import BatchResult, EpisodeTrace


GRID_STEP_DAYS = 0.1


def cumulative_moving_average(series: Sequence[float]) -> list[float]:
    """
    Running mean of a series.

    Example:
        >>> cumulative_moving_average([2.0, 4.0, 6.0])
        [2.0, 3.0, 4.0]
    """
    if len(series) == 0:
        msg = "Cannot average an empty series"
        raise ValueError(msg)

    values = np.asarray(series, dtype=np.float64)
    averages = np.cumsum(values) / np.arange(1, values.size + 1)
    return [float(v) for v in averages]


def benefit_metric(trace: EpisodeTrace) -> float:
    """
    Population-weighted time with power, normalized by the recovery time.

    Sum of n_t * r_t over the epochs divided by t_tot. A trace without
    damage has powered its initial population all along.
    """
    if not trace.steps or trace.t_tot_days <= 0:
        return float(trace.initial_powered)

    area = math.fsum(step.powered * step.r for step in trace.steps)
    return area / trace.t_tot_days


def resample_trace(
    trace: EpisodeTrace,
    grid: npt.NDArray[np.float64],
) -> npt.NDArray[np.float64]:
    """Powered population on a day grid, holding the last value between epochs"""
    times = np.array([0.0, *(step.elapsed_days for step in trace.steps)])
    powered = np.array(
        [trace.initial_powered, *trace.powered_series], dtype=np.float64
    )
    index = np.searchsorted(times, grid, side="right") - 1
    return powered[np.clip(index, 0, None)]


def day_grid(until: float, step: float = GRID_STEP_DAYS) -> npt.NDArray[np.float64]:
    """Grid 0, step, 2*step, ... covering `until`"""
    if step <= 0:
        msg = f"Grid step must be positive, got {step}"
        raise ValueError(msg)
    return np.arange(math.ceil(until / step - 1e-9) + 1) * step


def average_recovery_path(
    traces: Sequence[EpisodeTrace],
    step: float = GRID_STEP_DAYS,
) -> tuple[npt.NDArray[np.float64], npt.NDArray[np.float64]]:
    """
    Pointwise mean recovery path over several scenarios.

    Each trace is resampled onto a common day grid reaching the longest
    recovery; finished traces stay at their final value.

    Returns:
        (grid in days, mean powered population)
    """
    if not traces:
        msg = "Cannot average zero traces"
        raise ValueError(msg)

    grid = day_grid(max(t.t_tot_days for t in traces), step)
    paths = np.vstack([resample_trace(t, grid) for t in traces])
    return grid, paths.mean(axis=0)


@dataclass(frozen=True)
class SelectorSummary:
    """Scenario averages of one selector"""

    selector: str
    scenarios: int
    mean_days_to_goal: float
    mean_t_tot_days: float
    mean_benefit: float


def summarize(result: BatchResult) -> list[SelectorSummary]:
    summaries = []
    for selector in result.selectors:
        traces = result.traces[selector]
        summaries.append(
            SelectorSummary(
                selector=selector,
                scenarios=len(traces),
                mean_days_to_goal=float(np.mean([t.days_to_goal for t in traces])),
                mean_t_tot_days=float(np.mean([t.t_tot_days for t in traces])),
                mean_benefit=float(np.mean([t.benefit for t in traces])),
            )
        )
    return summaries
