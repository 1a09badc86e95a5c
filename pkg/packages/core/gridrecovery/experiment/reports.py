import csv
import logging

from collections.abc import Iterable, Sequence
from pathlib import Path

from gridrecovery.domain import BatchResult, EpisodeTrace
from gridrecovery.experiment.metrics import (
    GRID_STEP_DAYS,
    average_recovery_path,
    cumulative_moving_average,
)


logger = logging.getLogger(__name__)

TRACE_HEADER = ("epoch", "elapsed_days", "n_t", "r_t")
SUMMARY_HEADER = (
    "scenario_id",
    "scenario_seed",
    "selector",
    "n_units",
    "days_to_goal",
    "t_tot",
    "benefit",
)
CMA_HEADER = ("selector", "scenarios", "cma_days_to_goal", "cma_benefit")
PATH_HEADER = ("selector", "day", "mean_powered")


def _write_rows(
    path: Path, header: Sequence[str], rows: Iterable[Sequence[object]]
) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
    return path


def write_trace_csv(path: Path, trace: EpisodeTrace) -> Path:
    """One row per decision epoch, numbered from 0"""
    return _write_rows(
        path,
        TRACE_HEADER,
        ((s.epoch, s.elapsed_days, s.powered, s.r) for s in trace.steps),
    )


def write_summary_csv(path: Path, result: BatchResult) -> Path:
    """One row per (scenario, selector)"""
    rows = [
        (
            k,
            trace.scenario_seed,
            selector,
            trace.n_units,
            trace.days_to_goal,
            trace.t_tot_days,
            trace.benefit,
        )
        for selector in result.selectors
        for k, trace in enumerate(result.traces[selector])
    ]
    return _write_rows(path, SUMMARY_HEADER, rows)


def write_cma_csv(path: Path, result: BatchResult) -> Path:
    """Cumulative moving averages of days to goal and benefit per selector"""
    rows = []
    for selector in result.selectors:
        traces = result.traces[selector]
        days = cumulative_moving_average([t.days_to_goal for t in traces])
        benefit = cumulative_moving_average([t.benefit for t in traces])
        rows.extend(
            (selector, k + 1, d, b)
            for k, (d, b) in enumerate(zip(days, benefit, strict=True))
        )
    return _write_rows(path, CMA_HEADER, rows)


def write_average_path_csv(
    path: Path, result: BatchResult, step: float = GRID_STEP_DAYS
) -> Path:
    """Mean recovery path per selector on a common day grid"""
    rows = []
    for selector in result.selectors:
        grid, mean = average_recovery_path(result.traces[selector], step)
        rows.extend(
            (selector, round(float(day), 10), float(value))
            for day, value in zip(grid, mean, strict=True)
        )
    return _write_rows(path, PATH_HEADER, rows)


def write_batch(output_dir: Path, result: BatchResult) -> list[Path]:
    """
    Write every CSV of a batch.

    Layout: traces/<selector>_scenario<k>.csv, summary.csv, cma.csv and
    average_path.csv under output_dir.

    Returns:
        Paths written, in a stable order
    """
    written = []

    for selector in result.selectors:
        for k, trace in enumerate(result.traces[selector]):
            written.append(
                write_trace_csv(
                    output_dir / "traces" / f"{selector}_scenario{k}.csv", trace
                )
            )

    written.append(write_summary_csv(output_dir / "summary.csv", result))
    written.append(write_cma_csv(output_dir / "cma.csv", result))
    written.append(write_average_path_csv(output_dir / "average_path.csv", result))

    logger.info("Wrote %d files to %s", len(written), output_dir)
    return written
