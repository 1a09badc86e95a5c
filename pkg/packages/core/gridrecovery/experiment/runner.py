import logging
import math

from collections.abc import Sequence
from dataclasses import replace

import numpy as np
from joblib import Parallel, delayed

from gridrecovery.config.presets import REPAIR_TIME_TABLE, RU_FRACTION
from gridrecovery.domain import (
    BatchResult,
    DamageScenario,
    EpisodeStep,
    EpisodeTrace,
    Network,
    RepairTimeTable,
    RewardSpec,
)
from gridrecovery.experiment.metrics import benefit_metric
from gridrecovery.mdp.rewards import goal_population
from gridrecovery.mdp.simulator import Dynamics, initial_state, transition
from gridrecovery.network.power import powered_population
from gridrecovery.solver.selectors import SelectorSpec, make_selector
from gridrecovery.validation.validator import (
    ContractViolation,
    validate_action,
    validate_scenario,
)


logger = logging.getLogger(__name__)


def units_for(
    initial_damaged: int,
    ru_fraction: float = RU_FRACTION,
    override: int | None = None,
) -> int:
    """
    Repair units for a scenario.

    Defaults to floor(ru_fraction * damaged), at least one unit.

    Example:
        >>> units_for(196)
        29
    """
    if override is not None:
        if override < 1:
            msg = f"Unit override must be at least 1, got {override}"
            raise ValueError(msg)
        return override

    if not 0 < ru_fraction <= 1:
        msg = f"ru_fraction must be in (0, 1], got {ru_fraction}"
        raise ValueError(msg)

    # tolerance keeps 0.15 * 20 at 3 despite binary rounding
    return max(1, math.floor(ru_fraction * initial_damaged + 1e-9))


def run_recovery(
    network: Network,
    scenario: DamageScenario,
    selector_spec: SelectorSpec,
    spec: RewardSpec,
    rng: np.random.Generator,
    *,
    table: RepairTimeTable = REPAIR_TIME_TABLE,
    deterministic: bool = False,
    n_units: int | None = None,
    ru_fraction: float = RU_FRACTION,
) -> EpisodeTrace:
    """
    Repair one scenario to completion, reassigning units at every completion.

    The environment resolves completions with the scenario's realized
    durations (exactly in deterministic mode), while the selector plans
    with its own simulations.

    Args:
        network: Network to repair
        scenario: Damage scenario for the network
        selector_spec: Action selector to run
        spec: Objective and discount
        rng: Random stream for the selector
        table: Expected repair times the planner sees
        deterministic: Plan and execute with exact repair times
        n_units: Repair unit override
        ru_fraction: Share of damaged components that gets a unit

    Returns:
        EpisodeTrace of the recovery

    Raises:
        ValidationError: If the scenario does not fit the network
        ContractViolation: If the selector returns an invalid action
    """
    validate_scenario(network, scenario)

    state = initial_state(network, scenario, table, deterministic=deterministic)
    units = units_for(state.damaged_count, ru_fraction, n_units)
    planning = Dynamics.DETERMINISTIC if deterministic else Dynamics.STOCHASTIC_PLANNER
    execution = Dynamics.DETERMINISTIC if deterministic else Dynamics.STOCHASTIC_ENV
    selector = make_selector(selector_spec, network, spec, units, planning)

    goal = goal_population(spec, network)
    initial_powered = powered_population(network, state.damaged_mask)
    initial_damaged = state.damaged_count
    days_to_goal = 0.0 if initial_powered >= goal else math.nan

    steps = []
    while not state.is_repaired:
        action = selector.select(state, rng)
        try:
            validate_action(state, action, units)
        except ContractViolation:
            logger.exception(
                "Selector %s failed at epoch %d of scenario %d",
                selector_spec.label,
                state.epoch,
                scenario.seed,
            )
            raise

        epoch = state.epoch
        outcome = transition(network, state, action, execution, rng, scenario)
        state = outcome.next
        powered = powered_population(network, state.damaged_mask)
        steps.append(
            EpisodeStep(
                epoch, state.elapsed_days, powered, outcome.r, action.components
            )
        )
        if math.isnan(days_to_goal) and powered >= goal:
            days_to_goal = state.elapsed_days

        logger.debug(
            "Epoch %d: assigned %s, completed %s after %.4f days, %d powered",
            epoch,
            action.components,
            outcome.completed,
            outcome.r,
            powered,
        )

    trace = EpisodeTrace(
        selector=selector_spec.label,
        scenario_seed=scenario.seed,
        n_units=units,
        initial_damaged=initial_damaged,
        initial_powered=initial_powered,
        total_population=network.total_population,
        steps=tuple(steps),
        days_to_goal=days_to_goal,
        t_tot_days=state.elapsed_days,
        benefit=0.0,
    )
    trace = replace(trace, benefit=benefit_metric(trace))

    logger.info(
        "Scenario %d with %s: %d damaged, %d units, goal after %.3f days, "
        "repaired after %.3f days",
        scenario.seed,
        selector_spec.label,
        initial_damaged,
        units,
        days_to_goal,
        trace.t_tot_days,
    )
    return trace


def _labels(selectors: Sequence[SelectorSpec]) -> list[str]:
    labels = [s.label for s in selectors]
    if len(set(labels)) != len(labels):
        msg = f"Selector labels must be unique, got {labels}"
        raise ValueError(msg)
    return labels


def run_batch(
    network: Network,
    scenarios: Sequence[DamageScenario],
    selectors: Sequence[SelectorSpec],
    spec: RewardSpec,
    *,
    master_seed: int,
    n_jobs: int = 1,
    table: RepairTimeTable = REPAIR_TIME_TABLE,
    deterministic: bool = False,
    n_units: int | None = None,
    ru_fraction: float = RU_FRACTION,
    config_digest: str = "",
) -> BatchResult:
    """
    Run every selector on every scenario.

    All selectors see the same scenarios. Each (scenario, selector) pair
    draws from its own stream derived from the master seed, so results are
    identical for any number of workers.

    Args:
        network: Network to repair
        scenarios: Damage scenarios, at least one
        selectors: Selectors to compare, with unique labels
        spec: Objective and discount
        master_seed: Seed all selector streams derive from
        n_jobs: joblib worker count
        table: Expected repair times the planner sees
        deterministic: Plan and execute with exact repair times
        n_units: Repair unit override
        ru_fraction: Share of damaged components that gets a unit
        config_digest: Digest of the configuration that produced the batch

    Returns:
        BatchResult with one trace per scenario for each selector
    """
    if not scenarios:
        msg = "At least one scenario is required"
        raise ValueError(msg)

    if not selectors:
        msg = "At least one selector is required"
        raise ValueError(msg)

    labels = _labels(selectors)
    tasks = [
        (k, j) for k in range(len(scenarios)) for j in range(len(selectors))
    ]

    logger.info(
        "Running %d scenarios x %d selectors on %d workers",
        len(scenarios),
        len(selectors),
        n_jobs,
    )

    traces = Parallel(n_jobs=n_jobs)(
        delayed(run_recovery)(
            network,
            scenarios[k],
            selectors[j],
            spec,
            np.random.default_rng(
                np.random.SeedSequence(entropy=master_seed, spawn_key=(k, j))
            ),
            table=table,
            deterministic=deterministic,
            n_units=n_units,
            ru_fraction=ru_fraction,
        )
        for k, j in tasks
    )

    by_selector: dict[str, list[EpisodeTrace]] = {label: [] for label in labels}
    for (_, j), trace in zip(tasks, traces, strict=True):
        by_selector[labels[j]].append(trace)

    logger.info("Batch finished")
    return BatchResult(
        scenario_seeds=tuple(s.seed for s in scenarios),
        traces={label: tuple(ts) for label, ts in by_selector.items()},
        config_digest=config_digest,
    )
