import logging

import numpy as np

from gridrecovery.config.presets import DEFAULT_FRAGILITY, REPAIR_TIME_TABLE
from gridrecovery.domain import (
    ComponentKind,
    DamageScenario,
    DamageState,
    FragilityProfile,
    Network,
    RepairTimeTable,
)
from gridrecovery.validation.validator import validate_scenario


logger = logging.getLogger(__name__)

_STATES = tuple(DamageState)


def sample_repair_time(
    kind: ComponentKind,
    state: DamageState,
    table: RepairTimeTable,
    rng: np.random.Generator,
) -> float:
    """
    Draw a repair duration in days.

    Undamaged components take no time; damaged ones take an exponential
    time with the table's expected repair time as mean.
    """
    if state == DamageState.UNDAMAGED:
        return 0.0

    mean = table.mean(kind, state)

    # a zero duration would make a damaged component look undamaged
    draw = float(rng.exponential(mean)) if mean > 0 else 0.0
    return max(draw, float(np.finfo(np.float64).tiny))


def sample_scenario(
    network: Network,
    profile: FragilityProfile = DEFAULT_FRAGILITY,
    table: RepairTimeTable = REPAIR_TIME_TABLE,
    seed: int = 0,
) -> DamageScenario:
    """
    Sample initial damage and realized repair durations for every component.

    Damage states are drawn independently per component from the kind's
    fragility mass. The result is a pure function of the arguments.

    Args:
        network: Network to damage
        profile: Damage-state probabilities per component kind
        table: Expected repair times
        seed: Seed for the scenario's random stream

    Returns:
        Validated DamageScenario
    """
    rng = np.random.default_rng(seed)

    states = []
    durations = []
    for component in network.components:
        draw = rng.choice(len(_STATES), p=profile.masses[component.kind])
        state = _STATES[int(draw)]
        states.append(state)
        durations.append(sample_repair_time(component.kind, state, table, rng))

    scenario = DamageScenario(seed, tuple(states), tuple(durations))
    validate_scenario(network, scenario)

    logger.debug(
        "Scenario %d: %d of %d components damaged",
        seed,
        scenario.damaged_count,
        network.size,
    )
    return scenario


def scenario_seeds(master_seed: int, count: int) -> list[int]:
    """Independent per-scenario seeds derived from one master seed"""
    children = np.random.SeedSequence(master_seed).spawn(count)
    return [int(child.generate_state(1, dtype=np.uint64)[0]) for child in children]


def sample_scenarios(
    network: Network,
    count: int,
    master_seed: int,
    profile: FragilityProfile = DEFAULT_FRAGILITY,
    table: RepairTimeTable = REPAIR_TIME_TABLE,
) -> list[DamageScenario]:
    return [
        sample_scenario(network, profile, table, seed)
        for seed in scenario_seeds(master_seed, count)
    ]
