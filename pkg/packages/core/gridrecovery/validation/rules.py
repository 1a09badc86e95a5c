import math

import networkx as nx

from gridrecovery.domain import (
    Action,
    ComponentKind,
    DamageScenario,
    DamageState,
    Network,
    State,
)


def validate_single_root(network: Network) -> list[str]:
    """Exactly one substation, and it is the only component without a parent"""
    errors = []

    roots = [c for c in network.components if c.parent is None]
    substations = [c for c in network.components if c.kind == ComponentKind.SUBSTATION]

    if len(substations) != 1:
        errors.append(f"Network has {len(substations)} substations (must be 1)")

    if len(roots) != 1:
        errors.append(f"Network has {len(roots)} parentless components (must be 1)")
    elif roots[0].kind != ComponentKind.SUBSTATION:
        errors.append(f"Root component {roots[0].id} is not a substation")

    return errors


def validate_tree(network: Network) -> list[str]:
    """Parent ids are valid and every component reaches the root without cycles"""
    errors = []
    size = network.size

    for component in network.components:
        parent = component.parent
        if parent is None:
            continue
        if not 0 <= parent < size:
            errors.append(f"Component {component.id} has invalid parent {parent}")
        elif parent == component.id:
            errors.append(f"Component {component.id} is its own parent")

    if errors or nx.is_arborescence(network.graph):
        return errors

    try:
        cycle = nx.find_cycle(network.graph)
    except nx.NetworkXNoCycle:
        # a forest; validate_single_root reports the extra roots
        return errors

    members = sorted({int(edge[0]) for edge in cycle})
    errors.append(f"Cycle detected through components {members}")
    return errors


def validate_cells(network: Network) -> list[str]:
    """Cells have nonnegative population and are served by a distribution leaf"""
    errors = []

    for cell in network.cells:
        if cell.population < 0:
            errors.append(f"Cell {cell.id} has negative population {cell.population}")

        if not 0 <= cell.serving_leaf < network.size:
            errors.append(f"Cell {cell.id} has invalid leaf {cell.serving_leaf}")
            continue

        leaf = network.components[cell.serving_leaf]
        if leaf.kind != ComponentKind.DISTRIBUTION:
            errors.append(
                f"Cell {cell.id} is served by {leaf.kind.value} component {leaf.id}"
            )

    return errors


def validate_scenario_shape(network: Network, scenario: DamageScenario) -> list[str]:
    """Scenario vectors match the network size"""
    errors = []

    if scenario.size != network.size:
        errors.append(
            f"Scenario {scenario.seed} has {scenario.size} states "
            f"for {network.size} components"
        )

    if len(scenario.realized_duration) != scenario.size:
        errors.append(
            f"Scenario {scenario.seed} has {len(scenario.realized_duration)} durations "
            f"for {scenario.size} states"
        )

    return errors


def validate_scenario_durations(scenario: DamageScenario) -> list[str]:
    """Durations are nonnegative and zero exactly for undamaged components"""
    errors = []

    for index, (state, duration) in enumerate(
        zip(scenario.initial_state, scenario.realized_duration, strict=False)
    ):
        if not math.isfinite(duration) or duration < 0:
            errors.append(f"Component {index} has invalid duration {duration}")
        elif (state == DamageState.UNDAMAGED) != (duration == 0):
            errors.append(
                f"Component {index} is {state.name} with duration {duration}"
            )

    return errors


def validate_state_consistency(state: State) -> list[str]:
    """Remaining repair time is zero exactly for undamaged components"""
    zero_rho = state.rho == 0
    undamaged = ~state.damaged_mask
    return [
        f"Component {index} has damage {int(state.damage[index])} "
        f"and rho {float(state.rho[index])}"
        for index in (zero_rho != undamaged).nonzero()[0]
    ]


def validate_action_targets(state: State, action: Action) -> list[str]:
    """Assigned components exist and are damaged"""
    errors = []

    for component in action.components:
        if not 0 <= component < state.size:
            errors.append(f"Action assigns unknown component {component}")
        elif not state.damaged_mask[component]:
            errors.append(f"Action assigns undamaged component {component}")

    return errors


def validate_action_size(state: State, action: Action, n_units: int) -> list[str]:
    """Action uses min(N, M) repair units"""
    expected = min(n_units, state.damaged_count)
    if len(action) != expected:
        return [f"Action assigns {len(action)} units (expected {expected})"]
    return []
