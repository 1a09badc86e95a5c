from enum import Enum

import numpy as np
import numpy.typing as npt

from gridrecovery.config.presets import REPAIR_TIME_TABLE
from gridrecovery.domain import (
    Action,
    DamageScenario,
    DamageState,
    Network,
    RepairTimeTable,
    State,
    TransitionOutcome,
)
from gridrecovery.validation.rules import validate_action_targets
from gridrecovery.validation.validator import ContractViolation


EPS_RHO = 1e-6


class Dynamics(Enum):
    """How repair completions are resolved"""

    STOCHASTIC_PLANNER = "stochastic_planner"  # fresh exponential race
    STOCHASTIC_ENV = "stochastic_env"  # scenario's realized durations
    DETERMINISTIC = "deterministic"  # remaining time is exact


def initial_state(
    network: Network,
    scenario: DamageScenario,
    table: RepairTimeTable = REPAIR_TIME_TABLE,
    *,
    deterministic: bool = False,
) -> State:
    """
    State at the first decision epoch.

    The planner sees the table's expected repair time for every damaged
    component. In deterministic mode it sees the realized durations instead.
    """
    if scenario.size != network.size:
        msg = f"Scenario has {scenario.size} components, network has {network.size}"
        raise ValueError(msg)

    damage = np.array([int(s) for s in scenario.initial_state], dtype=np.int8)

    if deterministic:
        rho = np.array(scenario.realized_duration, dtype=np.float64)
    else:
        rho = np.array(
            [
                table.mean(component.kind, state)
                for component, state in zip(
                    network.components, scenario.initial_state, strict=True
                )
            ],
            dtype=np.float64,
        )

    damaged = damage != DamageState.UNDAMAGED
    rho[damaged] = np.maximum(rho[damaged], EPS_RHO)
    rho[~damaged] = 0.0

    return State(damage, rho, np.zeros(network.size))


def _race_durations(
    state: State,
    assigned: npt.NDArray[np.intp],
    dynamics: Dynamics,
    rng: np.random.Generator | None,
    scenario: DamageScenario | None,
) -> npt.NDArray[np.float64]:
    rho = state.rho[assigned]

    if dynamics is Dynamics.DETERMINISTIC:
        return rho.copy()

    if dynamics is Dynamics.STOCHASTIC_PLANNER:
        if rng is None:
            msg = "Stochastic planner dynamics need a random generator"
            raise ValueError(msg)
        return np.maximum(rng.exponential(rho), np.finfo(np.float64).tiny)

    if scenario is None:
        msg = "Environment dynamics need the damage scenario"
        raise ValueError(msg)

    realized = np.asarray(scenario.realized_duration, dtype=np.float64)[assigned]
    return np.maximum(realized - state.work_done[assigned], EPS_RHO)


def transition(
    network: Network,
    state: State,
    action: Action,
    dynamics: Dynamics,
    rng: np.random.Generator | None = None,
    scenario: DamageScenario | None = None,
) -> TransitionOutcome:
    """
    Advance to the next repair completion.

    Only assigned components make progress. The first assigned component to
    finish (all of them on an exact tie) becomes undamaged; the others lose
    r days of remaining time, floored at EPS_RHO so they never look repaired
    without completing.

    Args:
        network: Network the state belongs to
        state: Current state
        action: Repair unit assignment
        dynamics: Completion model
        rng: Random generator, required for STOCHASTIC_PLANNER
        scenario: Damage scenario, required for STOCHASTIC_ENV

    Returns:
        TransitionOutcome with the next state, inter-completion time and
        completed components

    Raises:
        ContractViolation: If the action assigns nothing or targets an
            undamaged component
    """
    if state.size != network.size:
        msg = f"State has {state.size} components, network has {network.size}"
        raise ValueError(msg)

    errors = validate_action_targets(state, action)
    if not action.components:
        errors.append("Action assigns no repair unit")
    if errors:
        msg = "Transition rejected:\n" + "\n".join(f"  - {e}" for e in errors)
        raise ContractViolation(msg)

    assigned = np.asarray(action.components, dtype=np.intp)
    durations = _race_durations(state, assigned, dynamics, rng, scenario)

    r = float(durations.min())
    completed = assigned[durations == r]

    damage = state.damage.copy()
    rho = state.rho.copy()
    work_done = state.work_done.copy()

    rho[assigned] = np.maximum(rho[assigned] - r, EPS_RHO)
    work_done[assigned] += r

    damage[completed] = DamageState.UNDAMAGED
    rho[completed] = 0.0
    work_done[completed] = 0.0

    next_state = State(
        damage,
        rho,
        work_done,
        epoch=state.epoch + 1,
        elapsed_days=state.elapsed_days + r,
    )
    return TransitionOutcome(next_state, r, tuple(int(c) for c in completed))
