"""Exact Q values for tiny instances under deterministic dynamics"""

import itertools

from typing import Protocol

from gridrecovery.domain import Action, Network, RewardSpec, State
from gridrecovery.mdp.rewards import is_goal, reward
from gridrecovery.mdp.simulator import Dynamics, transition


class ExplicitPolicy(Protocol):
    """Policy that can list its action distribution"""

    def distribution(
        self, state: State, n_units: int
    ) -> list[tuple[Action, float]]: ...


StateKey = tuple[bytes, bytes]


def _key(state: State) -> StateKey:
    return state.damage.tobytes(), state.rho.tobytes()


def _is_absorbing(spec: RewardSpec, network: Network, state: State) -> bool:
    return state.is_repaired or is_goal(spec, network, state)


def all_actions(state: State, n_units: int) -> list[Action]:
    """Every min(N, M) subset of the damaged components"""
    k = min(n_units, state.damaged_count)
    return [
        Action(subset)
        for subset in itertools.combinations(state.damaged_components, k)
    ]


def _step(
    network: Network, spec: RewardSpec, state: State, action: Action
) -> tuple[float, State]:
    outcome = transition(network, state, action, Dynamics.DETERMINISTIC)
    return reward(spec, network, state, action, outcome), outcome.next


def policy_q_value(
    network: Network,
    state: State,
    action: Action,
    base_policy: ExplicitPolicy,
    h: int,
    spec: RewardSpec,
    *,
    n_units: int,
) -> float:
    """
    Exact expected SimQ return of (state, action) under a base policy.

    Enumerates the base policy's action distribution at every epoch, so it
    is only usable on tiny instances.

    Raises:
        ValueError: If h < 1
    """
    if h < 1:
        msg = f"Horizon must be at least 1, got {h}"
        raise ValueError(msg)

    value, next_state = _step(network, spec, state, action)
    if h == 1 or _is_absorbing(spec, network, next_state):
        return value

    tail = sum(
        probability
        * policy_q_value(
            network,
            next_state,
            next_action,
            base_policy,
            h - 1,
            spec,
            n_units=n_units,
        )
        for next_action, probability in base_policy.distribution(next_state, n_units)
    )
    return value + spec.gamma * tail


def optimal_q_values(
    network: Network,
    state: State,
    spec: RewardSpec,
    *,
    n_units: int,
) -> dict[Action, float]:
    """
    Optimal infinite-horizon Q value of every action at the state.

    Deterministic dynamics make the reachable state graph finite and
    acyclic (each step repairs a component), so the Bellman recursion is
    evaluated exactly with memoization. Best means smallest for R1.

    Returns:
        Mapping from each available action to its optimal Q value
    """
    minimize = spec.objective.minimize
    memo: dict[StateKey, float] = {}

    def state_value(current: State) -> float:
        if _is_absorbing(spec, network, current):
            return 0.0

        key = _key(current)
        if key not in memo:
            values = [action_value(current, a) for a in all_actions(current, n_units)]
            memo[key] = min(values) if minimize else max(values)
        return memo[key]

    def action_value(current: State, action: Action) -> float:
        value, next_state = _step(network, spec, current, action)
        return value + spec.gamma * state_value(next_state)

    actions = all_actions(state, n_units)
    return {action: action_value(state, action) for action in actions}
