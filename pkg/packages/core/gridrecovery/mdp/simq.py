from typing import Protocol

import numpy as np

from gridrecovery.domain import Action, DamageScenario, Network, RewardSpec, State
from gridrecovery.mdp.rewards import is_goal, reward
from gridrecovery.mdp.simulator import Dynamics, transition


class BasePolicy(Protocol):
    """Policy rolled out after the first action to evaluate it"""

    def __call__(
        self, state: State, n_units: int, rng: np.random.Generator
    ) -> Action: ...


def sim_q(
    network: Network,
    state: State,
    action: Action,
    base_policy: BasePolicy,
    h: int,
    spec: RewardSpec,
    dynamics: Dynamics,
    rng: np.random.Generator,
    *,
    n_units: int,
    scenario: DamageScenario | None = None,
) -> float:
    """
    One sampled discounted return of (state, action) over h epochs.

    The action is applied first (undiscounted), then the base policy picks
    the assignment for up to h - 1 further epochs. The trajectory stops
    early once every component is repaired or the goal state is reached;
    the goal is absorbing with zero reward.

    Args:
        network: Network the state belongs to
        state: State to evaluate from
        action: First action
        base_policy: Policy for the remaining epochs
        h: Horizon in decision epochs (>= 1)
        spec: Reward definition
        dynamics: Completion model
        rng: Random stream for the simulator and base policy
        n_units: Repair units available to the base policy
        scenario: Damage scenario, needed only for STOCHASTIC_ENV

    Returns:
        Sum of gamma^k * reward_k for k = 0 .. (epochs run - 1)
    """
    if h < 1:
        msg = f"Horizon must be at least 1, got {h}"
        raise ValueError(msg)

    outcome = transition(network, state, action, dynamics, rng, scenario)
    total = reward(spec, network, state, action, outcome)
    current = outcome.next
    discount = 1.0

    for _ in range(h - 1):
        if current.is_repaired or is_goal(spec, network, current):
            break

        discount *= spec.gamma
        next_action = base_policy(current, n_units, rng)
        outcome = transition(network, current, next_action, dynamics, rng, scenario)
        total += discount * reward(spec, network, current, next_action, outcome)
        current = outcome.next

    return total
