from dataclasses import dataclass
from enum import Enum

import numpy as np

from gridrecovery.config.presets import DEFAULT_HORIZON
from gridrecovery.domain import Action, Network, RewardSpec, State
from gridrecovery.mdp.simulator import Dynamics
from gridrecovery.solver.belief import RuMapping
from gridrecovery.solver.candidates import sample_candidates
from gridrecovery.solver.policies import BasePolicyKind, make_base_policy
from gridrecovery.solver.rollout import (
    Budget,
    RolloutContext,
    adaptive_rollout_linear_belief,
    rollout_linear_belief,
    uniform_rollout,
)


class SelectorKind(Enum):
    """Action-selection strategies"""

    BASE = "base"
    UNIFORM_ROLLOUT = "uniform_rollout"
    LINEAR_BELIEF = "linear_belief"
    ADAPTIVE = "adaptive"


@dataclass(frozen=True)
class SelectorSpec:
    """Scenario-independent description of an action selector"""

    kind: SelectorKind
    name: str | None = None
    horizon: int = DEFAULT_HORIZON
    alpha_tilde: int = 100
    beta: int = 10
    b_star: int = 0
    base_policy: BasePolicyKind = BasePolicyKind.RANDOM
    mapping: RuMapping = RuMapping.ASCENDING
    n_jobs: int = 1

    @property
    def label(self) -> str:
        return self.name or self.kind.value

    @property
    def budget(self) -> Budget:
        return Budget(self.alpha_tilde, self.beta, self.b_star)


@dataclass(frozen=True)
class Selector:
    """Selector bound to a network, objective and repair unit count"""

    spec: SelectorSpec
    context: RolloutContext

    @property
    def n_units(self) -> int:
        return self.context.n_units

    def select(self, state: State, rng: np.random.Generator) -> Action:
        """Assignment for the state; min(N, M) damaged components"""
        kind = self.spec.kind

        if kind is SelectorKind.BASE:
            return self.context.base_policy(state, self.n_units, rng)

        if kind is SelectorKind.UNIFORM_ROLLOUT:
            if state.damaged_count <= self.n_units:
                return Action(state.damaged_components)
            candidates = sample_candidates(
                state, self.n_units, self.spec.alpha_tilde, rng
            )
            return uniform_rollout(
                self.context, state, candidates, self.spec.beta, rng
            )

        if kind is SelectorKind.LINEAR_BELIEF:
            return rollout_linear_belief(
                self.context, state, self.spec.budget, rng, self.spec.mapping
            )

        return adaptive_rollout_linear_belief(
            self.context, state, self.spec.budget, rng, self.spec.mapping
        )


def make_selector(
    spec: SelectorSpec,
    network: Network,
    reward_spec: RewardSpec,
    n_units: int,
    dynamics: Dynamics = Dynamics.STOCHASTIC_PLANNER,
) -> Selector:
    """
    Bind a selector description to one recovery problem.

    Args:
        spec: Selector description
        network: Network being repaired
        reward_spec: Objective and discount
        n_units: Repair units for this scenario
        dynamics: Completion model used by planning simulations

    Returns:
        Selector ready to act
    """
    context = RolloutContext(
        network=network,
        spec=reward_spec,
        n_units=n_units,
        base_policy=make_base_policy(spec.base_policy),
        horizon=spec.horizon,
        dynamics=dynamics,
        n_jobs=spec.n_jobs,
    )
    return Selector(spec, context)
