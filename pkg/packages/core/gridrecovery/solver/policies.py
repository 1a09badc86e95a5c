import itertools
import math

from dataclasses import dataclass
from enum import Enum
from typing import ClassVar

import numpy as np

from gridrecovery.domain import Action, State
from gridrecovery.mdp.simq import BasePolicy


class BasePolicyKind(Enum):
    """Base policies available to rollout"""

    RANDOM = "random"
    SHORTEST_REPAIR = "shortest_repair"


def _units_used(state: State, n_units: int) -> int:
    if n_units < 1:
        msg = f"n_units must be at least 1, got {n_units}"
        raise ValueError(msg)

    if state.is_repaired:
        msg = "No damaged component left to assign"
        raise ValueError(msg)

    return min(n_units, state.damaged_count)


def random_base_action(
    state: State, n_units: int, rng: np.random.Generator
) -> Action:
    """
    Uniformly random min(N, M) subset of the damaged components.

    When there are no more damaged components than units, every damaged
    component gets one and the extra units sit idle.
    """
    k = _units_used(state, n_units)
    damaged = state.damaged_components
    if k == len(damaged):
        return Action(damaged)

    picked = rng.choice(len(damaged), size=k, replace=False)
    return Action(tuple(damaged[i] for i in picked))


def shortest_repair_action(state: State, n_units: int) -> Action:
    """Damaged components with the least remaining repair time, lowest id on ties"""
    k = _units_used(state, n_units)
    damaged = np.asarray(state.damaged_components, dtype=np.intp)
    order = np.lexsort((damaged, state.rho[damaged]))
    return Action(tuple(int(c) for c in damaged[order[:k]]))


@dataclass(frozen=True)
class RandomBasePolicy:
    kind: ClassVar[BasePolicyKind] = BasePolicyKind.RANDOM

    def __call__(
        self, state: State, n_units: int, rng: np.random.Generator
    ) -> Action:
        return random_base_action(state, n_units, rng)

    def distribution(self, state: State, n_units: int) -> list[tuple[Action, float]]:
        """Every assignment with its probability (small states only)"""
        k = _units_used(state, n_units)
        subsets = list(itertools.combinations(state.damaged_components, k))
        probability = 1.0 / math.comb(state.damaged_count, k)
        return [(Action(subset), probability) for subset in subsets]


@dataclass(frozen=True)
class ShortestRepairFirst:
    kind: ClassVar[BasePolicyKind] = BasePolicyKind.SHORTEST_REPAIR

    def __call__(
        self, state: State, n_units: int, rng: np.random.Generator
    ) -> Action:
        del rng
        return shortest_repair_action(state, n_units)

    def distribution(self, state: State, n_units: int) -> list[tuple[Action, float]]:
        return [(shortest_repair_action(state, n_units), 1.0)]


_BASE_POLICIES: dict[BasePolicyKind, BasePolicy] = {
    BasePolicyKind.RANDOM: RandomBasePolicy(),
    BasePolicyKind.SHORTEST_REPAIR: ShortestRepairFirst(),
}


def make_base_policy(kind: BasePolicyKind) -> BasePolicy:
    return _BASE_POLICIES[kind]
