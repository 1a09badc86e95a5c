from collections.abc import Callable, Mapping, Sequence

import numpy as np
import pytest

from gridrecovery.domain import DamageState, Network, State
from gridrecovery.network.topology import build_synthetic_network


StarFactory = Callable[[Sequence[int]], Network]
StateFactory = Callable[[Network, Mapping[int, float]], State]


@pytest.fixture
def star() -> StarFactory:
    """Substation, one transmission segment and one leaf per cell.

    Leaf of cell i is component i + 2.
    """

    def build(populations: Sequence[int]) -> Network:
        return build_synthetic_network(len(populations), 1, 100.0, populations)

    return build


@pytest.fixture
def make_state() -> StateFactory:
    """State with the given components damaged and their remaining times"""

    def build(network: Network, remaining: Mapping[int, float]) -> State:
        damage = np.zeros(network.size, dtype=np.int8)
        rho = np.zeros(network.size)
        for component, days in remaining.items():
            damage[component] = DamageState.MODERATE
            rho[component] = days
        return State(damage, rho, np.zeros(network.size))

    return build
