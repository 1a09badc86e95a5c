import math
import sys

from collections.abc import Iterable
from dataclasses import dataclass
from fractions import Fraction

if sys.version_info >= (3, 11):
    from typing import Self
else:
    from typing_extensions import Self

import numpy as np
import numpy.typing as npt

from gridrecovery.domain import (
    Action,
    Network,
    Objective,
    RewardSpec,
    State,
    TransitionOutcome,
)
from gridrecovery.network.power import powered_population


def goal_population(spec: RewardSpec, network: Network) -> int:
    """
    Persons that must have power for the goal to be reached.

    R1 needs ceil(zeta * p) persons, R2 needs everyone.
    """
    total = network.total_population
    if spec.objective is Objective.R2:
        return total
    # exact decimal arithmetic so 0.8 * 100 is 80, not 80.00000000000001
    return math.ceil(Fraction(str(spec.zeta)) * total)


def is_goal(spec: RewardSpec, network: Network, state: State) -> bool:
    return powered_population(network, state.damaged_mask) >= goal_population(
        spec, network
    )


def bounded(spec: RewardSpec, value: float) -> float:
    """Scale by the reward cap into [0, 1] when a cap is configured"""
    if spec.reward_cap is None:
        return value
    return min(value / spec.reward_cap, 1.0)


def reward(
    spec: RewardSpec,
    network: Network,
    prev: State,
    action: Action,
    outcome: TransitionOutcome,
) -> float:
    """
    Step reward of a transition.

    R1 returns the inter-completion time (to be minimized). R2 returns the
    powered population after the completion times the inter-completion time;
    the division by the total recovery time is left to reporting because it
    is a positive constant per episode.
    """
    del prev, action  # the reward depends on the outcome only

    if spec.objective is Objective.R1:
        raw = outcome.r
    else:
        raw = powered_population(network, outcome.next.damaged_mask) * outcome.r

    return bounded(spec, raw)


def horizon_error_bound(gamma: float, h: int, r_max: float) -> float:
    """
    Worst-case error of truncating a discounted return after h epochs.

    Raises:
        ValueError: If gamma is not in (0, 1) or h, r_max are negative

    Example:
        >>> horizon_error_bound(0.5, 1, 1.0)
        1.0
    """
    if not 0 < gamma < 1:
        msg = f"gamma must be in (0, 1) for a finite bound, got {gamma}"
        raise ValueError(msg)

    if h < 0 or r_max < 0:
        msg = f"h and r_max must be nonnegative, got h={h}, r_max={r_max}"
        raise ValueError(msg)

    return gamma**h * r_max / (1 - gamma)


@dataclass(frozen=True)
class RewardNormalizer:
    """Min-max map of returns into [0, 1], larger meaning better

    Values outside the fitted range are clamped. `flip` turns a quantity to
    be minimized into one to be maximized. A degenerate range maps every
    value to 0.5.
    """

    low: float
    high: float
    flip: bool = False

    @classmethod
    def from_samples(cls, values: Iterable[float], *, flip: bool) -> Self:
        samples = np.fromiter(values, dtype=np.float64)
        if samples.size == 0:
            msg = "Cannot fit a normalizer on no samples"
            raise ValueError(msg)
        return cls(float(samples.min()), float(samples.max()), flip)

    def __call__(self, value: float) -> float:
        return float(self.normalize(np.array([value]))[0])

    def normalize(self, values: npt.ArrayLike) -> npt.NDArray[np.float64]:
        array = np.asarray(values, dtype=np.float64)
        span = self.high - self.low
        if span <= 0:
            return np.full(array.shape, 0.5)

        scaled = np.clip((array - self.low) / span, 0.0, 1.0)
        return 1.0 - scaled if self.flip else scaled
