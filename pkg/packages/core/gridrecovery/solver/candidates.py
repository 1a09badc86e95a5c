import itertools
import logging
import math

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from gridrecovery.domain import Action, State


logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CandidateSet:
    """Sampled subset of the assignments available at one state

    `locations` lists the damaged component ids; location index m in the
    design matrix refers to `locations[m]`.
    """

    actions: tuple[Action, ...]
    locations: tuple[int, ...]

    def __post_init__(self) -> None:
        if not self.actions:
            msg = "Candidate set must hold at least one action"
            raise ValueError(msg)

        if len(set(self.actions)) != len(self.actions):
            msg = "Candidate set contains duplicate actions"
            raise ValueError(msg)

        known = set(self.locations)
        for action in self.actions:
            if not known.issuperset(action.components):
                msg = f"Candidate {action.components} targets unknown locations"
                raise ValueError(msg)

    @property
    def alpha_tilde(self) -> int:
        return len(self.actions)

    @cached_property
    def index_map(self) -> dict[int, int]:
        """Component id -> location index"""
        return {component: m for m, component in enumerate(self.locations)}


def sample_candidates(
    state: State,
    n_units: int,
    alpha_tilde: int,
    rng: np.random.Generator,
) -> CandidateSet:
    """
    Draw alpha_tilde distinct random assignments for the state.

    If the space of min(N, M)-subsets of damaged components is no larger
    than alpha_tilde, all of it is returned in lexicographic order.
    Otherwise subsets are drawn uniformly and duplicates rejected.

    Args:
        state: Non-terminal state
        n_units: Repair units available
        alpha_tilde: Number of candidates wanted
        rng: Random stream

    Returns:
        CandidateSet over the state's damaged components

    Raises:
        ValueError: If alpha_tilde < 1, n_units < 1 or nothing is damaged
    """
    if alpha_tilde < 1:
        msg = f"alpha_tilde must be at least 1, got {alpha_tilde}"
        raise ValueError(msg)

    if n_units < 1:
        msg = f"n_units must be at least 1, got {n_units}"
        raise ValueError(msg)

    locations = state.damaged_components
    if not locations:
        msg = "Cannot sample candidates for a fully repaired state"
        raise ValueError(msg)

    k = min(n_units, len(locations))
    space = math.comb(len(locations), k)

    if space <= alpha_tilde:
        subsets = list(itertools.combinations(range(len(locations)), k))
    elif space <= 2 * alpha_tilde:
        # dense regime: pick from the enumerated space instead of rejecting
        every = list(itertools.combinations(range(len(locations)), k))
        chosen = rng.choice(space, size=alpha_tilde, replace=False)
        subsets = [every[i] for i in chosen]
    else:
        seen: set[tuple[int, ...]] = set()
        subsets = []
        while len(subsets) < alpha_tilde:
            draw = rng.choice(len(locations), size=k, replace=False)
            picked = tuple(sorted(int(i) for i in draw))
            if picked in seen:
                continue
            seen.add(picked)
            subsets.append(picked)

    logger.debug(
        "Sampled %d of %d candidate assignments (M=%d, N=%d)",
        len(subsets),
        space,
        len(locations),
        n_units,
    )
    return CandidateSet(
        tuple(Action(tuple(locations[m] for m in subset)) for subset in subsets),
        locations,
    )
