import logging
import sys

from dataclasses import dataclass

if sys.version_info >= (3, 11):
    from typing import Self
else:
    from typing_extensions import Self

import numpy as np
import numpy.typing as npt
from joblib import Parallel, delayed

from gridrecovery.config.presets import DEFAULT_HORIZON
from gridrecovery.domain import Action, Network, RewardSpec, State
from gridrecovery.mdp.rewards import RewardNormalizer
from gridrecovery.mdp.simq import BasePolicy, sim_q
from gridrecovery.mdp.simulator import Dynamics
from gridrecovery.solver.bandit import ucb1_select, update_mean
from gridrecovery.solver.belief import (
    RuMapping,
    fit_belief_model,
    sequential_assignment,
)
from gridrecovery.solver.candidates import CandidateSet, sample_candidates


logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RolloutContext:
    """Everything a rollout needs besides the state and the random stream"""

    network: Network
    spec: RewardSpec
    n_units: int
    base_policy: BasePolicy
    horizon: int = DEFAULT_HORIZON
    dynamics: Dynamics = Dynamics.STOCHASTIC_PLANNER
    n_jobs: int = 1

    def __post_init__(self) -> None:
        if self.n_units < 1:
            msg = f"n_units must be at least 1, got {self.n_units}"
            raise ValueError(msg)

        if self.horizon < 1:
            msg = f"horizon must be at least 1, got {self.horizon}"
            raise ValueError(msg)

        if self.dynamics is Dynamics.STOCHASTIC_ENV:
            msg = "Planning cannot use the environment's realized durations"
            raise ValueError(msg)


@dataclass(frozen=True)
class Budget:
    """Simulator calls per epoch

    Uniform variants spend alpha_tilde * beta calls, the adaptive variant
    alpha_tilde rough estimates plus b_star UCB1-allocated calls.
    """

    alpha_tilde: int
    beta: int = 1
    b_star: int = 0

    def __post_init__(self) -> None:
        if self.alpha_tilde < 1:
            msg = f"alpha_tilde must be at least 1, got {self.alpha_tilde}"
            raise ValueError(msg)

        if self.beta < 1:
            msg = f"beta must be at least 1, got {self.beta}"
            raise ValueError(msg)

        if self.b_star < 0:
            msg = f"b_star must be nonnegative, got {self.b_star}"
            raise ValueError(msg)

    @property
    def uniform_total(self) -> int:
        return self.alpha_tilde * self.beta

    @property
    def adaptive_total(self) -> int:
        return self.alpha_tilde + self.b_star

    @classmethod
    def adaptive_from_total(cls, alpha_tilde: int, total: int) -> Self:
        """Adaptive budget whose rough estimates and UCB1 calls sum to total"""
        if total < alpha_tilde:
            msg = f"Total budget {total} is smaller than alpha_tilde {alpha_tilde}"
            raise ValueError(msg)
        return cls(alpha_tilde, b_star=total - alpha_tilde)


def trivial_action(state: State, n_units: int) -> Action | None:
    """All damaged components when there are no more of them than units"""
    if state.damaged_count <= n_units:
        return Action(state.damaged_components)
    return None


def _spawn_streams(
    rng: np.random.Generator, count: int
) -> list[np.random.SeedSequence]:
    root = np.random.SeedSequence(int(rng.integers(2**63)))
    return root.spawn(count)


def _mean_q(
    context: RolloutContext,
    state: State,
    action: Action,
    beta: int,
    stream: np.random.SeedSequence,
) -> float:
    rng = np.random.default_rng(stream)
    draws = [
        sim_q(
            context.network,
            state,
            action,
            context.base_policy,
            context.horizon,
            context.spec,
            context.dynamics,
            rng,
            n_units=context.n_units,
        )
        for _ in range(beta)
    ]
    return float(np.mean(draws))


def estimate_uniform(
    context: RolloutContext,
    state: State,
    candidates: CandidateSet,
    beta: int,
    streams: list[np.random.SeedSequence],
) -> npt.NDArray[np.float64]:
    """
    Mean of beta SimQ draws per candidate.

    Candidate i draws from its own stream, so the result does not depend on
    how many workers evaluate the candidates.
    """
    if beta < 1:
        msg = f"beta must be at least 1, got {beta}"
        raise ValueError(msg)

    means = Parallel(n_jobs=context.n_jobs)(
        delayed(_mean_q)(context, state, action, beta, stream)
        for action, stream in zip(candidates.actions, streams, strict=False)
    )
    return np.asarray(means, dtype=np.float64)


def _best_index(values: npt.NDArray[np.float64], *, minimize: bool) -> int:
    return int(np.argmin(values) if minimize else np.argmax(values))


def uniform_rollout(
    context: RolloutContext,
    state: State,
    candidates: CandidateSet,
    beta: int,
    rng: np.random.Generator,
) -> Action:
    """
    Rollout with beta samples for every candidate.

    Returns the candidate with the best mean return (smallest for R1),
    lowest index on ties.
    """
    trivial = trivial_action(state, context.n_units)
    if trivial is not None:
        return trivial

    streams = _spawn_streams(rng, candidates.alpha_tilde + 1)
    means = estimate_uniform(context, state, candidates, beta, streams)
    best = _best_index(means, minimize=context.spec.objective.minimize)

    logger.debug(
        "Uniform rollout picked candidate %d of %d (mean %.4g)",
        best,
        candidates.alpha_tilde,
        means[best],
    )
    return candidates.actions[best]


def rollout_linear_belief(
    context: RolloutContext,
    state: State,
    budget: Budget,
    rng: np.random.Generator,
    mapping: RuMapping = RuMapping.ASCENDING,
) -> Action:
    """
    Uniform rollout over sampled candidates, generalized by a linear belief.

    Args:
        context: Rollout settings
        state: State to act in
        budget: alpha_tilde candidates with beta samples each
        rng: Random stream
        mapping: Unit-to-column mapping of the design matrix

    Returns:
        Assignment built from the fitted estimates
    """
    trivial = trivial_action(state, context.n_units)
    if trivial is not None:
        return trivial

    candidates = sample_candidates(state, context.n_units, budget.alpha_tilde, rng)
    streams = _spawn_streams(rng, candidates.alpha_tilde + 1)
    means = estimate_uniform(context, state, candidates, budget.beta, streams)

    model = fit_belief_model(candidates, means, context.n_units, mapping)
    return sequential_assignment(
        model.theta_hat,
        candidates.locations,
        context.n_units,
        minimize=context.spec.objective.minimize,
        observed=model.observed,
    )


@dataclass(frozen=True, eq=False)
class AdaptiveEstimate:
    """Sample means and pull counts after UCB1 allocation

    `y` holds the running means on the return scale, `y_tilde` the same means
    of normalized returns that drive the UCB1 index.
    """

    y: npt.NDArray[np.float64]
    y_tilde: npt.NDArray[np.float64]
    counts: npt.NDArray[np.int64]
    normalizer: RewardNormalizer


def estimate_adaptive(
    context: RolloutContext,
    state: State,
    candidates: CandidateSet,
    b_star: int,
    streams: list[np.random.SeedSequence],
) -> AdaptiveEstimate:
    """
    One rough SimQ draw per candidate, then b_star draws allocated by UCB1.

    For the UCB1 index, returns are normalized into [0, 1] with the rough
    estimates' range, flipped for R1 so larger is always better. Raw means
    are kept alongside for the belief model. The UCB1 loop is sequential and
    draws from the stream after the per-candidate ones.
    """
    if b_star < 0:
        msg = f"b_star must be nonnegative, got {b_star}"
        raise ValueError(msg)

    rough = estimate_uniform(context, state, candidates, 1, streams)
    normalizer = RewardNormalizer.from_samples(
        rough, flip=context.spec.objective.minimize
    )
    y = rough.copy()
    y_tilde = normalizer.normalize(rough)
    counts = np.ones(candidates.alpha_tilde, dtype=np.int64)

    rng = np.random.default_rng(streams[candidates.alpha_tilde])
    for _ in range(b_star):
        i = ucb1_select(y_tilde, counts, int(counts.sum()))
        q = sim_q(
            context.network,
            state,
            candidates.actions[i],
            context.base_policy,
            context.horizon,
            context.spec,
            context.dynamics,
            rng,
            n_units=context.n_units,
        )
        counts[i] += 1
        y[i] = update_mean(float(y[i]), int(counts[i]), q)
        y_tilde[i] = update_mean(float(y_tilde[i]), int(counts[i]), normalizer(q))

    logger.debug(
        "UCB1 allocation: max count %d, min count %d over %d candidates",
        counts.max(),
        counts.min(),
        candidates.alpha_tilde,
    )
    return AdaptiveEstimate(y, y_tilde, counts, normalizer)


def adaptive_rollout_linear_belief(
    context: RolloutContext,
    state: State,
    budget: Budget,
    rng: np.random.Generator,
    mapping: RuMapping = RuMapping.ASCENDING,
) -> Action:
    """
    Rollout with UCB1-allocated samples, generalized by a linear belief.

    Args:
        context: Rollout settings
        state: State to act in
        budget: alpha_tilde candidates plus b_star adaptive calls
        rng: Random stream
        mapping: Unit-to-column mapping of the design matrix

    Returns:
        Assignment built from the fitted estimates
    """
    trivial = trivial_action(state, context.n_units)
    if trivial is not None:
        return trivial

    candidates = sample_candidates(state, context.n_units, budget.alpha_tilde, rng)
    streams = _spawn_streams(rng, candidates.alpha_tilde + 1)
    estimate = estimate_adaptive(context, state, candidates, budget.b_star, streams)

    model = fit_belief_model(candidates, estimate.y, context.n_units, mapping)
    return sequential_assignment(
        model.theta_hat,
        candidates.locations,
        context.n_units,
        minimize=context.spec.objective.minimize,
        observed=model.observed,
    )
