import numpy as np
import pytest

from gridrecovery.domain import Action, Objective, RewardSpec, TransitionOutcome
from gridrecovery.mdp.rewards import (
    RewardNormalizer,
    bounded,
    goal_population,
    horizon_error_bound,
    is_goal,
    reward,
)


def _outcome(next_state, r):
    return TransitionOutcome(next_state, r, ())


class TestReward:
    def test_r1_is_the_inter_completion_time(self, star, make_state):
        net = star([100, 200])
        state = make_state(net, {2: 3.0})
        spec = RewardSpec(Objective.R1)

        assert reward(spec, net, state, Action((2,)), _outcome(state, 1.5)) == 1.5

    def test_r2_weights_time_by_powered_population(self, star, make_state):
        """n = 100 powered after the completion, r = 2"""
        net = star([100, 200])
        after = make_state(net, {3: 1.0})
        spec = RewardSpec(Objective.R2)

        assert reward(spec, net, after, Action((2,)), _outcome(after, 2.0)) == 200

    def test_cap_bounds_the_reward(self, star, make_state):
        net = star([100])
        state = make_state(net, {2: 1.0})
        spec = RewardSpec(Objective.R1, reward_cap=10.0)

        assert reward(spec, net, state, Action((2,)), _outcome(state, 5.0)) == 0.5
        assert reward(spec, net, state, Action((2,)), _outcome(state, 20.0)) == 1.0

    def test_bounded_without_cap(self):
        assert bounded(RewardSpec(), 123.0) == 123.0


class TestGoal:
    def test_all_repaired_is_goal(self, star, make_state):
        net = star([79, 21])
        repaired = make_state(net, {})

        assert is_goal(RewardSpec(Objective.R1), net, repaired)
        assert is_goal(RewardSpec(Objective.R2), net, repaired)

    def test_below_fraction(self, star, make_state):
        """79 of 100 powered with zeta 0.8"""
        net = star([79, 21])
        state = make_state(net, {3: 1.0})

        assert not is_goal(RewardSpec(Objective.R1, zeta=0.8), net, state)

    def test_exactly_at_ceiling(self, star, make_state):
        net = star([80, 20])
        state = make_state(net, {3: 1.0})

        assert is_goal(RewardSpec(Objective.R1, zeta=0.8), net, state)
        assert not is_goal(RewardSpec(Objective.R2), net, state)

    @pytest.mark.parametrize(
        ("total", "zeta", "expected"),
        [(100, 0.8, 80), (47905, 0.8, 38324), (12001, 0.8, 9601), (7, 1.0, 7)],
    )
    def test_goal_population_ceiling(self, star, total, zeta, expected):
        net = star([total])
        assert goal_population(RewardSpec(Objective.R1, zeta=zeta), net) == expected

    def test_r2_needs_everyone(self, star):
        net = star([10, 20])
        assert goal_population(RewardSpec(Objective.R2, zeta=0.5), net) == 30


class TestRewardSpec:
    @pytest.mark.parametrize(
        ("kwargs", "message"),
        [
            ({"zeta": 0.0}, "zeta"),
            ({"zeta": 1.2}, "zeta"),
            ({"gamma": 0.0}, "gamma"),
            ({"reward_cap": -1.0}, "reward_cap"),
        ],
    )
    def test_invalid(self, kwargs, message):
        with pytest.raises(ValueError, match=message):
            RewardSpec(**kwargs)

    def test_defaults(self):
        spec = RewardSpec()

        assert spec.objective is Objective.R1
        assert spec.gamma == 0.99
        assert spec.zeta == 0.8


class TestHorizonBound:
    @pytest.mark.parametrize(
        ("gamma", "h", "r_max", "expected"),
        [(0.99, 0, 1.0, 100.0), (0.5, 1, 1.0, 1.0), (0.99, 300, 1.0, 4.90)],
    )
    def test_values(self, gamma, h, r_max, expected):
        assert horizon_error_bound(gamma, h, r_max) == pytest.approx(
            expected, abs=0.01
        )

    def test_undiscounted_is_unbounded(self):
        with pytest.raises(ValueError, match="gamma"):
            horizon_error_bound(1.0, 10, 1.0)

    def test_negative_horizon(self):
        with pytest.raises(ValueError, match="nonnegative"):
            horizon_error_bound(0.9, -1, 1.0)


class TestRewardNormalizer:
    def test_min_max(self):
        normalizer = RewardNormalizer.from_samples([0.0, 4.0], flip=False)

        assert normalizer(1.0) == 0.25
        assert list(normalizer.normalize([0.0, 4.0])) == [0.0, 1.0]

    def test_flip_for_minimized_returns(self):
        normalizer = RewardNormalizer.from_samples([0.0, 4.0], flip=True)

        assert normalizer(1.0) == 0.75

    def test_out_of_range_is_clamped(self):
        normalizer = RewardNormalizer.from_samples([0.0, 4.0], flip=False)

        assert normalizer(10.0) == 1.0
        assert normalizer(-3.0) == 0.0

    def test_degenerate_range(self):
        normalizer = RewardNormalizer.from_samples([2.0, 2.0], flip=True)

        assert np.all(normalizer.normalize([1.0, 2.0, 3.0]) == 0.5)

    def test_no_samples(self):
        with pytest.raises(ValueError, match="no samples"):
            RewardNormalizer.from_samples([], flip=False)
