import math

import numpy as np
import pytest

from gridrecovery.solver.bandit import ucb1_index, ucb1_select, update_mean
from gridrecovery.validation.validator import ContractViolation


def test_equal_counts_pick_the_best_mean():
    """Exploration bonus is the same for every arm"""
    assert ucb1_select([0.2, 0.7, 0.5], [3, 3, 3], 9) == 1


def test_two_arms_one_pull_each():
    assert ucb1_select([0.9, 0.1], [1, 1], 2) == 0


def test_rarely_pulled_arm_is_explored():
    assert ucb1_select([0.5, 0.4], [100, 1], 101) == 1


def test_index_values():
    index = ucb1_index([0.5], [4], 16)

    assert index[0] == pytest.approx(0.5 + math.sqrt(2 * math.log(16) / 4))


def test_ties_go_to_lowest_arm():
    assert ucb1_select([0.3, 0.3], [2, 2], 4) == 0


@pytest.mark.parametrize("means", [[1.2, 0.5], [-0.1, 0.5]])
def test_means_outside_unit_interval(means):
    with pytest.raises(ContractViolation, match=r"\[0, 1\]"):
        ucb1_select(means, [1, 1], 2)


def test_unpulled_arm():
    with pytest.raises(ValueError, match="at least one pull"):
        ucb1_select([0.5, 0.5], [1, 0], 1)


def test_shape_mismatch():
    with pytest.raises(ValueError, match="must match"):
        ucb1_select([0.5, 0.5], [1], 2)


def test_running_mean():
    mean = 0.0
    values = [0.2, 0.6, 0.1, 0.9]
    for count, value in enumerate(values, start=1):
        mean = update_mean(mean, count, value)

    assert mean == pytest.approx(sum(values) / len(values))


def test_running_mean_matches_batch_mean():
    """Ten thousand normalized returns, no drift beyond 1e-12"""
    values = np.random.default_rng(8).random(10_000)

    mean = 0.0
    for count, value in enumerate(values, start=1):
        mean = update_mean(mean, count, float(value))

    assert abs(mean - np.mean(values)) <= 1e-12
