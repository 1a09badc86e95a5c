import itertools
import math

import numpy as np
import pytest

from gridrecovery.domain import Action
from gridrecovery.solver.belief import (
    RuMapping,
    build_design_matrix,
    design_rows,
    fit_belief_model,
    min_norm_least_squares,
    numerical_rank,
    pinv_least_squares,
    sequential_assignment,
)
from gridrecovery.solver.candidates import CandidateSet


def _all_pairs(m):
    """Every 2-subset of locations 0..m-1 as candidates"""
    locations = tuple(range(m))
    actions = tuple(Action(p) for p in itertools.combinations(locations, 2))
    return CandidateSet(actions, locations)


class TestDesignMatrix:
    def test_singletons_give_identity(self):
        candidates = CandidateSet(
            (Action((10,)), Action((11,)), Action((12,))), (10, 11, 12)
        )

        assert np.array_equal(build_design_matrix(candidates, 1), np.eye(3))

    def test_unit_order_follows_locations(self):
        """{0, 1} with two units sets (m=0, n=0) and (m=1, n=1)"""
        candidates = CandidateSet((Action((0, 1)),), (0, 1))

        h = build_design_matrix(candidates, 2)

        assert h.tolist() == [[1.0, 0.0, 0.0, 1.0]]

    def test_all_orders_adds_a_row_per_ordering(self):
        candidates = CandidateSet((Action((0, 1)),), (0, 1))

        h, owners = design_rows(candidates, 2, RuMapping.ALL_ORDERS)

        assert h.tolist() == [[1.0, 0.0, 0.0, 1.0], [0.0, 1.0, 1.0, 0.0]]
        assert owners.tolist() == [0, 0]

    def test_rows_have_one_entry_per_unit(self):
        h = build_design_matrix(_all_pairs(5), 2, RuMapping.ALL_ORDERS)

        assert np.all(h.sum(axis=1) == 2)
        assert set(np.unique(h)) == {0.0, 1.0}

    @pytest.mark.parametrize(("m", "expected"), [(3, 5), (4, 7), (6, 11)])
    def test_rank_with_every_ordering(self, m, expected):
        """Rank M*N - (N - 1) once all orderings are present"""
        h = build_design_matrix(_all_pairs(m), 2, RuMapping.ALL_ORDERS)

        assert numerical_rank(h) == expected == m * 2 - 1

    def test_ascending_rank(self):
        """One row per candidate: three independent rows for M=3, N=2"""
        h = build_design_matrix(_all_pairs(3), 2)

        assert h.shape == (3, 6)
        assert numerical_rank(h) == 3

    def test_no_units(self):
        with pytest.raises(ValueError, match="n_units"):
            build_design_matrix(_all_pairs(3), 0)


class TestLeastSquares:
    def test_identity_returns_response(self):
        y = np.array([0.3, -1.2, 7.0])
        assert np.allclose(min_norm_least_squares(np.eye(3), y), y)

    def test_symmetric_minimum_norm(self):
        """[1 1] theta = 2 has minimum-norm solution [1, 1]"""
        assert np.allclose(min_norm_least_squares([[1.0, 1.0]], [2.0]), [1.0, 1.0])

    def test_all_zero_design(self):
        with pytest.raises(ValueError, match="all zeros"):
            min_norm_least_squares(np.zeros((2, 2)), [1.0, 2.0])

    def test_response_length(self):
        with pytest.raises(ValueError, match="Response has shape"):
            min_norm_least_squares(np.eye(2), [1.0])

    def test_empty_design(self):
        with pytest.raises(ValueError, match="nonempty"):
            min_norm_least_squares(np.zeros((0, 2)), [])

    def test_agrees_with_pseudo_inverse(self):
        """Rank-deficient design: SVD route and scipy pinv agree"""
        h = build_design_matrix(_all_pairs(5), 2, RuMapping.ALL_ORDERS)
        y = np.random.default_rng(0).normal(size=h.shape[0])

        theta = min_norm_least_squares(h, y)

        assert np.allclose(theta, pinv_least_squares(h, y))
        assert np.allclose(h @ theta, h @ np.linalg.lstsq(h, y, rcond=None)[0])

    def test_solution_lies_in_row_space(self):
        """Minimum norm: no component along the null space"""
        h = build_design_matrix(_all_pairs(4), 2, RuMapping.ALL_ORDERS)
        y = np.random.default_rng(1).normal(size=h.shape[0])
        null_vector = np.tile([1.0, -1.0], 4)

        theta = min_norm_least_squares(h, y)

        assert np.allclose(h @ null_vector, 0.0)
        assert theta @ null_vector == pytest.approx(0.0, abs=1e-9)


class TestBeliefModel:
    def test_exact_fit_on_identity(self):
        candidates = CandidateSet((Action((5,)), Action((6,)), Action((7,))), (5, 6, 7))

        model = fit_belief_model(candidates, [1.0, 2.0, 4.0], 1)

        assert np.allclose(model.theta_hat, [1.0, 2.0, 4.0])
        assert model.residual_norm == pytest.approx(0.0, abs=1e-12)
        assert model.rank == 3
        assert model.r_squared == pytest.approx(1.0)
        assert math.isnan(model.rse)
        assert model.observed.all()

    def test_recovers_linear_truth(self):
        """Additive responses are fitted without residual"""
        candidates = _all_pairs(5)
        theta_true = np.arange(10, dtype=float)
        h = build_design_matrix(candidates, 2, RuMapping.ALL_ORDERS)
        y = h[::2] @ theta_true

        model = fit_belief_model(candidates, y, 2)

        assert np.allclose(model.y_hat, y)
        assert model.residual_norm == pytest.approx(0.0, abs=1e-9)

    def test_observed_columns(self):
        """Ascending: the first unit never sees the last location"""
        model = fit_belief_model(_all_pairs(3), [1.0, 2.0, 3.0], 2)

        assert model.observed.tolist() == [True, False, True, True, False, True]

    def test_diagnostics_with_spare_rows(self):
        candidates = _all_pairs(5)
        y = np.random.default_rng(2).normal(size=candidates.alpha_tilde)

        model = fit_belief_model(candidates, y, 2)

        assert model.rank == 7
        assert model.rse > 0
        assert 0.0 <= model.r_squared <= 1.0

    def test_response_count(self):
        with pytest.raises(ValueError, match="Expected 3 responses"):
            fit_belief_model(_all_pairs(3), [1.0, 2.0], 2)


class TestSequentialAssignment:
    def test_single_unit_takes_the_maximum(self):
        theta = [0.1, 0.2, 0.3, 0.9, 0.5]

        action = sequential_assignment(theta, (10, 11, 12, 13, 14), 1, minimize=False)

        assert action == Action((13,))

    def test_single_unit_takes_the_minimum(self):
        theta = [0.1, 0.2, 0.3, 0.9, 0.5]

        action = sequential_assignment(theta, (10, 11, 12, 13, 14), 1, minimize=True)

        assert action == Action((10,))

    def test_location_row_is_blanked(self):
        """Location 0 holds both top entries but is taken only once"""
        theta = [9.0, 8.0, 1.0, 2.0, 3.0, 0.0]

        action = sequential_assignment(theta, (20, 21, 22), 2, minimize=False)

        assert action == Action((20, 22))

    def test_shift_invariance(self):
        theta = np.random.default_rng(4).normal(size=12)
        locations = (3, 5, 8, 13)

        base = sequential_assignment(theta, locations, 3, minimize=True)
        shifted = sequential_assignment(theta + 7.5, locations, 3, minimize=True)

        assert base == shifted
        assert len(base) == 3

    def test_ties_go_to_smallest_location(self):
        action = sequential_assignment([1.0, 1.0, 1.0], (7, 8, 9), 1, minimize=False)

        assert action == Action((7,))

    def test_unobserved_columns_are_skipped(self):
        theta = [0.0, 5.0, 1.0]
        observed = [True, False, True]

        action = sequential_assignment(
            theta, (0, 1, 2), 1, minimize=False, observed=observed
        )

        assert action == Action((2,))

    def test_fallback_to_lowest_unassigned(self):
        """Only blanked entries left: the lowest free location is used"""
        theta = [4.0, 0.0, 9.0, 9.0, 9.0, 9.0]
        observed = [True, False, False, False, False, False]

        action = sequential_assignment(
            theta, (0, 1, 2), 2, minimize=False, observed=observed
        )

        assert action == Action((0, 1))

    def test_more_units_than_locations(self):
        action = sequential_assignment([1.0] * 8, (4, 6), 4, minimize=False)

        assert action == Action((4, 6))

    def test_wrong_length(self):
        with pytest.raises(ValueError, match="theta_hat has shape"):
            sequential_assignment([1.0, 2.0], (0, 1, 2), 1, minimize=False)
