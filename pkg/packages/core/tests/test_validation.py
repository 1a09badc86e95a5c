import math

import numpy as np
import pytest

from gridrecovery.domain import Action, DamageScenario, DamageState, State
from gridrecovery.validation.rules import (
    validate_action_size,
    validate_action_targets,
    validate_scenario_durations,
    validate_scenario_shape,
    validate_state_consistency,
)
from gridrecovery.validation.validator import (
    ContractViolation,
    ValidationError,
    validate_action,
    validate_scenario,
    validate_state,
)


UNDAMAGED = DamageState.UNDAMAGED
MINOR = DamageState.MINOR


class TestScenarioRules:
    def test_valid_scenario(self, star):
        net = star([5, 5])
        scenario = DamageScenario(
            1, (UNDAMAGED, UNDAMAGED, MINOR, UNDAMAGED), (0.0, 0.0, 1.0, 0.0)
        )

        validate_scenario(net, scenario)

    def test_size_mismatch(self, star):
        scenario = DamageScenario(7, (UNDAMAGED, MINOR), (0.0, 1.0))

        errors = validate_scenario_shape(star([5, 5]), scenario)

        assert errors == ["Scenario 7 has 2 states for 4 components"]

    def test_duration_count_mismatch(self, star):
        scenario = DamageScenario(7, (UNDAMAGED,) * 4, (0.0,) * 3)

        with pytest.raises(ValidationError, match="3 durations for 4 states"):
            validate_scenario(star([5, 5]), scenario)

    @pytest.mark.parametrize(
        ("state", "duration", "message"),
        [
            (MINOR, 0.0, "MINOR with duration 0.0"),
            (UNDAMAGED, 2.0, "UNDAMAGED with duration 2.0"),
            (MINOR, -1.0, "invalid duration -1.0"),
            (MINOR, math.inf, "invalid duration inf"),
            (MINOR, math.nan, "invalid duration nan"),
        ],
    )
    def test_durations(self, state, duration, message):
        scenario = DamageScenario(0, (UNDAMAGED, state), (0.0, duration))

        (error,) = validate_scenario_durations(scenario)

        assert error.startswith("Component 1 ")
        assert message in error

    def test_every_problem_is_reported(self, star):
        scenario = DamageScenario(
            3, (UNDAMAGED, UNDAMAGED, MINOR, UNDAMAGED), (0.0, 1.0, 0.0, 0.0)
        )

        with pytest.raises(ValidationError) as excinfo:
            validate_scenario(star([5, 5]), scenario)

        message = str(excinfo.value)
        assert message.startswith("Scenario 3 validation failed:")
        assert "Component 1 is UNDAMAGED" in message
        assert "Component 2 is MINOR" in message


class TestStateRules:
    def test_consistent_state(self, star, make_state):
        validate_state(make_state(star([1, 1]), {2: 1.5}))

    def test_damaged_without_remaining_time(self):
        state = State([0, 2], [0.0, 0.0], [0.0, 0.0])

        assert validate_state_consistency(state) == [
            "Component 1 has damage 2 and rho 0.0"
        ]

    def test_undamaged_with_remaining_time(self):
        state = State([0, 0], [0.0, 1.0], [0.0, 0.0])

        with pytest.raises(ValidationError, match="Component 1"):
            validate_state(state)


class TestActionRules:
    @pytest.fixture
    def state(self, star, make_state):
        return make_state(star([1, 1, 1]), {2: 1.0, 3: 2.0, 4: 3.0})

    def test_valid_action(self, state):
        validate_action(state, Action((2, 4)), 2)

    def test_undamaged_target(self, state):
        assert validate_action_targets(state, Action((0,))) == [
            "Action assigns undamaged component 0"
        ]

    def test_unknown_target(self, state):
        assert validate_action_targets(state, Action((9,))) == [
            "Action assigns unknown component 9"
        ]

    def test_too_few_units(self, state):
        assert validate_action_size(state, Action((2,)), 2) == [
            "Action assigns 1 units (expected 2)"
        ]

    def test_units_capped_by_damage(self, state):
        """Five units, three damaged: every damaged component is assigned"""
        assert validate_action_size(state, Action((2, 3, 4)), 5) == []
        assert validate_action_size(state, Action((2, 3)), 5) == [
            "Action assigns 2 units (expected 3)"
        ]

    def test_violation_type(self, state):
        with pytest.raises(ContractViolation, match="undamaged component 1"):
            validate_action(state, Action((1, 2)), 2)

    def test_violation_is_a_validation_error(self):
        assert issubclass(ContractViolation, ValidationError)

    def test_duplicate_assignment(self):
        with pytest.raises(ValueError, match="twice"):
            Action((3, 3))

    def test_fully_repaired_state_takes_empty_action(self):
        state = State(np.zeros(3), np.zeros(3), np.zeros(3))

        validate_action(state, Action(()), 2)
