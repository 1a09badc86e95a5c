from gridrecovery.domain import Action, DamageScenario, Network, State
from gridrecovery.validation.rules import (
    validate_action_size,
    validate_action_targets,
    validate_cells,
    validate_scenario_durations,
    validate_scenario_shape,
    validate_single_root,
    validate_state_consistency,
    validate_tree,
)


class ValidationError(Exception):
    """Raised when network, scenario or action validation fails"""


class ContractViolation(ValidationError):
    """Raised when a caller breaks an operation's contract"""


def _raise_if_errors(subject: str, errors: list[str]) -> None:
    if errors:
        error_message = f"{subject} validation failed:\n" + "\n".join(
            f"  - {e}" for e in errors
        )
        raise ValidationError(error_message)


def validate_network(network: Network) -> None:
    """
    Validate the dependency tree and the cells it serves.

    Args:
        network: Network to validate

    Raises:
        ValidationError: If any structural rule fails
    """
    errors = []

    errors.extend(validate_single_root(network))
    errors.extend(validate_tree(network))
    if not errors:
        errors.extend(validate_cells(network))

    _raise_if_errors("Network", errors)


def validate_scenario(network: Network, scenario: DamageScenario) -> None:
    """
    Validate a damage scenario against a network.

    Raises:
        ValidationError: If sizes differ or durations break the invariants
    """
    errors = validate_scenario_shape(network, scenario)
    if not errors:
        errors.extend(validate_scenario_durations(scenario))

    _raise_if_errors(f"Scenario {scenario.seed}", errors)


def validate_state(state: State) -> None:
    """Raises ValidationError if rho and damage disagree"""
    _raise_if_errors("State", validate_state_consistency(state))


def validate_action(state: State, action: Action, n_units: int) -> None:
    """
    Validate an action produced by a selector.

    Args:
        state: State the action is applied to
        action: Proposed assignment
        n_units: Number of repair units available

    Raises:
        ContractViolation: If the action targets undamaged components or
            uses the wrong number of units
    """
    errors = []

    errors.extend(validate_action_targets(state, action))
    errors.extend(validate_action_size(state, action, n_units))

    if errors:
        error_message = "Action validation failed:\n" + "\n".join(
            f"  - {e}" for e in errors
        )
        raise ContractViolation(error_message)
