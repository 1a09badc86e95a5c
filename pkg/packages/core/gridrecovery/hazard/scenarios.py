import json
import logging

from collections.abc import Iterable
from pathlib import Path
from typing import Any

from gridrecovery.domain import DamageScenario, DamageState, Network
from gridrecovery.validation.validator import validate_scenario


logger = logging.getLogger(__name__)


class ScenarioFileError(ValueError):
    """Raised when a scenario file cannot be parsed"""


def scenario_to_json(scenario: DamageScenario) -> dict[str, Any]:
    return {
        "seed": scenario.seed,
        "states": [int(s) for s in scenario.initial_state],
        "durations": list(scenario.realized_duration),
    }


def scenario_from_json(document: dict[str, Any]) -> DamageScenario:
    """
    Build a scenario from one decoded JSON line.

    Raises:
        ScenarioFileError: If a field is missing or a state code is unknown
    """
    try:
        return DamageScenario(
            seed=int(document["seed"]),
            initial_state=tuple(DamageState(int(s)) for s in document["states"]),
            realized_duration=tuple(float(d) for d in document["durations"]),
        )
    except (KeyError, TypeError, ValueError) as e:
        msg = f"Malformed scenario: {e}"
        raise ScenarioFileError(msg) from e


def save_scenarios(path: Path, scenarios: Iterable[DamageScenario]) -> None:
    """Write scenarios as JSON lines, one per line"""
    lines = [json.dumps(scenario_to_json(s)) for s in scenarios]
    path.write_text("".join(f"{line}\n" for line in lines), encoding="utf-8")


def load_scenarios(path: Path, network: Network) -> list[DamageScenario]:
    """
    Load and validate scenarios from a JSON lines file.

    Args:
        path: Scenario file
        network: Network the scenarios must match

    Returns:
        Scenarios in file order (empty for an empty file)

    Raises:
        ScenarioFileError: If a line is not valid JSON or lacks fields
        ValidationError: If a scenario does not fit the network
    """
    scenarios = []

    with path.open(encoding="utf-8") as handle:
        for line_number, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            try:
                document = json.loads(line)
            except json.JSONDecodeError as e:
                msg = f"{path}:{line_number}: invalid JSON ({e.msg})"
                raise ScenarioFileError(msg) from e

            try:
                scenario = scenario_from_json(document)
            except ScenarioFileError as e:
                msg = f"{path}:{line_number}: {e}"
                raise ScenarioFileError(msg) from e

            validate_scenario(network, scenario)
            scenarios.append(scenario)

    logger.info("Loaded %d scenarios from %s", len(scenarios), path)
    return scenarios
