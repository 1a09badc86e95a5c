from gridrecovery.api import build_network, prepare_scenarios, run_experiment
from gridrecovery.config.settings import ConfigError, RunConfig, parse_config
from gridrecovery.domain import (
    Action,
    BatchResult,
    ComponentKind,
    DamageScenario,
    DamageState,
    EpisodeTrace,
    Network,
    Objective,
    RewardSpec,
    State,
)
from gridrecovery.hazard.scenarios import ScenarioFileError
from gridrecovery.validation.validator import ContractViolation, ValidationError


__all__ = [
    "Action",
    "BatchResult",
    "ComponentKind",
    "ConfigError",
    "ContractViolation",
    "DamageScenario",
    "DamageState",
    "EpisodeTrace",
    "Network",
    "Objective",
    "RewardSpec",
    "RunConfig",
    "ScenarioFileError",
    "State",
    "ValidationError",
    "build_network",
    "parse_config",
    "prepare_scenarios",
    "run_experiment",
]
