from gridrecovery.config.settings import RunConfig
from gridrecovery.domain import BatchResult, DamageScenario, Network
from gridrecovery.experiment.runner import run_batch
from gridrecovery.hazard.damage import sample_scenarios
from gridrecovery.hazard.scenarios import load_scenarios


def build_network(config: RunConfig) -> Network:
    """
    Build the network described by a run configuration.

    Example:
        >>> build_network(RunConfig()).size
        60
    """
    return config.network.build()


def prepare_scenarios(config: RunConfig, network: Network) -> list[DamageScenario]:
    """
    Scenarios for a run: read from the scenario file if one is configured,
    otherwise sampled from the master seed.

    Raises:
        ScenarioFileError: If the scenario file cannot be parsed
        ValidationError: If a scenario does not fit the network
    """
    hazard = config.hazard
    if hazard.scenario_file is not None:
        return load_scenarios(hazard.scenario_file, network)

    return sample_scenarios(
        network,
        hazard.scenarios,
        hazard.master_seed,
        hazard.profile(),
        hazard.table(),
    )


def run_experiment(
    config: RunConfig,
    scenarios: list[DamageScenario] | None = None,
) -> BatchResult:
    """
    Run every configured selector on every scenario.

    Args:
        config: Validated run configuration
        scenarios: Scenarios to use instead of the configured ones

    Returns:
        BatchResult with paired traces per selector

    Raises:
        ScenarioFileError: If the scenario file cannot be parsed
        ValidationError: If a scenario does not fit the network

    Example:
        >>> result = run_experiment(RunConfig(hazard={"scenarios": 2}))
        >>> len(result.scenario_seeds)
        2
    """
    network = build_network(config)
    if scenarios is None:
        scenarios = prepare_scenarios(config, network)

    return run_batch(
        network,
        scenarios,
        config.selector_specs(),
        config.reward_spec(),
        master_seed=config.hazard.master_seed,
        n_jobs=config.jobs,
        table=config.hazard.table(),
        deterministic=config.deterministic,
        n_units=config.units,
        ru_fraction=config.ru_fraction,
        config_digest=config.digest(),
    )
