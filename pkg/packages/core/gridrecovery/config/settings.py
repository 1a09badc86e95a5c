import hashlib
import json
import logging
import sys

from collections.abc import Mapping
from pathlib import Path
from typing import Annotated, Any


if sys.version_info >= (3, 11):
    import tomllib

    from typing import Self
else:
    import tomli as tomllib

    from typing_extensions import Self

from pydantic import (
    AfterValidator,
    BaseModel,
    ConfigDict,
    Field,
    NonNegativeInt,
    PositiveFloat,
    PositiveInt,
    ValidationError,
    field_validator,
    model_validator,
)

from gridrecovery.config.presets import (
    ADAPTIVE_ALPHA_CAP,
    ADAPTIVE_BUDGET_CAP,
    BETA_CAP,
    DEFAULT_FRAGILITY,
    DEFAULT_GAMMA,
    DEFAULT_HORIZON,
    DEFAULT_ZETA,
    LINEAR_BELIEF_ALPHA_CAP,
    NETWORK_PRESETS,
    REPAIR_TIME_TABLE,
    RU_FRACTION,
    NetworkPreset,
    get_network_preset,
)
from gridrecovery.domain import (
    ComponentKind,
    FragilityProfile,
    Network,
    Objective,
    RepairTimeTable,
    RewardSpec,
)
from gridrecovery.network.topology import network_from_preset
from gridrecovery.solver.belief import RuMapping
from gridrecovery.solver.policies import BasePolicyKind
from gridrecovery.solver.selectors import SelectorKind, SelectorSpec


logger = logging.getLogger(__name__)

StateMass = tuple[float, float, float, float, float]


def _nonzero_jobs(value: int) -> int:
    if value == 0:
        msg = "jobs must be nonzero (negative counts back from all cores)"
        raise ValueError(msg)
    return value


Jobs = Annotated[int, AfterValidator(_nonzero_jobs)]

# fields that change speed or location of results but not their content
_DIGEST_EXCLUDE: dict[str, Any] = {
    "jobs": True,
    "output_dir": True,
    "selectors": {"__all__": {"jobs"}},
}


class ConfigError(ValueError):
    """Raised when a run configuration cannot be loaded or is invalid"""


class _Section(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class NetworkConfig(_Section):
    """Network preset with optional overrides of its generator parameters"""

    preset: str = "desk"
    transmission_len: PositiveInt | None = None
    segment_spacing_m: PositiveFloat | None = None
    populations: list[NonNegativeInt] | None = Field(default=None, min_length=1)
    feeder_lengths_m: list[PositiveFloat] | None = None

    @field_validator("preset")
    @classmethod
    def _known_preset(cls, value: str) -> str:
        if value not in NETWORK_PRESETS:
            msg = f"unknown preset {value!r}, expected one of {sorted(NETWORK_PRESETS)}"
            raise ValueError(msg)
        return value

    @model_validator(mode="after")
    def _feeders_match_cells(self) -> Self:
        if self.feeder_lengths_m is not None:
            cells = len(self.populations or get_network_preset(self.preset).populations)
            if len(self.feeder_lengths_m) != cells:
                msg = f"{len(self.feeder_lengths_m)} feeder lengths for {cells} cells"
                raise ValueError(msg)
        return self

    def to_preset(self) -> NetworkPreset:
        base = get_network_preset(self.preset)
        populations = tuple(self.populations or base.populations)

        feeders = self.feeder_lengths_m
        if feeders is None and self.populations is not None:
            feeders = [self.segment_spacing_m or base.segment_spacing_m] * len(
                populations
            )

        return NetworkPreset(
            transmission_len=self.transmission_len or base.transmission_len,
            segment_spacing_m=self.segment_spacing_m or base.segment_spacing_m,
            populations=populations,
            feeder_lengths_m=tuple(feeders or base.feeder_lengths_m),
        )

    def build(self) -> Network:
        return network_from_preset(self.to_preset())


class HazardConfig(_Section):
    """Scenario generation or ingestion settings"""

    scenarios: PositiveInt = 25
    master_seed: NonNegativeInt = 0
    scenario_file: Path | None = None
    fragility: dict[ComponentKind, StateMass] | None = None
    repair_means: dict[ComponentKind, StateMass] | None = None

    @model_validator(mode="after")
    def _tables_are_valid(self) -> Self:
        # the domain constructors carry the invariants; surface them here
        self.profile()
        self.table()
        return self

    def profile(self) -> FragilityProfile:
        if self.fragility is None:
            return DEFAULT_FRAGILITY
        return FragilityProfile(self.fragility)

    def table(self) -> RepairTimeTable:
        if self.repair_means is None:
            return REPAIR_TIME_TABLE
        return RepairTimeTable(self.repair_means)


class SelectorConfig(_Section):
    """One action selector and its simulation budget"""

    kind: SelectorKind
    name: str | None = None
    horizon: PositiveInt = DEFAULT_HORIZON
    alpha_tilde: PositiveInt = 100
    beta: PositiveInt = Field(default=10, le=BETA_CAP)
    b_star: NonNegativeInt = Field(default=0, le=ADAPTIVE_BUDGET_CAP)
    budget: PositiveInt | None = None
    base_policy: BasePolicyKind = BasePolicyKind.RANDOM
    mapping: RuMapping = RuMapping.ASCENDING
    jobs: Jobs = 1

    @model_validator(mode="after")
    def _budget_identities(self) -> Self:
        if self.kind is SelectorKind.ADAPTIVE:
            if self.alpha_tilde > ADAPTIVE_ALPHA_CAP:
                msg = f"alpha_tilde {self.alpha_tilde} exceeds {ADAPTIVE_ALPHA_CAP}"
                raise ValueError(msg)
            if self.budget is not None and self.alpha_tilde + self.b_star > self.budget:
                msg = (
                    f"alpha_tilde + b_star = {self.alpha_tilde + self.b_star} "
                    f"exceeds budget {self.budget}"
                )
                raise ValueError(msg)
        elif self.kind is not SelectorKind.BASE:
            if self.alpha_tilde > LINEAR_BELIEF_ALPHA_CAP:
                cap = LINEAR_BELIEF_ALPHA_CAP
                msg = f"alpha_tilde {self.alpha_tilde} exceeds {cap}"
                raise ValueError(msg)
            if self.budget is not None and self.alpha_tilde * self.beta > self.budget:
                msg = (
                    f"alpha_tilde * beta = {self.alpha_tilde * self.beta} "
                    f"exceeds budget {self.budget}"
                )
                raise ValueError(msg)
        return self

    def to_spec(self) -> SelectorSpec:
        return SelectorSpec(
            kind=self.kind,
            name=self.name,
            horizon=self.horizon,
            alpha_tilde=self.alpha_tilde,
            beta=self.beta,
            b_star=self.b_star,
            base_policy=self.base_policy,
            mapping=self.mapping,
            n_jobs=self.jobs,
        )


def _default_selectors() -> list[SelectorConfig]:
    return [
        SelectorConfig(kind=SelectorKind.BASE),
        SelectorConfig(kind=SelectorKind.LINEAR_BELIEF),
    ]


class RunConfig(_Section):
    """Complete, validated description of an experiment run"""

    network: NetworkConfig = NetworkConfig()
    hazard: HazardConfig = HazardConfig()
    objective: Objective = Objective.R1
    zeta: float = Field(default=DEFAULT_ZETA, gt=0, le=1)
    gamma: float = Field(default=DEFAULT_GAMMA, gt=0, lt=1)
    reward_cap: PositiveFloat | None = None
    selectors: list[SelectorConfig] = Field(
        default_factory=_default_selectors, min_length=1
    )
    units: PositiveInt | None = None
    ru_fraction: float = Field(default=RU_FRACTION, gt=0, le=1)
    deterministic: bool = False
    jobs: Jobs = 1
    output_dir: Path = Path("results")

    @model_validator(mode="after")
    def _unique_labels(self) -> Self:
        labels = [s.name or s.kind.value for s in self.selectors]
        if len(set(labels)) != len(labels):
            msg = f"selector labels must be unique, got {labels}"
            raise ValueError(msg)
        return self

    def reward_spec(self) -> RewardSpec:
        return RewardSpec(self.objective, self.zeta, self.gamma, self.reward_cap)

    def selector_specs(self) -> list[SelectorSpec]:
        return [s.to_spec() for s in self.selectors]

    def digest(self) -> str:
        """sha256 of the settings that determine the results"""
        payload = self.model_dump(mode="json", exclude=_DIGEST_EXCLUDE)
        canonical = json.dumps(payload, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def _format_errors(error: ValidationError) -> str:
    lines = []
    for detail in error.errors():
        location = ".".join(str(part) for part in detail["loc"]) or "config"
        lines.append(f"  - {location}: {detail['msg']}")
    return "Invalid configuration:\n" + "\n".join(lines)


def _set_dotted(data: dict[str, Any], dotted: str, value: Any) -> None:
    *parents, leaf = dotted.split(".")
    node = data
    for part in parents:
        child = node.setdefault(part, {})
        if not isinstance(child, dict):
            msg = f"Cannot override {dotted}: {part} is not a table"
            raise ConfigError(msg)
        node = child
    node[leaf] = value


def parse_config(
    path: Path | None = None,
    overrides: Mapping[str, Any] | None = None,
) -> RunConfig:
    """
    Load a TOML run configuration and apply overrides.

    Args:
        path: TOML file, or None for all defaults
        overrides: Values keyed by dotted field path (e.g. "hazard.scenarios")

    Returns:
        Validated RunConfig

    Raises:
        ConfigError: If the file cannot be read or parsed, or a field is
            invalid or unknown

    Example:
        >>> parse_config(None, {"objective": "r2"}).objective
        <Objective.R2: 'r2'>
    """
    data: dict[str, Any] = {}

    if path is not None:
        try:
            with path.open("rb") as handle:
                data = tomllib.load(handle)
        except OSError as e:
            msg = f"Cannot read config {path}: {e}"
            raise ConfigError(msg) from e
        except tomllib.TOMLDecodeError as e:
            msg = f"Cannot parse config {path}: {e}"
            raise ConfigError(msg) from e

    for dotted, value in (overrides or {}).items():
        _set_dotted(data, dotted, value)

    try:
        config = RunConfig.model_validate(data)
    except ValidationError as e:
        msg = _format_errors(e)
        raise ConfigError(msg) from e

    logger.debug("Loaded configuration %s", config.digest())
    return config
