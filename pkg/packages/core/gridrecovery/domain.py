from collections.abc import Mapping
from dataclasses import dataclass, field
from enum import Enum, IntEnum
from functools import cached_property
from typing import Any, NamedTuple, TypeVar

import networkx as nx
import numpy as np
import numpy.typing as npt


NDArrayT = TypeVar("NDArrayT", bound=np.ndarray[Any, Any])


class ComponentKind(Enum):
    """Kinds of power network components"""

    SUBSTATION = "substation"
    TRANSMISSION = "transmission"
    DISTRIBUTION = "distribution"


class DamageState(IntEnum):
    """Damage states, ordered from no damage to complete damage"""

    UNDAMAGED = 0
    MINOR = 1
    MODERATE = 2
    EXTENSIVE = 3
    COMPLETE = 4


class Objective(Enum):
    """Recovery objectives"""

    R1 = "r1"  # days until a fraction of the population has power
    R2 = "r2"  # population-weighted time with power

    @property
    def minimize(self) -> bool:
        return self is Objective.R1


@dataclass(frozen=True)
class Component:
    """A single network component and the component it draws power from"""

    id: int
    kind: ComponentKind
    parent: int | None = None


@dataclass(frozen=True)
class GridCell:
    """A populated grid rectangle fed by one distribution leaf"""

    id: int
    population: int
    serving_leaf: int


@dataclass(frozen=True)
class Network:
    """Dependency tree of components plus the population cells they serve"""

    components: tuple[Component, ...]
    cells: tuple[GridCell, ...]

    def __post_init__(self) -> None:
        if not self.components:
            msg = "Network must have at least one component"
            raise ValueError(msg)

        if any(c.id != i for i, c in enumerate(self.components)):
            msg = "Component ids must be 0..L-1 in order"
            raise ValueError(msg)

    @property
    def size(self) -> int:
        return len(self.components)

    @cached_property
    def total_population(self) -> int:
        return sum(cell.population for cell in self.cells)

    @cached_property
    def populations(self) -> npt.NDArray[np.int64]:
        return np.array([cell.population for cell in self.cells], dtype=np.int64)

    @cached_property
    def parents(self) -> npt.NDArray[np.intp]:
        """Parent index per component, -1 for the root"""
        return np.array(
            [-1 if c.parent is None else c.parent for c in self.components],
            dtype=np.intp,
        )

    @cached_property
    def graph(self) -> nx.DiGraph:
        """Power flow graph: an edge runs from each parent to its child"""
        graph = nx.DiGraph()
        graph.add_nodes_from(range(self.size))
        graph.add_edges_from(
            (c.parent, c.id) for c in self.components if c.parent is not None
        )
        return graph

    @cached_property
    def root(self) -> int:
        """The first component without a parent"""
        root = next((c.id for c in self.components if c.parent is None), None)
        if root is None:
            msg = "Network has no parentless component"
            raise ValueError(msg)
        return root

    def path_to_root(self, component: int) -> tuple[int, ...]:
        """Component ids from `component` up to and including the root"""
        try:
            path = nx.shortest_path(self.graph, self.root, component)
        except nx.NetworkXNoPath as e:
            msg = f"Component {component} is not fed by the substation"
            raise ValueError(msg) from e
        return tuple(int(c) for c in reversed(path))

    @cached_property
    def cell_paths(self) -> npt.NDArray[np.bool_]:
        """Boolean matrix (cells x components): True where a cell depends on it"""
        paths = np.zeros((len(self.cells), self.size), dtype=bool)
        for row, cell in enumerate(self.cells):
            leaf = cell.serving_leaf
            paths[row, [leaf, *nx.ancestors(self.graph, leaf)]] = True
        return paths

    def kind_counts(self) -> dict[ComponentKind, int]:
        counts = dict.fromkeys(ComponentKind, 0)
        for component in self.components:
            counts[component.kind] += 1
        return counts


@dataclass(frozen=True)
class FragilityProfile:
    """Per-kind probability mass over the five damage states"""

    masses: Mapping[ComponentKind, tuple[float, ...]]

    def __post_init__(self) -> None:
        for kind in ComponentKind:
            if kind not in self.masses:
                msg = f"Fragility profile is missing kind {kind.value}"
                raise ValueError(msg)
            mass = self.masses[kind]
            if len(mass) != len(DamageState):
                msg = f"Fragility for {kind.value} needs {len(DamageState)} entries"
                raise ValueError(msg)
            if any(p < 0 for p in mass) or abs(sum(mass) - 1.0) > 1e-9:
                msg = f"Fragility for {kind.value} is not a probability mass: {mass}"
                raise ValueError(msg)

    def damaged_fraction(self, kind: ComponentKind) -> float:
        return 1.0 - self.masses[kind][DamageState.UNDAMAGED]


@dataclass(frozen=True)
class RepairTimeTable:
    """Expected repair time in days per component kind and damage state"""

    mean_days: Mapping[ComponentKind, tuple[float, ...]]

    def __post_init__(self) -> None:
        for kind in ComponentKind:
            if kind not in self.mean_days:
                msg = f"Repair table is missing kind {kind.value}"
                raise ValueError(msg)
            means = self.mean_days[kind]
            if len(means) != len(DamageState):
                msg = f"Repair means for {kind.value} need {len(DamageState)} entries"
                raise ValueError(msg)
            if means[DamageState.UNDAMAGED] != 0:
                msg = f"Undamaged repair mean for {kind.value} must be 0"
                raise ValueError(msg)
            if any(m < 0 for m in means):
                msg = f"Repair means for {kind.value} must be nonnegative"
                raise ValueError(msg)

    def mean(self, kind: ComponentKind, state: DamageState) -> float:
        return self.mean_days[kind][state]


@dataclass(frozen=True)
class DamageScenario:
    """Initial damage and the environment's realized repair durations"""

    seed: int
    initial_state: tuple[DamageState, ...]
    realized_duration: tuple[float, ...]

    @property
    def size(self) -> int:
        return len(self.initial_state)

    @property
    def damaged_count(self) -> int:
        return sum(s != DamageState.UNDAMAGED for s in self.initial_state)


def _readonly(array: NDArrayT) -> NDArrayT:
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class State:
    """MDP state at a decision epoch

    `rho` is the remaining repair time seen by the planner, `work_done` the
    crew-days already spent on each component.
    """

    damage: npt.NDArray[np.int8]
    rho: npt.NDArray[np.float64]
    work_done: npt.NDArray[np.float64]
    epoch: int = 0
    elapsed_days: float = 0.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "damage", _readonly(np.array(self.damage, np.int8)))
        object.__setattr__(self, "rho", _readonly(np.array(self.rho, np.float64)))
        object.__setattr__(
            self, "work_done", _readonly(np.array(self.work_done, np.float64))
        )

    @property
    def size(self) -> int:
        return int(self.damage.size)

    @cached_property
    def damaged_mask(self) -> npt.NDArray[np.bool_]:
        return _readonly(self.damage != DamageState.UNDAMAGED)

    @cached_property
    def damaged_components(self) -> tuple[int, ...]:
        return tuple(int(i) for i in np.flatnonzero(self.damaged_mask))

    @property
    def damaged_count(self) -> int:
        return len(self.damaged_components)

    @property
    def is_repaired(self) -> bool:
        return self.damaged_count == 0


@dataclass(frozen=True)
class Action:
    """Set of components receiving one repair unit each"""

    components: tuple[int, ...]

    def __post_init__(self) -> None:
        ordered = tuple(sorted(int(c) for c in self.components))
        if len(set(ordered)) != len(ordered):
            msg = f"Action assigns a component twice: {self.components}"
            raise ValueError(msg)
        object.__setattr__(self, "components", ordered)

    def __len__(self) -> int:
        return len(self.components)

    def mask(self, size: int) -> npt.NDArray[np.bool_]:
        assign = np.zeros(size, dtype=bool)
        assign[list(self.components)] = True
        return assign


@dataclass(frozen=True)
class TransitionOutcome:
    """Result of advancing the simulator to the next repair completion"""

    next: State
    r: float
    completed: tuple[int, ...]


@dataclass(frozen=True)
class RewardSpec:
    """Objective, goal fraction, discount and optional reward cap"""

    objective: Objective = Objective.R1
    zeta: float = 0.8
    gamma: float = 0.99
    reward_cap: float | None = None

    def __post_init__(self) -> None:
        if not 0 < self.zeta <= 1:
            msg = f"zeta must be in (0, 1], got {self.zeta}"
            raise ValueError(msg)
        if not 0 < self.gamma <= 1:
            msg = f"gamma must be in (0, 1], got {self.gamma}"
            raise ValueError(msg)
        if self.reward_cap is not None and self.reward_cap <= 0:
            msg = f"reward_cap must be positive, got {self.reward_cap}"
            raise ValueError(msg)


class EpisodeStep(NamedTuple):
    """One decision epoch of an executed recovery

    `epoch` is the 0-based epoch the action was chosen in. The other fields
    describe the network right after the completion that ended it.
    """

    epoch: int
    elapsed_days: float
    powered: int
    r: float
    assigned: tuple[int, ...]


@dataclass(frozen=True)
class EpisodeTrace:
    """Full recovery of one scenario under one selector"""

    selector: str
    scenario_seed: int
    n_units: int
    initial_damaged: int
    initial_powered: int
    total_population: int
    steps: tuple[EpisodeStep, ...]
    days_to_goal: float
    t_tot_days: float
    benefit: float

    @property
    def powered_series(self) -> tuple[int, ...]:
        return tuple(step.powered for step in self.steps)


@dataclass(frozen=True)
class BatchResult:
    """Paired traces per selector over a shared scenario list"""

    scenario_seeds: tuple[int, ...]
    traces: Mapping[str, tuple[EpisodeTrace, ...]]
    config_digest: str = ""
    selectors: tuple[str, ...] = field(init=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "selectors", tuple(self.traces))
        for name, traces in self.traces.items():
            if len(traces) != len(self.scenario_seeds):
                expected = len(self.scenario_seeds)
                msg = f"Selector {name} has {len(traces)} traces, expected {expected}"
                raise ValueError(msg)
