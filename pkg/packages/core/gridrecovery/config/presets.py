from dataclasses import dataclass

from gridrecovery.domain import ComponentKind, FragilityProfile, RepairTimeTable


# Columns: undamaged, minor, moderate, extensive, complete (days)
REPAIR_TIME_TABLE = RepairTimeTable(
    {
        ComponentKind.SUBSTATION: (0.0, 1.0, 3.0, 7.0, 30.0),
        ComponentKind.TRANSMISSION: (0.0, 0.5, 1.0, 1.0, 2.0),
        ComponentKind.DISTRIBUTION: (0.0, 0.5, 1.0, 1.0, 1.0),
    }
)

# About 60% of components end up damaged
DEFAULT_FRAGILITY = FragilityProfile(
    {
        ComponentKind.SUBSTATION: (0.40, 0.20, 0.20, 0.12, 0.08),
        ComponentKind.TRANSMISSION: (0.40, 0.25, 0.15, 0.12, 0.08),
        ComponentKind.DISTRIBUTION: (0.40, 0.25, 0.17, 0.10, 0.08),
    }
)

UNDAMAGED_FRAGILITY = FragilityProfile(
    dict.fromkeys(ComponentKind, (1.0, 0.0, 0.0, 0.0, 0.0))
)

RU_FRACTION = 0.15
DEFAULT_GAMMA = 0.99
DEFAULT_ZETA = 0.8
DEFAULT_HORIZON = 10

BETA_CAP = 100
LINEAR_BELIEF_ALPHA_CAP = 1_000_000
ADAPTIVE_ALPHA_CAP = 100_000
ADAPTIVE_BUDGET_CAP = 900_000


@dataclass(frozen=True)
class NetworkPreset:
    """Parameters for the synthetic network generator"""

    transmission_len: int
    segment_spacing_m: float
    populations: tuple[int, ...]
    feeder_lengths_m: tuple[float, ...]

    @property
    def n_cells(self) -> int:
        return len(self.populations)


# 36 cells, 47905 people, 1 + 11 + 315 = 327 components
GILROY = NetworkPreset(
    transmission_len=11,
    segment_spacing_m=100.0,
    populations=(
        1279, 1888, 1448, 843, 916, 1323, 2093, 951, 1462, 988, 1342, 1042,
        1723, 1804, 1922, 1162, 844, 1760, 1761, 1006, 1192, 985, 1045, 1315,
        925, 918, 1081, 1715, 957, 1015, 790, 1336, 2004, 1738, 1680, 1652,
    ),  # fmt: skip
    feeder_lengths_m=tuple(
        100.0 * n
        for n in (
            11, 9, 8, 9, 10, 9, 9, 8, 11, 9, 6, 7, 8, 7, 8, 9, 12, 8,
            9, 10, 7, 10, 7, 6, 9, 10, 10, 6, 9, 11, 7, 8, 8, 9, 11, 10,
        )  # fmt: skip
    ),
)

# 12 cells, 12000 people, 1 + 4 + 55 = 60 components
DESK = NetworkPreset(
    transmission_len=4,
    segment_spacing_m=100.0,
    populations=(1036, 834, 935, 966, 871, 786, 1038, 1218, 1237, 838, 702, 1539),
    feeder_lengths_m=tuple(
        100.0 * n for n in (4, 4, 5, 6, 6, 4, 4, 4, 4, 4, 5, 5)
    ),
)

NETWORK_PRESETS = {
    "gilroy": GILROY,
    "desk": DESK,
}


def get_network_preset(name: str) -> NetworkPreset:
    """
    Get a named network preset.

    Args:
        name: Preset name ("desk" or "gilroy")

    Returns:
        NetworkPreset with generator parameters

    Raises:
        ValueError: If no preset exists with that name
    """
    if name not in NETWORK_PRESETS:
        msg = f"No network preset named {name!r}"
        raise ValueError(msg)
    return NETWORK_PRESETS[name]
