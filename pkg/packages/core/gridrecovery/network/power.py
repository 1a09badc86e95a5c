from collections.abc import Sequence

import numpy as np
import numpy.typing as npt

from gridrecovery.domain import Network


DamageVector = Sequence[bool] | npt.NDArray[np.bool_]


def _as_mask(network: Network, damaged: DamageVector) -> npt.NDArray[np.bool_]:
    mask = np.asarray(damaged, dtype=bool)
    if mask.shape != (network.size,):
        msg = f"Damage vector has shape {mask.shape}, expected ({network.size},)"
        raise ValueError(msg)
    return mask


def is_functional(network: Network, damaged: DamageVector, component: int) -> bool:
    """
    Check whether a component delivers power.

    A component works when it and every component between it and the
    substation are undamaged.
    """
    if not 0 <= component < network.size:
        msg = f"Unknown component {component}"
        raise ValueError(msg)

    mask = _as_mask(network, damaged)
    return not any(mask[c] for c in network.path_to_root(component))


def functional_cells(
    network: Network, damaged: DamageVector
) -> npt.NDArray[np.bool_]:
    """Boolean per cell: True if its serving leaf is functional"""
    mask = _as_mask(network, damaged)
    return ~np.any(network.cell_paths & mask, axis=1)


def powered_population(network: Network, damaged: DamageVector) -> int:
    """Total population of cells whose serving leaf is functional"""
    return int(network.populations[functional_cells(network, damaged)].sum())
