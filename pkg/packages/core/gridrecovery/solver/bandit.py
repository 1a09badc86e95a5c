import numpy as np
import numpy.typing as npt

from gridrecovery.validation.validator import ContractViolation


def ucb1_index(
    y_tilde: npt.ArrayLike, counts: npt.ArrayLike, total_count: int
) -> npt.NDArray[np.float64]:
    """Mean plus exploration bonus sqrt(2 ln(total) / count) per arm"""
    means = np.asarray(y_tilde, dtype=np.float64)
    pulls = np.asarray(counts, dtype=np.float64)

    if means.shape != pulls.shape or means.ndim != 1 or means.size == 0:
        msg = f"Means {means.shape} and counts {pulls.shape} must match"
        raise ValueError(msg)

    if np.any(pulls < 1) or total_count < 1:
        msg = "Every arm needs at least one pull before UCB1 selection"
        raise ValueError(msg)

    if np.any((means < 0) | (means > 1)):
        msg = f"UCB1 means must lie in [0, 1], got range [{means.min()}, {means.max()}]"
        raise ContractViolation(msg)

    return means + np.sqrt(2.0 * np.log(total_count) / pulls)


def ucb1_select(
    y_tilde: npt.ArrayLike, counts: npt.ArrayLike, total_count: int
) -> int:
    """
    Arm with the largest UCB1 index, lowest index on ties.

    Raises:
        ValueError: If an arm has not been pulled yet
        ContractViolation: If a mean lies outside [0, 1]

    Example:
        >>> ucb1_select([0.9, 0.1], [1, 1], 2)
        0
    """
    return int(np.argmax(ucb1_index(y_tilde, counts, total_count)))


def update_mean(mean: float, count: int, value: float) -> float:
    """Running mean after the `count`-th observation `value`"""
    return mean + (value - mean) / count
