import itertools
import logging
import math

from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from enum import Enum

import numpy as np
import numpy.typing as npt
import scipy.linalg

from gridrecovery.domain import Action
from gridrecovery.solver.candidates import CandidateSet


logger = logging.getLogger(__name__)

SVD_RCOND = 1e-10

FloatArray = npt.NDArray[np.float64]


class RuMapping(Enum):
    """How the units of an assignment are matched to design-matrix columns"""

    ASCENDING = "ascending"  # unit n works the n-th smallest location
    ALL_ORDERS = "all_orders"  # one row per ordering of the units


def _row_columns(
    action: Action,
    index_map: dict[int, int],
    n_units: int,
    mapping: RuMapping,
) -> list[list[int]]:
    ms = sorted(index_map[c] for c in action.components)
    orders: Iterable[Sequence[int]] = [ms]
    if mapping is RuMapping.ALL_ORDERS:
        orders = itertools.permutations(ms)
    return [[m * n_units + n for n, m in enumerate(order)] for order in orders]


def design_rows(
    candidates: CandidateSet,
    n_units: int,
    mapping: RuMapping = RuMapping.ASCENDING,
) -> tuple[FloatArray, npt.NDArray[np.intp]]:
    """
    Design matrix plus the candidate each row encodes.

    Columns are ordered location-major: column m * N + n is set when unit n
    works location m.
    """
    if n_units < 1:
        msg = f"n_units must be at least 1, got {n_units}"
        raise ValueError(msg)

    width = len(candidates.locations) * n_units
    rows = []
    owners = []
    for i, action in enumerate(candidates.actions):
        for columns in _row_columns(action, candidates.index_map, n_units, mapping):
            row = np.zeros(width)
            row[columns] = 1.0
            rows.append(row)
            owners.append(i)

    return np.vstack(rows), np.asarray(owners, dtype=np.intp)


def build_design_matrix(
    candidates: CandidateSet,
    n_units: int,
    mapping: RuMapping = RuMapping.ASCENDING,
) -> FloatArray:
    """
    Binary matrix with one row per candidate (per unit ordering for ALL_ORDERS).

    Example:
        Three locations, one unit and candidates {0}, {1}, {2} give the
        3x3 identity.
    """
    matrix, _ = design_rows(candidates, n_units, mapping)
    return matrix


def _singular_values_kept(s: FloatArray, rcond: float) -> npt.NDArray[np.bool_]:
    if s.size == 0 or s[0] == 0:
        msg = "Design matrix is all zeros"
        raise ValueError(msg)
    return s > rcond * s[0]


def min_norm_least_squares(
    h_matrix: npt.ArrayLike,
    y: npt.ArrayLike,
    rcond: float = SVD_RCOND,
) -> FloatArray:
    """
    Minimum-norm minimizer of ||y - H theta||.

    Solved through the SVD; singular values below rcond * sigma_max count
    as zero.

    Raises:
        ValueError: If H is empty or all zeros, or y has the wrong length
    """
    h = np.asarray(h_matrix, dtype=np.float64)
    response = np.asarray(y, dtype=np.float64)

    if h.ndim != 2 or h.size == 0:
        msg = f"Design matrix must be a nonempty 2-d array, got shape {h.shape}"
        raise ValueError(msg)

    if response.shape != (h.shape[0],):
        msg = f"Response has shape {response.shape}, expected ({h.shape[0]},)"
        raise ValueError(msg)

    u, s, vh = np.linalg.svd(h, full_matrices=False)
    keep = _singular_values_kept(s, rcond)

    coefficients = (u[:, keep].T @ response) / s[keep]
    return vh[keep].T @ coefficients


def pinv_least_squares(
    h_matrix: npt.ArrayLike,
    y: npt.ArrayLike,
    rcond: float = SVD_RCOND,
) -> FloatArray:
    """Same minimizer through scipy's pseudo-inverse, as an independent route"""
    h = np.asarray(h_matrix, dtype=np.float64)
    pseudo_inverse = scipy.linalg.pinv(h, atol=0.0, rtol=rcond)
    return np.asarray(pseudo_inverse @ np.asarray(y, dtype=np.float64))


def numerical_rank(h_matrix: npt.ArrayLike, rcond: float = SVD_RCOND) -> int:
    s = np.linalg.svd(np.asarray(h_matrix, dtype=np.float64), compute_uv=False)
    return int(_singular_values_kept(s, rcond).sum())


@dataclass(frozen=True, eq=False)
class BeliefModel:
    """Fitted linear belief over (location, unit) pairs"""

    h: FloatArray
    y: FloatArray
    theta_hat: FloatArray
    y_hat: FloatArray
    residual_norm: float
    observed: npt.NDArray[np.bool_]
    rank: int
    rse: float
    r_squared: float
    f_statistic: float


def fit_belief_model(
    candidates: CandidateSet,
    y: npt.ArrayLike,
    n_units: int,
    mapping: RuMapping = RuMapping.ASCENDING,
) -> BeliefModel:
    """
    Fit the belief model to per-candidate mean returns.

    No intercept is fitted. Fit statistics are diagnostics only and are
    NaN where the degrees of freedom do not allow them.

    Args:
        candidates: Candidate assignments
        y: Mean return per candidate
        n_units: Repair units per assignment
        mapping: Unit-to-column mapping

    Returns:
        BeliefModel with estimates and fit diagnostics
    """
    means = np.asarray(y, dtype=np.float64)
    if means.shape != (candidates.alpha_tilde,):
        msg = f"Expected {candidates.alpha_tilde} responses, got shape {means.shape}"
        raise ValueError(msg)

    h, owners = design_rows(candidates, n_units, mapping)
    response = means[owners]

    theta_hat = min_norm_least_squares(h, response)
    y_hat = h @ theta_hat
    residuals = response - y_hat

    rows = h.shape[0]
    rank = numerical_rank(h)
    rss = float(residuals @ residuals)
    tss = float(((response - response.mean()) ** 2).sum())
    dof = rows - rank

    rse = math.sqrt(rss / dof) if dof > 0 else math.nan
    r_squared = 1.0 - rss / tss if tss > 0 else math.nan
    f_statistic = (
        ((tss - rss) / (rank - 1)) / (rss / dof)
        if rank > 1 and dof > 0 and rss > 0
        else math.nan
    )

    logger.debug(
        "Belief fit: rows=%d columns=%d rank=%d RSE=%.4g R2=%.4f F=%.4g",
        rows,
        h.shape[1],
        rank,
        rse,
        r_squared,
        f_statistic,
    )

    return BeliefModel(
        h=h,
        y=response,
        theta_hat=theta_hat,
        y_hat=y_hat,
        residual_norm=math.sqrt(rss),
        observed=h.any(axis=0),
        rank=rank,
        rse=rse,
        r_squared=r_squared,
        f_statistic=f_statistic,
    )


def sequential_assignment(
    theta_hat: npt.ArrayLike,
    locations: tuple[int, ...],
    n_units: int,
    *,
    minimize: bool,
    observed: npt.ArrayLike | None = None,
) -> Action:
    """
    Turn parameter estimates into an assignment, one unit per location.

    Repeatedly takes the best remaining (location, unit) entry (smallest
    when minimizing), assigns that location and blanks its whole row so it
    is never chosen again. Ties go to the smallest (m, n). Columns marked
    unobserved are blanked up front; if only blanked entries remain, the
    lowest unassigned location is used.

    Args:
        theta_hat: Estimates, length M * N, location-major
        locations: Component id per location index
        n_units: Repair units N
        minimize: Pick smallest entries instead of largest
        observed: Optional mask of columns present in the design matrix

    Returns:
        Action with min(N, M) components
    """
    n_locations = len(locations)
    theta = np.array(theta_hat, dtype=np.float64)
    if theta.shape != (n_locations * n_units,):
        msg = f"theta_hat has shape {theta.shape}, expected ({n_locations * n_units},)"
        raise ValueError(msg)

    blank = np.inf if minimize else -np.inf
    work = theta.reshape(n_locations, n_units)

    if observed is not None:
        mask = np.asarray(observed, dtype=bool).reshape(n_locations, n_units)
        work[~mask] = blank

    chosen: list[int] = []
    for _ in range(min(n_units, n_locations)):
        flat = int(np.argmin(work) if minimize else np.argmax(work))
        m = flat // n_units
        if not np.isfinite(work.flat[flat]):
            m = next(i for i in range(n_locations) if i not in chosen)
        chosen.append(m)
        work[m, :] = blank

    return Action(tuple(locations[m] for m in chosen))
