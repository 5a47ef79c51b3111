"""
Information-theoretic analysis of outcome distributions

Classical post-processing of two-variable distributions: marginals,
Shannon and mutual information, conditional min-entropy, agreement under
a pairing, and a Pearson independence statistic for samples. Logarithms
are base 2; terms with probability at or below the floor contribute 0.
"""

from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence, Tuple

import numpy as np
from scipy.stats import chi2_contingency, entropy

from rng_audit.exceptions import DegenerateSampleError, DimensionMismatchError, InvalidStateError
from rng_audit.settings import DEFAULT_SETTINGS


PROBABILITY_FLOOR = DEFAULT_SETTINGS.probability_floor


@dataclass(frozen=True)
class BivariateDistribution:
    """Joint distribution of X (rows) and Y (columns)"""
    probabilities: np.ndarray

    def __post_init__(self):
        table = np.asarray(self.probabilities, dtype=float)
        if table.ndim != 2 or table.size == 0:
            raise InvalidStateError("bivariate table must be a nonempty 2-D array", {"shape": table.shape})
        if np.any(table < -PROBABILITY_FLOOR) or not np.all(np.isfinite(table)):
            raise InvalidStateError("probabilities must be finite and nonnegative")
        total = float(table.sum())
        if abs(total - 1.0) > DEFAULT_SETTINGS.state_tolerance * max(1, table.size):
            raise InvalidStateError(f"probabilities sum to {total!r}, expected 1")
        table = np.where(table <= PROBABILITY_FLOOR, 0.0, table)
        object.__setattr__(self, "probabilities", table)

    @classmethod
    def from_counts(cls, counts) -> "BivariateDistribution":
        counts = np.asarray(counts, dtype=float)
        return cls(counts / counts.sum())

    @property
    def x_dim(self) -> int:
        return self.probabilities.shape[0]

    @property
    def y_dim(self) -> int:
        return self.probabilities.shape[1]

    def transpose(self) -> "BivariateDistribution":
        return BivariateDistribution(self.probabilities.T.copy())


class ChiSquareResult(NamedTuple):
    statistic: float
    degrees_of_freedom: int
    p_value: float


def marginal(d: BivariateDistribution, axis: str) -> np.ndarray:
    """
    Marginal distribution of X or Y

    Args:
        d: Joint distribution
        axis: "X" for row sums, "Y" for column sums
    """
    key = axis.upper()
    if key == "X":
        return d.probabilities.sum(axis=1)
    if key == "Y":
        return d.probabilities.sum(axis=0)
    raise InvalidStateError(f"axis must be 'X' or 'Y', got {axis!r}")


def shannon_entropy(p: Sequence[float]) -> float:
    """Shannon entropy in bits"""
    p = np.asarray(p, dtype=float)
    p = np.where(p <= PROBABILITY_FLOOR, 0.0, p)
    if not np.any(p):
        return 0.0
    return float(entropy(p, base=2))


def mutual_information(d: BivariateDistribution) -> float:
    """I(X;Y) in bits, clamped at 0"""
    joint = d.probabilities
    px = joint.sum(axis=1, keepdims=True)
    py = joint.sum(axis=0, keepdims=True)
    mask = joint > PROBABILITY_FLOOR
    ratio = joint[mask] / (px @ py)[mask]
    total = float(np.sum(joint[mask] * np.log2(ratio)))
    return max(0.0, total)


def min_entropy_given_y(d: BivariateDistribution) -> float:
    """
    Conditional min-entropy H_min(X|Y) = -log2 Σ_y max_x p(x, y)

    The guessing probability only uses the maximum value per column, so
    ties do not depend on index order.
    """
    guess = float(np.sum(d.probabilities.max(axis=0)))
    # p_guess can exceed 1 by rounding only
    return max(0.0, float(-np.log2(min(guess, 1.0))))


def agreement_probability(d: BivariateDistribution, pairing: Sequence[int]) -> float:
    """
    Probability that Y equals the partner of X: Σ_x p(x, pairing[x])

    Raises:
        DimensionMismatchError: If X and Y have different sizes or the pairing has the wrong length
    """
    if d.x_dim != d.y_dim:
        raise DimensionMismatchError("agreement_probability", d.x_dim, d.y_dim)
    if len(pairing) != d.x_dim:
        raise DimensionMismatchError("agreement_probability pairing", d.x_dim, len(pairing))
    rows = np.arange(d.x_dim)
    return float(np.sum(d.probabilities[rows, np.asarray(pairing, dtype=int)]))


def contingency_table(samples: Iterable[Tuple[int, int]]) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Count table of observed (x, y) pairs

    Returns:
        tuple: (counts, x categories, y categories), categories ascending
    """
    pairs = np.asarray(list(samples), dtype=np.int64)
    if pairs.size == 0:
        raise DegenerateSampleError("no samples")
    if pairs.ndim != 2 or pairs.shape[1] != 2:
        raise DegenerateSampleError("samples must be (x, y) pairs", {"shape": pairs.shape})
    x_values, x_index = np.unique(pairs[:, 0], return_inverse=True)
    y_values, y_index = np.unique(pairs[:, 1], return_inverse=True)
    counts = np.zeros((x_values.size, y_values.size), dtype=np.int64)
    np.add.at(counts, (x_index.ravel(), y_index.ravel()), 1)
    return counts, x_values, y_values


def chi_square_independence(samples: Iterable[Tuple[int, int]]) -> ChiSquareResult:
    """
    Pearson chi-square statistic for independence of X and Y

    Expected counts come from the empirical marginals; no continuity
    correction is applied.

    Raises:
        DegenerateSampleError: Empty input or a variable with one category
    """
    counts, x_values, y_values = contingency_table(samples)
    if x_values.size < 2 or y_values.size < 2:
        raise DegenerateSampleError("need at least two categories for each variable",
                                    {"x_categories": x_values.size, "y_categories": y_values.size})
    statistic, p_value, dof, _ = chi2_contingency(counts, correction=False)
    return ChiSquareResult(float(statistic), int(dof), float(p_value))
