"""Core data types shared across the library.

The central object is :class:`LabeledMatrix`, an n-by-p feature matrix with
binary class labels (0/1).  Everything downstream (ranking, selection,
classification, metrics) consumes it.  Instances are treated as immutable
after construction and can therefore be shared freely across worker threads.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

__all__ = [
    "DataError",
    "LabeledMatrix",
    "FeatureScore",
    "Ranking",
    "SelectionResult",
    "validate",
    "standardize",
]


class DataError(ValueError):
    """Invalid data or configuration (maps to exit code 1 in the CLI)."""


@dataclass(frozen=True)
class LabeledMatrix:
    """Training data: ``x`` has n rows (samples) and p columns (features),
    ``labels`` holds n binary values (0 = first population, 1 = second).
    """

    x: np.ndarray
    labels: np.ndarray

    def __init__(self, x, labels):
        x = np.ascontiguousarray(x, dtype=np.float64)
        labels = np.asarray(labels)
        if x.ndim != 2:
            raise DataError(f"feature matrix must be 2-d, got shape {x.shape}")
        if labels.ndim != 1 or labels.shape[0] != x.shape[0]:
            raise DataError(
                f"labels must be 1-d with one entry per row: "
                f"{labels.shape} vs {x.shape[0]} rows"
            )
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "labels", np.ascontiguousarray(labels, dtype=np.int64))

    @property
    def n(self) -> int:
        return self.x.shape[0]

    @property
    def p(self) -> int:
        return self.x.shape[1]

    @property
    def pi_hat(self) -> float:
        """Empirical fraction of class-1 samples."""
        return float(self.labels.mean())


@dataclass(frozen=True)
class FeatureScore:
    """Per-feature marginal fit result.

    ``ell_hat`` is the minimized mean negative log-likelihood of the
    two-parameter logistic model; ``s_hat`` the empirical z-score statistic.
    ``at_bound`` flags quasi-separable columns whose slope hit the cap.
    """

    feature_index: int
    alpha_hat: float
    beta_hat: float
    ell_hat: float
    s_hat: float
    converged: bool
    at_bound: bool


@dataclass(frozen=True)
class Ranking:
    """Permutation of the features ordered by ascending ``ell_hat``.

    ``scores[i]`` is the fit for feature ``order[i]``; ties in ``ell_hat``
    are broken by ascending feature index, so the order is deterministic.
    """

    order: np.ndarray
    scores: tuple[FeatureScore, ...]

    def __post_init__(self):
        object.__setattr__(self, "order", np.asarray(self.order, dtype=np.int64))
        object.__setattr__(self, "scores", tuple(self.scores))

    @property
    def p(self) -> int:
        return self.order.shape[0]

    def ell_by_rank(self) -> np.ndarray:
        """ell_hat values along the ranking (non-decreasing)."""
        return np.array([s.ell_hat for s in self.scores])

    def ell_by_feature(self) -> np.ndarray:
        """ell_hat values indexed by original feature index."""
        out = np.empty(self.p)
        out[self.order] = self.ell_by_rank()
        return out


@dataclass(frozen=True)
class SelectionResult:
    """Chosen model size ``r`` plus the selected ranking prefix."""

    r: int
    selected: np.ndarray
    method: str
    diagnostics: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "selected", np.asarray(self.selected, dtype=np.int64))
        if self.method not in ("threshold", "changepoint", "block_cv"):
            raise DataError(f"unknown selection method {self.method!r}")
        if self.r != self.selected.shape[0]:
            raise DataError(
                f"r={self.r} does not match {self.selected.shape[0]} selected indices"
            )


def validate(matrix: LabeledMatrix) -> LabeledMatrix:
    """Check all LabeledMatrix invariants, returning the input unchanged.

    Raises :class:`DataError` naming the first violated invariant: dimension
    bounds, non-binary labels, single-class labels, or a non-finite entry
    (reported with its row and column).
    """
    x, labels = matrix.x, matrix.labels
    n, p = x.shape
    if n < 2:
        raise DataError(f"need at least 2 samples, got {n}")
    if p < 1:
        raise DataError("need at least 1 feature")
    bad = (labels != 0) & (labels != 1)
    if bad.any():
        i = int(np.flatnonzero(bad)[0])
        raise DataError(f"label at row {i} is {matrix.labels[i]}, must be 0 or 1")
    if labels.min() == labels.max():
        raise DataError("single class: labels must include both 0 and 1")
    if not np.isfinite(x).all():
        i, j = np.argwhere(~np.isfinite(x))[0]
        raise DataError(f"non-finite entry at row {int(i)}, column {int(j)}")
    return matrix


def standardize(matrix: LabeledMatrix) -> LabeledMatrix:
    """Center and scale each column to sample mean 0 and sd 1 (divisor n-1).

    Raises :class:`DataError` naming the first zero-variance column.
    """
    x = matrix.x
    sd = x.std(axis=0, ddof=1)
    if (sd == 0).any():
        j = int(np.flatnonzero(sd == 0)[0])
        raise DataError(f"zero variance column {j}")
    return LabeledMatrix((x - x.mean(axis=0)) / sd, matrix.labels)
