"""Nearest-centroid classification on a selected feature subset.

A sample is assigned to the class whose per-class training mean (restricted
to the selected features) is closer in squared Euclidean distance; exact
ties go to class 0.  Also provides train/test error, stratified k-fold
cross-validation, and an incremental error curve over ranking prefixes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data_model import DataError, LabeledMatrix, validate
from .simulate import rng_stream

__all__ = [
    "CentroidModel",
    "train_centroid",
    "predict",
    "predict_batch",
    "test_error",
    "stratified_folds",
    "cv_error",
    "prefix_error_curve",
]


@dataclass(frozen=True)
class CentroidModel:
    selected: np.ndarray
    centroid0: np.ndarray
    centroid1: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "selected", np.asarray(self.selected, dtype=np.int64))
        object.__setattr__(self, "centroid0", np.asarray(self.centroid0, dtype=np.float64))
        object.__setattr__(self, "centroid1", np.asarray(self.centroid1, dtype=np.float64))


def train_centroid(matrix: LabeledMatrix, selected) -> CentroidModel:
    """Per-class means of the selected feature columns."""
    validate(matrix)
    sel = np.asarray(selected, dtype=np.int64)
    if sel.size == 0:
        raise DataError("empty selection")
    if np.unique(sel).size != sel.size:
        raise DataError("duplicate index in selection")
    if sel.min() < 0 or sel.max() >= matrix.p:
        raise DataError("selection index out of range")
    x, lab = matrix.x, matrix.labels
    return CentroidModel(
        selected=sel,
        centroid0=x[lab == 0][:, sel].mean(axis=0),
        centroid1=x[lab == 1][:, sel].mean(axis=0),
    )


def predict(model: CentroidModel, row) -> int:
    """Label of the nearer centroid; a tie returns 0."""
    r = np.asarray(row, dtype=np.float64)[model.selected]
    d0 = float(((r - model.centroid0) ** 2).sum())
    d1 = float(((r - model.centroid1) ** 2).sum())
    return 0 if d0 <= d1 else 1


def predict_batch(model: CentroidModel, x: np.ndarray) -> np.ndarray:
    """Vectorized :func:`predict` over the rows of a full feature matrix."""
    r = np.asarray(x, dtype=np.float64)[:, model.selected]
    d0 = ((r - model.centroid0[None, :]) ** 2).sum(axis=1)
    d1 = ((r - model.centroid1[None, :]) ** 2).sum(axis=1)
    return (d0 > d1).astype(np.int64)


def test_error(model: CentroidModel, test_matrix: LabeledMatrix) -> float:
    """Fraction of misclassified test rows."""
    validate(test_matrix)
    pred = predict_batch(model, test_matrix.x)
    return float((pred != test_matrix.labels).mean())


def stratified_folds(labels, folds: int, seed: int) -> np.ndarray:
    """Fold id per sample: each class is shuffled (seeded) and dealt
    round-robin, so fold sizes are class-proportional.

    The shuffle is applied to each class's member list in row order, which
    makes the assignment a deterministic function of (labels, folds, seed).
    """
    lab = np.asarray(labels)
    if folds < 2:
        raise DataError("need at least 2 folds")
    out = np.empty(lab.shape[0], dtype=np.int64)
    for c in (0, 1):
        members = np.flatnonzero(lab == c)
        if members.size < folds:
            raise DataError(
                f"class {c} has {members.size} samples, fewer than {folds} folds"
            )
        g = rng_stream(seed, 101, c)
        g.shuffle(members)
        out[members] = np.arange(members.size) % folds
    return out


def cv_error(matrix: LabeledMatrix, selected, folds: int, seed: int) -> float:
    """Pooled stratified k-fold error of the centroid classifier."""
    validate(matrix)
    fold_ids = stratified_folds(matrix.labels, folds, seed)
    return cv_error_with_folds(matrix, selected, fold_ids)


def cv_error_with_folds(matrix: LabeledMatrix, selected, fold_ids) -> float:
    """CV error under an explicit fold assignment (one id per row)."""
    fold_ids = np.asarray(fold_ids)
    wrong = 0
    for f in np.unique(fold_ids):
        test = fold_ids == f
        train = LabeledMatrix(matrix.x[~test], matrix.labels[~test])
        model = train_centroid(train, selected)
        pred = predict_batch(model, matrix.x[test])
        wrong += int((pred != matrix.labels[test]).sum())
    return wrong / matrix.n


def prefix_error_curve(
    train: LabeledMatrix, test: LabeledMatrix, order
) -> np.ndarray:
    """Test error of the centroid classifier for every prefix of ``order``.

    Entry k-1 equals test_error(train_centroid(train, order[:k]), test);
    computed in one pass with a running sum of per-feature squared-distance
    differences, decisions identical to :func:`predict` (ties to class 0).
    """
    order = np.asarray(order, dtype=np.int64)
    c0 = train.x[train.labels == 0].mean(axis=0)[order]
    c1 = train.x[train.labels == 1].mean(axis=0)[order]
    xo = test.x[:, order]
    gap = (xo - c0[None, :]) ** 2 - (xo - c1[None, :]) ** 2
    np.cumsum(gap, axis=1, out=gap)
    pred = gap > 0.0
    return (pred != (test.labels[:, None] == 1)).mean(axis=0)
