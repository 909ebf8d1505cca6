"""Ranking quality: misranking counts, the AUC identity, and ROC curves.

A misranking is a pair (j1, j2) where feature j1 carries a signal, j2 does
not, and yet j2 scores better (lower ell_hat).  With p1 signal features the
pair count nu relates to the area under the ROC curve of the ranking against
the truth mask by

    AUC = 1 - nu / (p1 * (p - p1)),

exactly, once ties are counted 1/2 each (the Wilcoxon mid-rank convention).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.stats import norm, rankdata

from .data_model import DataError, Ranking

__all__ = [
    "RankingQuality",
    "count_misrankings",
    "count_misrankings_bruteforce",
    "roc_points",
    "roc_area",
    "likelihood_profile",
    "theorem_pair_misrank_probability",
    "theorem3_misrank_probability",
    "theorem4_expected_misrankings",
]


@dataclass(frozen=True)
class RankingQuality:
    """Misranking count (ties counted 1/2, so half-integral in general),
    signal count, and the implied AUC."""

    misrankings: float
    p1: int
    auc: float


def _check_mask(scores, mask):
    scores = np.asarray(scores, dtype=np.float64)
    mask = np.asarray(mask, dtype=bool)
    if scores.shape != mask.shape or scores.ndim != 1:
        raise DataError("scores and mask must be 1-d and the same length")
    p1 = int(mask.sum())
    p = mask.shape[0]
    if p1 == 0 or p1 == p:
        raise DataError("AUC undefined: need at least one signal and one null feature")
    return scores, mask, p1, p


def count_misrankings(ell_hat, truth_nonzero) -> RankingQuality:
    """Count (signal, null) pairs where the null feature scores lower.

    O(p log p) via mid-ranks; ties contribute 1/2 per pair.
    """
    scores, mask, p1, p = _check_mask(ell_hat, truth_nonzero)
    ranks = rankdata(scores)  # mid-ranks
    nu = float(ranks[mask].sum() - p1 * (p1 + 1) / 2.0)
    return RankingQuality(misrankings=nu, p1=p1, auc=1.0 - nu / (p1 * (p - p1)))


def count_misrankings_bruteforce(ell_hat, truth_nonzero) -> RankingQuality:
    """O(p1 * (p - p1)) pair enumeration; the independent check for the fast path."""
    scores, mask, p1, p = _check_mask(ell_hat, truth_nonzero)
    sig = scores[mask][:, None]
    nul = scores[~mask][None, :]
    nu = float(np.sum(nul < sig) + 0.5 * np.sum(nul == sig))
    return RankingQuality(misrankings=nu, p1=p1, auc=1.0 - nu / (p1 * (p - p1)))


def roc_points(ranking_order, truth_nonzero) -> np.ndarray:
    """(p+1, 2) array of (false positive rate, true positive rate) for every
    model size k = 0..p along the ranking."""
    order = np.asarray(ranking_order, dtype=np.int64)
    mask = np.asarray(truth_nonzero, dtype=bool)
    if order.shape != mask.shape:
        raise DataError("order and mask must have the same length")
    p1 = int(mask.sum())
    p = mask.shape[0]
    if p1 == 0 or p1 == p:
        raise DataError("AUC undefined: need at least one signal and one null feature")
    hits = mask[order]
    tpr = np.concatenate([[0.0], np.cumsum(hits) / p1])
    fpr = np.concatenate([[0.0], np.cumsum(~hits) / (p - p1)])
    return np.column_stack([fpr, tpr])


def roc_area(points: np.ndarray) -> float:
    """Trapezoid area under an ROC path."""
    fpr, tpr = points[:, 0], points[:, 1]
    return float(np.sum(np.diff(fpr) * (tpr[1:] + tpr[:-1]) / 2.0))


def likelihood_profile(ranking: Ranking) -> np.ndarray:
    """(p, 2) curve of (k/p, ell_hat at rank k / ell_hat at rank 1)."""
    ell = ranking.ell_by_rank()
    if ell[0] == 0.0:
        raise DataError("leading ell_hat is zero; profile undefined")
    p = ell.shape[0]
    ks = np.arange(1, p + 1) / p
    return np.column_stack([ks, ell / ell[0]])


def _phi_ratio(c: float, sigma: float) -> float:
    """Phi(-c/sigma); non-positive sigma falls back to the degenerate
    conventions Phi(-inf)=0, Phi(inf)=1."""
    if c == 0.0:
        return 0.5
    if sigma <= 0.0:
        return 0.0 if c > 0 else 1.0
    return float(norm.cdf(-c / sigma))


def theorem_pair_misrank_probability(c: float, sigma_plus: float, sigma_minus: float) -> float:
    """Two-term normal product for the chance that a null feature outranks a
    signal feature whose shift is c/sqrt(n) on the pair scale (sigma_plus,
    sigma_minus):

        Phi(-c/s+) Phi(c/s-) + Phi(c/s+) Phi(-c/s-)

    At c=0 this is exactly 1/2 (pure coin flip).  The caller supplies the
    pair scales; see the simulation-facing helpers for what to plug in.
    """
    a = _phi_ratio(c, sigma_plus)       # Phi(-c/s+)
    b = _phi_ratio(-c, sigma_minus)     # Phi(+c/s-)
    return a * b + (1.0 - a) * (1.0 - b)


# spec'd alias: the asymptotic pair-misranking formula
theorem3_misrank_probability = theorem_pair_misrank_probability


def theorem4_expected_misrankings(c: float, n: int, pairs) -> float:
    """Sum over (sigma_plus, sigma_minus) pairs of
    Phi(-c*k_n/s+) + Phi(-c*k_n/s-) with k_n = sqrt(log n): the expected
    misranking total when signal shifts are c*sqrt(log n / n)."""
    if n < 2:
        raise DataError("need n >= 2")
    kappa = float(np.sqrt(np.log(n)))
    total = 0.0
    for sp, sm in pairs:
        total += _phi_ratio(c * kappa, sp) + _phi_ratio(c * kappa, sm)
    return total
