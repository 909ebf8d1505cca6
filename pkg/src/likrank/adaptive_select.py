"""Choosing the model size r from a ranking.

Three routes:

* threshold -- scan the ranked, optionally corrected scores and stop at the
  first rank whose successors all look null (score above a threshold t).
  Two score conventions are supported: the quadratic z-score correction
  (subtract the estimated pure-noise component of each score) and the
  practical scrambled-percentile variant, which compares raw scores against
  a null distribution obtained by refitting with permuted labels.
* changepoint -- locate the break in the weakest-first sequence of ratios
  between the sorted original and sorted scrambled scores with the CUSUM
  statistic T(t) = m^{-1/2} (S(mt) - t S(m)).
* block_cv -- grow the model in ranked blocks, stopping when cross-validated
  centroid-classifier error stops improving, with retry runs at halved and
  doubled block sizes (the final result is the best run).  Known failure
  mode, reproduced deliberately in the experiments: the apparent error it
  optimizes is biased low, so it tends to stop far short of the best test
  error.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .classify_eval import cv_error_with_folds, stratified_folds
from .data_model import DataError, LabeledMatrix, Ranking, SelectionResult, validate
from .logit_rank import FitSettings, _fit_columns, zscores_empirical
from .simulate import rng_stream

__all__ = [
    "ThresholdSettings",
    "ChangePointSettings",
    "BlockCvSettings",
    "u2_hat",
    "u2_hat_all",
    "u2_default_threshold",
    "threshold_rule",
    "select_threshold",
    "scrambled_threshold",
    "scrambled_score_table",
    "select_changepoint",
    "select_block_cv",
]


@dataclass(frozen=True)
class ThresholdSettings:
    """mode is "u2_corrected" (subtract the noise-quadratic estimate from
    each score) or "scrambled_percentile" (raw scores against a permuted-label
    null; the threshold itself comes from :func:`scrambled_threshold`)."""

    k0: int = 0
    q: int | None = None
    mode: str = "scrambled_percentile"
    alpha_level: float = 0.2
    n_scrambles: int = 1

    def __post_init__(self):
        if self.k0 < 0:
            raise DataError("k0 must be >= 0")
        if self.q is not None and self.q < 1:
            raise DataError("q must be >= 1")
        if self.mode not in ("u2_corrected", "scrambled_percentile"):
            raise DataError(f"unknown threshold mode {self.mode!r}")
        if not 0.0 < self.alpha_level < 1.0:
            raise DataError("alpha_level must be in (0, 1)")
        if self.n_scrambles < 1:
            raise DataError("n_scrambles must be >= 1")


@dataclass(frozen=True)
class ChangePointSettings:
    """The scan always runs weakest-first; n_scrambles is how many scrambled
    refits the caller pooled into the null score sequence."""

    n_scrambles: int = 1

    def __post_init__(self):
        if self.n_scrambles < 1:
            raise DataError("n_scrambles must be >= 1")


@dataclass(frozen=True)
class BlockCvSettings:
    """block_size defaults to the sample count when left as None (block
    length of the order of n); backfill_retries counts the alternative block
    sizes tried in the backing-and-filling reruns (b/2 first, then 2b, then
    quarters and quadruples)."""

    block_size: int | None = None
    cv_folds: int = 5
    patience: int = 1
    backfill_retries: int = 2

    def __post_init__(self):
        if self.block_size is not None and self.block_size < 1:
            raise DataError("block_size must be >= 1")
        if self.cv_folds < 2:
            raise DataError("cv_folds must be >= 2")
        if self.patience < 1:
            raise DataError("patience must be >= 1")
        if self.backfill_retries < 0:
            raise DataError("backfill_retries must be >= 0")


def _tau_sq(matrix: LabeledMatrix) -> float:
    """Pooled noise-variance estimate: mean squared deviation of every entry
    from its column mean (divisor n*p)."""
    centered = matrix.x - matrix.x.mean(axis=0)
    return float((centered * centered).mean())


def u2_hat_all(matrix: LabeledMatrix) -> np.ndarray:
    """Estimated pure-noise quadratic component of every feature's score:

        0.5 * pi_hat * (3 - 2 pi_hat) * s_hat_j^2 / tau_sq

    with s_hat the empirical z-score and tau_sq the pooled variance
    estimate.  The subsidiary criterion used by the corrected threshold rule
    is the negative of this value.

    Scale convention: the variance enters through its inverse (1/tau_sq),
    matching the quadratic z-score expansion the correction is derived from;
    other powers of tau sometimes seen for this estimator are inconsistent
    with that expansion and are not used here.
    """
    validate(matrix)
    tau2 = _tau_sq(matrix)
    if tau2 == 0.0:
        raise DataError("degenerate data matrix: tau_sq is zero")
    pi_hat = matrix.pi_hat
    s_hat = zscores_empirical(matrix)
    return 0.5 * pi_hat * (3.0 - 2.0 * pi_hat) * s_hat * s_hat / tau2


def u2_hat(matrix: LabeledMatrix, feature_index: int) -> float:
    """Single-feature convenience wrapper around :func:`u2_hat_all`."""
    return float(u2_hat_all(matrix)[int(feature_index)])


def u2_default_threshold(n: int) -> float:
    """Default threshold -lambda^2.5 with lambda = sqrt(log n / n): negative,
    asymptotically between the lambda^3 remainder scale and the lambda^2
    signal scale."""
    lam = np.sqrt(np.log(n) / n)
    return float(-(lam ** 2.5))


def threshold_rule(scores_by_rank, t: float, k0: int = 0, q: int | None = None) -> int:
    """The stopping rule on ranked scores.

    Returns the least r in [k0+1, q] such that every available successor
    score at positions r+1 .. r+max(k0, 1) exceeds t (for k0 = 0 the test is
    on the single successor r+1); positions past the end of the sequence
    count as exceeding.  If no r qualifies, returns q.
    """
    s = np.asarray(scores_by_rank, dtype=np.float64)
    p = s.shape[0]
    if p == 0:
        raise DataError("empty score sequence")
    q = p if q is None else min(int(q), p)
    k0 = int(k0)
    if k0 + 1 > q:
        raise DataError(f"empty candidate range: k0+1={k0 + 1} exceeds q={q}")
    window = max(k0, 1)
    above = s > t
    for r in range(k0 + 1, q + 1):
        hi = min(r + window, p)
        if above[r : hi].all():  # positions r+1..hi, 0-based slice
            return r
    return q


def select_threshold(
    ranking: Ranking,
    matrix: LabeledMatrix,
    t: float,
    settings: ThresholdSettings | None = None,
) -> SelectionResult:
    """Apply :func:`threshold_rule` to the ranking's (corrected) scores."""
    settings = settings or ThresholdSettings()
    if not np.isfinite(t):
        raise DataError("threshold t must be finite")
    if ranking.p != matrix.p:
        raise DataError("ranking and matrix disagree on feature count")
    ell = ranking.ell_by_rank()
    if settings.mode == "u2_corrected":
        correction = u2_hat_all(matrix)[ranking.order]
        scores = ell + correction  # ell_hat - elltilde with elltilde = -u2
    else:
        scores = ell
    r = threshold_rule(scores, t, settings.k0, settings.q)
    return SelectionResult(
        r=r,
        selected=ranking.order[:r],
        method="threshold",
        diagnostics={
            "t": float(t),
            "mode": settings.mode,
            "k0": settings.k0,
            "q": ranking.p if settings.q is None else settings.q,
        },
    )


def scrambled_score_table(
    matrix: LabeledMatrix,
    n_scrambles: int,
    seed: int,
    fit_settings: FitSettings | None = None,
) -> np.ndarray:
    """(n_scrambles, p) matrix of per-feature scores refit under uniformly
    permuted labels.  Permuting destroys any label-feature association, so
    each row is a draw of the full score vector from the no-signal null."""
    validate(matrix)
    fit_settings = fit_settings or FitSettings()
    out = np.empty((n_scrambles, matrix.p))
    for s in range(n_scrambles):
        g = rng_stream(seed, 202, s)
        permuted = matrix.labels[g.permutation(matrix.n)]
        out[s] = _fit_columns(matrix.x, permuted, fit_settings).ell
    return out


def scrambled_threshold(
    matrix: LabeledMatrix,
    alpha_level: float,
    n_scrambles: int,
    seed: int,
    fit_settings: FitSettings | None = None,
) -> float:
    """Lower-tail alpha_level quantile of the pooled scrambled scores.

    Selecting ranks whose raw score falls at or below this value targets a
    false positive rate of alpha_level among the null features.
    """
    if not 0.0 < alpha_level < 1.0:
        raise DataError("alpha_level must be in (0, 1)")
    pooled = scrambled_score_table(matrix, n_scrambles, seed, fit_settings)
    return float(np.quantile(pooled.ravel(), alpha_level))


def select_changepoint(
    ranking: Ranking,
    scrambled_ranking_scores,
    settings: ChangePointSettings | None = None,
) -> SelectionResult:
    """Locate the break between null-like and signal-like ranks.

    Both score sequences are sorted and paired weakest-first (largest score
    first); their elementwise ratio stays near 1 while both sequences look
    null and shrinks once genuine signals depress the original scores.  The
    CUSUM statistic T(k/m) = m^{-1/2} (S(k) - (k/m) S(m)), with S the running
    ratio sum, peaks in magnitude at the break; the model keeps the ranks
    beyond it, r = p - argmax|T| (ties resolved to the smallest k).

    Diagnostics carry the T trace plus a "no_material_change" flag raised
    when max|T| is within the noise floor (half the ratio standard deviation
    plus the cumulative-sum rounding scale, times 3).
    """
    settings = settings or ChangePointSettings()
    scr = np.asarray(scrambled_ranking_scores, dtype=np.float64)
    if scr.shape != (ranking.p,):
        raise DataError(
            f"scrambled score length {scr.shape} does not match p={ranking.p}"
        )
    orig_desc = np.sort(ranking.ell_by_rank())[::-1]  # weakest first
    scr_desc = np.sort(scr)[::-1]
    if (scr_desc == 0.0).any():
        raise DataError("scrambled scores contain zeros; ratios undefined")
    ratios = orig_desc / scr_desc
    m = ratios.shape[0]
    s_cum = np.cumsum(ratios)
    ks = np.arange(1, m)
    t_trace = (s_cum[:-1] - (ks / m) * s_cum[-1]) / np.sqrt(m)
    abs_t = np.abs(t_trace)
    k_star = int(np.argmax(abs_t)) + 1  # first max = smallest k
    max_t = float(abs_t[k_star - 1])
    sd = float(ratios.std(ddof=1)) if m > 1 else 0.0
    rounding = np.finfo(float).eps * np.sqrt(m) * float(np.abs(ratios).max())
    noise_scale = 0.5 * sd + 8.0 * rounding
    r = ranking.p - k_star
    return SelectionResult(
        r=r,
        selected=ranking.order[:r],
        method="changepoint",
        diagnostics={
            "k_star": k_star,
            "max_abs_t": max_t,
            "noise_scale": noise_scale,
            "no_material_change": bool(max_t < 3.0 * noise_scale),
            "t_trace": t_trace,
        },
    )


def _retry_block_sizes(b: int, p: int, retries: int) -> list[int]:
    """Alternative block sizes for the backing-and-filling reruns."""
    out: list[int] = []
    lo, hi = b, b
    while len(out) < retries:
        lo = max(1, lo // 2)
        if lo < b and lo not in out:
            out.append(lo)
            if len(out) >= retries:
                break
        hi = hi * 2
        if hi <= p and hi not in out:
            out.append(hi)
        if lo == 1 and hi > p:
            break
    return out[:retries]


def _grow_blocks(matrix, order, b, folds, patience, fold_seed):
    """One block-growth run; returns (best step, best cv error, cv trace)."""
    p = order.shape[0]
    n_blocks = -(-p // b)  # ceil
    fold_ids = stratified_folds(matrix.labels, folds, fold_seed)
    trace: list[float] = []
    best_err = np.inf
    best_step = 0
    since_improved = 0
    for s in range(1, n_blocks + 1):
        selected = order[: min(s * b, p)]
        err = cv_error_with_folds(matrix, selected, fold_ids)
        trace.append(err)
        if err < best_err:
            best_err = err
            best_step = s
            since_improved = 0
        else:
            since_improved += 1
            if since_improved >= patience:
                break
    return best_step, best_err, trace


def select_block_cv(
    ranking: Ranking,
    matrix: LabeledMatrix,
    settings: BlockCvSettings | None = None,
    seed: int = 0,
) -> SelectionResult:
    """Grow the model block-by-block under cross-validated centroid error.

    The base run uses the configured block size (default n); the
    backing-and-filling reruns repeat the growth at alternative block sizes
    and the run with the lowest CV error wins.  Fold assignments are fixed
    per run, so step-to-step comparisons within a run are paired.
    """
    settings = settings or BlockCvSettings()
    validate(matrix)
    b = settings.block_size if settings.block_size is not None else matrix.n
    if b > matrix.p:
        b = matrix.p
    sizes = [b] + _retry_block_sizes(b, matrix.p, settings.backfill_retries)
    runs = []
    for i, bs in enumerate(sizes):
        step, err, trace = _grow_blocks(
            matrix, ranking.order, bs, settings.cv_folds, settings.patience,
            fold_seed=rng_stream(seed, 303, i).integers(2**63),
        )
        runs.append({"block_size": bs, "best_step": step, "cv_error": err,
                     "cv_trace": trace})
    winner = min(range(len(runs)), key=lambda i: (runs[i]["cv_error"], i))
    win = runs[winner]
    r = min(win["best_step"] * win["block_size"], matrix.p)
    return SelectionResult(
        r=r,
        selected=ranking.order[:r],
        method="block_cv",
        diagnostics={
            "block_size": win["block_size"],
            "cv_error": win["cv_error"],
            "runs": runs,
        },
    )
