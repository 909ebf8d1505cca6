"""Shared test utilities: independent oracles kept deliberately separate from
the library code paths they check."""

import numpy as np
import pytest

from likrank.data_model import FeatureScore, LabeledMatrix, Ranking


def oracle_nll(alpha, beta, labels, x):
    """Independent objective evaluation (library softplus, not the package's
    fused form): mean of log(1 + exp(t)) - I*t."""
    t = alpha + beta * np.asarray(x, dtype=float)
    lab = np.asarray(labels, dtype=float)
    return float(np.mean(np.logaddexp(0.0, t) - lab * t))


def oracle_grid_fit(labels, x, a_lo=-5.0, a_hi=5.0, b_lo=-20.0, b_hi=20.0,
                    points=161, refinements=3):
    """Brute-force 2-d grid minimization with refinement passes.

    Returns (alpha, beta, nll) of the best grid point inside the box.  The
    refinement passes re-grid a +-2-cell window around the running best, so
    the minimizer of this smooth convex objective is localized to a small
    fraction of the final grid spacing.
    """
    lab = np.asarray(labels, dtype=float)
    xv = np.asarray(x, dtype=float)

    def sweep(al, ah, bl, bh):
        alphas = np.linspace(al, ah, points)
        betas = np.linspace(bl, bh, points)
        t = alphas[:, None, None] + betas[None, :, None] * xv[None, None, :]
        obj = (np.logaddexp(0.0, t) - lab[None, None, :] * t).mean(axis=2)
        i, j = np.unravel_index(np.argmin(obj), obj.shape)
        return alphas[i], betas[j], float(obj[i, j]), alphas, betas

    a, b, val, alphas, betas = sweep(a_lo, a_hi, b_lo, b_hi)
    for _ in range(refinements):
        ha = 2.0 * (alphas[1] - alphas[0])
        hb = 2.0 * (betas[1] - betas[0])
        a, b, val, alphas, betas = sweep(
            max(a - ha, a_lo), min(a + ha, a_hi),
            max(b - hb, b_lo), min(b + hb, b_hi),
        )
    return a, b, val


def make_ranking(ell_values):
    """Build a Ranking directly from raw score values (index-tie-stable)."""
    ell = np.asarray(ell_values, dtype=float)
    order = np.argsort(ell, kind="stable")
    scores = tuple(
        FeatureScore(feature_index=int(j), alpha_hat=0.0, beta_hat=0.0,
                     ell_hat=float(ell[j]), s_hat=0.0, converged=True,
                     at_bound=False)
        for j in order
    )
    return Ranking(order=order, scores=scores)


def random_two_class(rng, n, p, mu_scale=0.0, p1=0):
    """Random labeled matrix with both classes guaranteed present."""
    labels = (rng.random(n) < 0.5).astype(np.int64)
    while labels.min() == labels.max():
        labels = (rng.random(n) < 0.5).astype(np.int64)
    truth = np.zeros(p)
    if p1:
        truth[:p1] = mu_scale
    x = rng.normal(size=(n, p)) + labels[:, None] * truth[None, :]
    return LabeledMatrix(x, labels), truth


@pytest.fixture
def rng():
    return np.random.default_rng(20240811)
