"""Acceptance suite: one test per numbered criterion, each printing a
PASS/FAIL line (run with ``pytest tests/test_acceptance.py -v -s``).

Criteria 5-7 run the full-size experiment sweeps and take tens of minutes
on one core; deselect them with ``-m "not slow"`` during development.

Criterion 3 note: the stated pair-misranking values are asserted exactly as
specified.  The companion diagnostic test checks the same Monte Carlo
estimates against the two-term normal formula evaluated at the effective
pair scale of the score statistic (the pair-difference standard deviation
of the z-score whose mean shift is c), which is the scale the ranking
statistic actually realizes; see the repository notes for the derivation.
"""

import math

import numpy as np
import pytest
from scipy.stats import norm

from likrank.data_model import LabeledMatrix
from likrank.experiments import (
    STABILITY_C0_GRID,
    STABILITY_N_GRID,
    run_correlation_experiment,
    run_section53_study,
    run_stability_experiment,
)
from likrank.logit_rank import FitSettings, _fit_columns, fit_feature
from likrank.metrics import (
    count_misrankings,
    count_misrankings_bruteforce,
    roc_area,
    roc_points,
    theorem3_misrank_probability,
    theorem4_expected_misrankings,
)
from likrank.simulate import rng_stream

from conftest import oracle_grid_fit

# pair scale actually realized by the score statistic for unit noise and
# pi = 1/2: sd(S_j1 -+ S_j2) * sqrt(n) = sqrt(2 * EZ^2 / (pi (1 - pi))) = 2*sqrt(2)
SIGMA_STATED = math.sqrt(0.5)
SIGMA_EFFECTIVE = 2.0 * math.sqrt(2.0)


def report(criterion, ok, detail):
    print(f"\n[criterion {criterion}] {'PASS' if ok else 'FAIL'} {detail}")


def pair_misrank_mc(mu, n, reps, seed, chunk=2500):
    """Empirical P(ell_null < ell_signal) over isolated (signal, null) pairs.

    Each replicate draws its own Bernoulli(1/2) labels and N(0,1) noise for
    two independent features; the signal feature adds mu to class-1 rows.
    Batched via per-column label support in the fitter.
    """
    hits = 0
    done = 0
    settings = FitSettings()
    while done < reps:
        m = min(chunk, reps - done)
        g = rng_stream(seed, done)
        labels = (g.random((n, m)) < 0.5).astype(np.float64)
        bad = (labels.min(axis=0) == labels.max(axis=0))
        while bad.any():
            labels[:, bad] = (g.random((n, int(bad.sum()))) < 0.5)
            bad = (labels.min(axis=0) == labels.max(axis=0))
        z_sig = g.standard_normal((n, m))
        z_nul = g.standard_normal((n, m))
        x = np.concatenate([z_sig + mu * labels, z_nul], axis=1)
        lab2 = np.concatenate([labels, labels], axis=1)
        res = _fit_columns(x, lab2, settings)
        hits += int(np.sum(res.ell[m:] < res.ell[:m]))
        done += m
    return hits / reps


# --------------------------------------------------------------------------
# heavyweight shared runs
# --------------------------------------------------------------------------

@pytest.fixture(scope="session")
def stability_report():
    print("\n[setup] stability experiment, reps=200 ...")
    return run_stability_experiment(reps=200, seed=1001)


@pytest.fixture(scope="session")
def tables_reports():
    print("\n[setup] correlation tables, reps=200 x 2 placements ...")
    grouped = run_correlation_experiment(200, "grouped_head", seed=2002)
    randomized = run_correlation_experiment(200, "randomized", seed=2002)
    return grouped, randomized


@pytest.fixture(scope="session")
def s53_study():
    print("\n[setup] large-problem pipeline over 20 seeds ...")
    return run_section53_study(reps=20, seed=3003)


@pytest.fixture(scope="session")
def misrank_mc():
    print("\n[setup] pair misranking Monte Carlo, n=400, 20000 reps x 3 ...")
    n = 400
    return {
        c: pair_misrank_mc(c / math.sqrt(n), n, reps=20_000, seed=400 + int(10 * c))
        for c in (0.0, 1.0, 2.0)
    }


# --------------------------------------------------------------------------
# criterion 1: misranking count / AUC identity
# --------------------------------------------------------------------------

def test_criterion_1_auc_identity():
    g = np.random.default_rng(11)
    worst = 0.0
    for _ in range(1000):
        p = int(g.integers(2, 201))
        p1 = int(g.integers(1, p))
        mask = np.zeros(p, dtype=bool)
        mask[g.permutation(p)[:p1]] = True
        scores = g.normal(size=p)
        fast = count_misrankings(scores, mask)
        slow = count_misrankings_bruteforce(scores, mask)
        assert fast.misrankings == slow.misrankings
        order = np.argsort(scores, kind="stable")
        area = roc_area(roc_points(order, mask))
        worst = max(worst, abs(area - fast.auc))
        assert abs(area - fast.auc) <= 1e-12
        assert fast.auc == 1.0 - fast.misrankings / (p1 * (p - p1))
    report(1, True, f"1000 instances, max |trapezoid - pair AUC| = {worst:.2e}")


# --------------------------------------------------------------------------
# criterion 2: optimizer against the grid-refinement oracle
# --------------------------------------------------------------------------

def test_criterion_2_optimizer_matches_grid_oracle():
    # the oracle searches the same feasible set as the solver: beta over the
    # cap box, alpha wide enough to support any beta in it, so the at-bound
    # flag comparison is meaningful on quasi-separable draws
    g = np.random.default_rng(22)
    cap = FitSettings().beta_cap
    checked = 0
    bounded = 0
    worst_ell = 0.0
    worst_par = 0.0
    for _ in range(100):
        n = int(g.integers(4, 21))
        labels = (g.random(n) < 0.5).astype(np.int64)
        while labels.min() == labels.max():
            labels = (g.random(n) < 0.5).astype(np.int64)
        x = g.normal(size=n) * float(g.uniform(0.5, 2.0))
        score = fit_feature(labels, x)
        a_span = cap * float(np.abs(x).max()) + 5.0
        a, b, val = oracle_grid_fit(labels, x, a_lo=-a_span, a_hi=a_span,
                                    b_lo=-cap, b_hi=cap)
        if score.at_bound:
            bounded += 1
            assert abs(b) >= cap - 1e-3, (
                f"fit flagged at_bound but oracle found interior beta {b:.4f}"
            )
            continue
        assert abs(b) < cap - 1e-3, (
            f"fit interior (beta={score.beta_hat:.4f}) but oracle at {b:.4f}"
        )
        checked += 1
        worst_ell = max(worst_ell, abs(score.ell_hat - val))
        worst_par = max(worst_par,
                        abs(score.alpha_hat - a), abs(score.beta_hat - b))
        assert abs(score.ell_hat - val) <= 1e-8
        assert abs(score.alpha_hat - a) <= 1e-4
        assert abs(score.beta_hat - b) <= 1e-4
    report(2, True,
           f"{checked} interior fits (max |d ell|={worst_ell:.1e}, "
           f"max |d param|={worst_par:.1e}), {bounded} at-bound cases agreed")


# --------------------------------------------------------------------------
# criterion 3: pair misranking probabilities at the stated scale
# --------------------------------------------------------------------------

@pytest.mark.slow
def test_criterion_3_pair_misranking_stated_values(misrank_mc):
    tol = 0.015
    details = []
    failures = []
    for c, emp in misrank_mc.items():
        stated = theorem3_misrank_probability(c, SIGMA_STATED, SIGMA_STATED)
        gap = abs(emp - stated)
        details.append(f"c={c:.0f}: empirical={emp:.4f} stated={stated:.4f} "
                       f"|gap|={gap:.4f}")
        if gap > tol:
            failures.append(c)
    report(3, not failures, "; ".join(details))
    assert not failures, (
        "empirical pair-misranking probabilities do not match the stated "
        f"formula at sigma={SIGMA_STATED:.4f} for c in {failures}: "
        + "; ".join(details)
        + " (see notes: the stated scale contradicts the same spec's "
          "correlation-table values, which this implementation reproduces)"
    )


@pytest.mark.slow
def test_criterion_3_diagnostic_effective_scale(misrank_mc):
    # same Monte Carlo, same two-term formula, pair scale as realized by the
    # score statistic: this is the consistency check the machinery must pass
    tol = 0.015
    details = []
    for c, emp in misrank_mc.items():
        expected = theorem3_misrank_probability(c, SIGMA_EFFECTIVE, SIGMA_EFFECTIVE)
        details.append(f"c={c:.0f}: empirical={emp:.4f} formula={expected:.4f}")
        assert abs(emp - expected) <= tol, details[-1]
    report("3-diagnostic", True, "; ".join(details) + f" (sigma={SIGMA_EFFECTIVE:.4f})")


# --------------------------------------------------------------------------
# criterion 4: decay of the misranking probability with n
# --------------------------------------------------------------------------

@pytest.mark.slow
def test_criterion_4_misranking_decay():
    c = 1.5
    emp = {}
    formula = {}
    for n in (100, 400):
        mu = c * math.sqrt(math.log(n) / n)
        emp[n] = pair_misrank_mc(mu, n, reps=20_000, seed=4000 + n)
        # one symmetric pair contributes 2 * Phi(-c kappa_n / sigma)
        formula[n] = theorem4_expected_misrankings(
            c, n, [(SIGMA_EFFECTIVE, SIGMA_EFFECTIVE)]
        )
    detail = "; ".join(
        f"n={n}: empirical={emp[n]:.4f} formula={formula[n]:.4f}" for n in emp
    )
    ok = all(0.5 <= emp[n] / formula[n] <= 2.0 for n in emp) and emp[400] < emp[100]
    report(4, ok, detail)
    for n in emp:
        ratio = emp[n] / formula[n]
        assert 0.5 <= ratio <= 2.0, f"n={n}: ratio {ratio:.3f} outside factor 2"
    assert emp[400] < emp[100], "misranking probability failed to decrease with n"


# --------------------------------------------------------------------------
# criterion 5: ranking stability in n
# --------------------------------------------------------------------------

@pytest.mark.slow
def test_criterion_5_stability_across_n(stability_report):
    summary = stability_report.summary
    spreads = []
    for kind in ("fixed", "uniform"):
        for c0 in STABILITY_C0_GRID:
            means = [s["mean_auc"] for s in summary
                     if s["magnitude"] == kind and s["c0"] == c0]
            spreads.append((kind, c0, max(means) - min(means)))
        for n in STABILITY_N_GRID:
            seq = [s["mean_auc"] for s in summary
                   if s["magnitude"] == kind and s["n"] == n]
            assert all(a < b for a, b in zip(seq, seq[1:])), (
                f"mean AUC not strictly increasing in c0 at n={n} ({kind}): {seq}"
            )
    worst = max(sp for _, _, sp in spreads)
    report(5, worst <= 0.05,
           f"max mean-AUC spread over n = {worst:.4f} (limit 0.05); "
           f"AUC strictly increasing in c0 at every n")
    for kind, c0, sp in spreads:
        assert sp <= 0.05, f"spread {sp:.4f} > 0.05 for c0={c0} ({kind})"


# --------------------------------------------------------------------------
# criterion 6: correlated-noise tables
# --------------------------------------------------------------------------

def _cell(report_obj, rho, n):
    for s in report_obj.summary:
        if s["rho"] == rho and s["n"] == n:
            return s
    raise KeyError((rho, n))


@pytest.mark.slow
def test_criterion_6_correlation_tables(tables_reports):
    grouped, randomized = tables_reports
    g0 = _cell(grouped, 0.0, 100)
    g99 = _cell(grouped, 0.99, 100)
    r99 = _cell(randomized, 0.99, 100)
    detail = (f"grouped rho=0: mean={g0['mean_auc']:.4f} sd={g0['sd_auc']:.4f}; "
              f"grouped rho=.99: sd={g99['sd_auc']:.4f}; "
              f"randomized rho=.99: sd={r99['sd_auc']:.4f}")
    ok = (abs(g0["mean_auc"] - 0.711) <= 0.02
          and 0.008 <= g0["sd_auc"] <= 0.018
          and g99["sd_auc"] >= 3.0 * g0["sd_auc"]
          and r99["sd_auc"] <= 0.6 * g99["sd_auc"])
    report(6, ok, detail)
    assert abs(g0["mean_auc"] - 0.711) <= 0.02, detail
    assert 0.008 <= g0["sd_auc"] <= 0.018, detail
    assert g99["sd_auc"] >= 3.0 * g0["sd_auc"], detail
    assert r99["sd_auc"] <= 0.6 * g99["sd_auc"], detail


# --------------------------------------------------------------------------
# criterion 7: full pipeline on the large problem
# --------------------------------------------------------------------------

@pytest.mark.slow
def test_criterion_7_large_problem_pipeline(s53_study):
    rows = s53_study.rows
    by_part = {}
    for r in rows:
        by_part.setdefault(r["part"], []).append(r)
    n_seeds = len(by_part["a_ideal_curve"])

    def mean(part, field):
        return float(np.mean([r[field] for r in by_part[part]]))

    a_min = mean("a_ideal_curve", "min_error")
    a_arg = mean("a_ideal_curve", "r")
    a_top50 = mean("a_ideal_curve", "top50_error")
    b_auc = mean("b_ranking_auc", "auc")
    c_min = mean("c_empirical_curve", "min_error")
    d_fpr = mean("d_threshold", "fpr")
    d_err = mean("d_threshold", "test_error")
    e_err = mean("e_changepoint", "test_error")
    f_wins = sum(
        f["test_error"] > max(d["test_error"], e["test_error"])
        for f, d, e in zip(by_part["f_block_cv"], by_part["d_threshold"],
                           by_part["e_changepoint"])
    )
    detail = (f"{n_seeds} seeds: (a) min={a_min:.4f} argmin={a_arg:.0f} "
              f"top50={a_top50:.3f}; (b) auc={b_auc:.4f}; (c) min={c_min:.4f}; "
              f"(d) fpr={d_fpr:.3f} err={d_err:.4f}; (e) err={e_err:.4f}; "
              f"(f) wins={f_wins}/{n_seeds}")
    checks = [
        a_min <= 0.02, 300 <= a_arg <= 700, 0.10 <= a_top50 <= 0.22,
        0.60 <= b_auc <= 0.66, 0.11 <= c_min <= 0.17,
        0.15 <= d_fpr <= 0.25, 0.13 <= d_err <= 0.21,
        0.13 <= e_err <= 0.21, f_wins >= 16,
    ]
    report(7, all(checks), detail)
    assert a_min <= 0.02, detail
    assert 300 <= a_arg <= 700, detail
    assert 0.10 <= a_top50 <= 0.22, detail
    assert 0.60 <= b_auc <= 0.66, detail
    assert 0.11 <= c_min <= 0.17, detail
    assert 0.15 <= d_fpr <= 0.25, detail
    assert 0.13 <= d_err <= 0.21, detail
    assert 0.13 <= e_err <= 0.21, detail
    assert f_wins >= 16, detail


# --------------------------------------------------------------------------
# criterion 8: decay rate of the quadratic-approximation residual
# --------------------------------------------------------------------------

@pytest.mark.slow
def test_criterion_8_quadratic_residual_slope():
    # exact profile quadratic: ell_hat ~ R - (pi (1-pi) / 2) (S + mu)^2 with S
    # the noise z-score at known pi; residual should shrink at the
    # (log n / n)^{3/2} rate, an n-exponent near 1.5
    pi = 0.5
    coef = 0.5 * pi * (1.0 - pi)
    meds = {}
    for n in (50, 100, 200, 400):
        mu_val = 1.2 * math.sqrt(math.log(n) / n)
        p, p1 = 2000, 200
        vals = []
        for rep in range(24):
            g = rng_stream(5150, n, rep)
            labels = (g.random(n) < pi).astype(np.int64)
            while labels.min() == labels.max():
                labels = (g.random(n) < pi).astype(np.int64)
            truth = np.zeros(p)
            truth[:p1] = mu_val
            z = g.standard_normal((n, p))
            x = z + labels[:, None] * truth[None, :]
            res = _fit_columns(x, labels, FitSettings())
            s = (labels - pi) @ z / (n * pi * (1.0 - pi))
            pred = -coef * (s + truth) ** 2
            idx = g.permutation(p)[:150]
            d_ell = res.ell[idx][:, None] - res.ell[idx][None, :]
            d_pred = pred[idx][:, None] - pred[idx][None, :]
            resid = np.abs(d_ell - d_pred)[np.triu_indices(150, 1)]
            vals.append(np.median(resid))
        meds[n] = float(np.mean(vals))
    ns = np.array(sorted(meds))
    ys = np.array([meds[n] for n in ns])
    slope = -float(np.polyfit(np.log(ns), np.log(ys), 1)[0])
    detail = ("median residuals " +
              ", ".join(f"n={n}: {meds[n]:.2e}" for n in ns) +
              f"; fitted n-exponent = {slope:.3f} (band [1.2, 1.9])")
    report(8, 1.2 <= slope <= 1.9, detail)
    assert 1.2 <= slope <= 1.9, detail


# --------------------------------------------------------------------------
# criterion 9: byte-identical reruns across worker-thread counts
# --------------------------------------------------------------------------

@pytest.mark.slow
def test_criterion_9_thread_count_determinism(tmp_path):
    specs = [
        ("stability", lambda thr: run_stability_experiment(2, 9009, threads=thr)),
        ("corr_grouped", lambda thr: run_correlation_experiment(
            2, "grouped_head", 9009, threads=thr)),
        ("corr_randomized", lambda thr: run_correlation_experiment(
            2, "randomized", 9009, threads=thr)),
        ("section53", lambda thr: run_section53_study(1, 9009, threads=thr)),
    ]
    compared = 0
    for name, runner in specs:
        d1 = tmp_path / f"{name}_t1"
        d8 = tmp_path / f"{name}_t8"
        paths1 = runner(1).write(d1)
        paths8 = runner(8).write(d8)
        assert [p.split("/")[-1] for p in paths1] == [p.split("/")[-1] for p in paths8]
        for p1, p8 in zip(paths1, paths8):
            with open(p1, "rb") as f1, open(p8, "rb") as f8:
                assert f1.read() == f8.read(), f"{name}: {p1} differs from {p8}"
            compared += 1
    report(9, True, f"{compared} report files byte-identical at 1 vs 8 threads")
