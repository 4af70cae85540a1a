"""End-to-end acceptance checks for the library.

Each test prints a single CRITERION line on success (run with -s to see them).
Closed-form criteria use exact tolerances; Monte Carlo criteria use frozen
seeds and pre-calibrated bands.
"""

import json

import numpy as np

from levsample import (
    ApproxLeverageConfig,
    DesignSpec,
    RegressionProblem,
    approx_leverage,
    build_distribution,
    cli,
    compare_to_exact,
    default_beta,
    gen_design,
    gen_response,
    leverage_scores_exact,
    rank_loss_trial,
    replicated_row_design,
    run_conditional,
    run_unconditional,
    solve_ols,
    solve_wls,
)


def test_criterion_01_leverage_exactness():
    rng = np.random.default_rng(0)
    shapes = [(rng.integers(50, 2001), rng.integers(2, 101)) for _ in range(20)]
    for n, p in shapes:
        p = min(n, p)
        X = rng.standard_normal((n, p))
        h = leverage_scores_exact(X)
        assert abs(h.sum() - p) < 1e-8
        T = rng.standard_normal((p, p)) + 4 * np.eye(p)
        assert np.abs(h - leverage_scores_exact(X @ T)).max() < 1e-8
    print("CRITERION 1: PASS leverage sums to p and is column-space invariant "
          "within 1e-8 on 20 random designs")


def test_criterion_02_closed_form_toy_designs():
    for n in (10, 100, 1000):
        X = gen_design(DesignSpec("inflated-line", n, 1))
        i = np.arange(1, n + 1)
        denom = n * (n + 1) * (2 * n + 1) / 6
        assert abs(float((X.T @ X)[0, 0]) - denom) < 1e-10 * denom
        assert np.abs(leverage_scores_exact(X) - i**2 / denom).max() < 1e-10
    n, p = 256, 16
    H = gen_design(DesignSpec("truncated-hadamard", n, p))
    assert np.abs(leverage_scores_exact(H) - p / n).max() < 1e-12
    E = gen_design(DesignSpec("truncated-identity", 7, 3))
    assert np.allclose(leverage_scores_exact(E), [1, 1, 1, 0, 0, 0, 0])
    print("CRITERION 2: PASS closed-form leverage for the line, Hadamard, "
          "and identity toy designs")


def test_criterion_03_alternating_design_variance_law():
    n, r, sigma2 = 10, 5, 1.0
    X = gen_design(DesignSpec("pm-one", n, 1))
    beta0 = np.array([1.0])
    y = gen_response(X, beta0, sigma2, 0)
    prob = RegressionProblem(X, y, beta0=beta0, sigma2=sigma2)
    expected = sigma2 * (1 / n + (1 - 1 / n) ** 2 / r)
    h = leverage_scores_exact(X)
    for dist in (
        build_distribution("UNIF", n=n),
        build_distribution("LEV", scores=h),
    ):
        rep = run_unconditional(prob, dist, r=r, reps=10**4, seed=11)
        assert abs(rep.variance_trace - expected) < 0.10 * expected, dist.scheme
        assert abs(rep.analytic_variance_trace - expected) < 1e-10
    print(f"CRITERION 3: PASS alternating-design variance within 10% of "
          f"{expected:.3f} for UNIF and LEV")


def test_criterion_04_analytic_matches_empirical_conditional():
    X = gen_design(DesignSpec("GA", 500, 10, seed=9))
    y = gen_response(X, np.ones(10), 9.0, 2)
    prob = RegressionProblem(X, y)
    h = leverage_scores_exact(X)
    for dist in (
        build_distribution("LEV", scores=h),
        build_distribution("UNIF", n=500),
    ):
        rep = run_conditional(prob, dist, r=100, reps=5000, seed=23)
        ratio = rep.analytic_variance_trace / rep.variance_trace
        assert abs(ratio - 1) < 0.20, (dist.scheme, ratio)
    print("CRITERION 4: PASS analytic conditional variance trace within 20% "
          "of the 5000-rep empirical trace for LEV and UNIF")


def test_criterion_05_variance_scales_inversely_with_r():
    X = gen_design(DesignSpec("GA", 1000, 10, seed=3))
    beta0 = np.ones(10)
    y = gen_response(X, beta0, 9.0, 0)
    prob = RegressionProblem(X, y, beta0=beta0, sigma2=9.0)
    d = build_distribution("LEV", scores=leverage_scores_exact(X))
    v100 = run_unconditional(prob, d, r=100, reps=2000, seed=5).variance_trace
    v200 = run_unconditional(prob, d, r=200, reps=2000, seed=5).variance_trace
    ratio = v200 / v100
    assert 0.4 <= ratio <= 0.8, ratio
    print(f"CRITERION 5: PASS doubling r cuts LEV variance by factor "
          f"{ratio:.2f} (in [0.4, 0.8])")


def heavy_tail_problem():
    X = gen_design(DesignSpec("T1", 1000, 50, seed=7))
    beta0 = default_beta(50)
    y = gen_response(X, beta0, 9.0, 1)
    return RegressionProblem(X, y, beta0=beta0, sigma2=9.0)


def test_criterion_06_scheme_ordering_on_heavy_tails():
    prob = heavy_tail_problem()
    h = leverage_scores_exact(prob.X)
    dists = {
        "UNIF": build_distribution("UNIF", n=1000),
        "LEV": build_distribution("LEV", scores=h),
        "SLEV09": build_distribution("SLEV", scores=h, alpha=0.9),
        "SLEV01": build_distribution("SLEV", scores=h, alpha=0.1),
    }
    var = {
        name: run_unconditional(prob, d, r=250, reps=2000, seed=13).variance_trace
        for name, d in dists.items()
    }
    assert var["LEV"] < var["UNIF"], var
    assert var["SLEV09"] <= 1.1 * min(var["LEV"], var["UNIF"]), var
    assert var["SLEV01"] > var["SLEV09"], var
    print("CRITERION 6: PASS variance ordering LEV < UNIF, mixed(0.9) "
          "competitive, mixed(0.1) worse than mixed(0.9)")


def test_criterion_07_unweighted_estimator_centers_at_wls():
    prob = heavy_tail_problem()
    h = leverage_scores_exact(prob.X)
    lev = build_distribution("LEV", scores=h)
    ols = solve_ols(prob.X, prob.y).beta_hat
    wls = solve_wls(prob.X, prob.y, lev.probs).beta_hat_wls

    def distances(dist, weighted):
        rep = run_conditional(prob, dist, r=250, weighted=weighted,
                              reps=2000, seed=17)
        m = rep.mean_estimate
        return np.linalg.norm(m - ols), np.linalg.norm(m - wls)

    d_ols, d_wls = distances(lev, weighted=False)
    assert d_wls < d_ols, (d_wls, d_ols)
    for dist in (
        build_distribution("UNIF", n=1000),
        lev,
        build_distribution("SLEV", scores=h, alpha=0.9),
    ):
        d_ols, d_wls = distances(dist, weighted=True)
        assert d_ols < d_wls, (dist.scheme, d_ols, d_wls)
    print("CRITERION 7: PASS unweighted leverage sampling centers at the "
          "leverage-weighted WLS fit; weighted schemes center at OLS")


def test_criterion_08_rank_loss_study():
    X = replicated_row_design(1000, 10, 50, 3, seed=21)
    prob = RegressionProblem(X, np.zeros(1000))
    h = leverage_scores_exact(X)
    unif = build_distribution("UNIF", n=1000)
    lev = build_distribution("LEV", scores=h)
    f_unif = rank_loss_trial(prob, unif, r=15, trials=500, seed=1).fraction_singular
    f_lev = rank_loss_trial(prob, lev, r=15, trials=500, seed=2).fraction_singular
    f_lev30 = rank_loss_trial(prob, lev, r=30, trials=500, seed=3).fraction_singular
    assert f_unif > 0.9, f_unif
    assert f_lev < f_unif, (f_lev, f_unif)
    assert f_lev30 < 0.05, f_lev30
    print(f"CRITERION 8: PASS singular fractions UNIF r=p+5: {f_unif:.3f}, "
          f"LEV r=p+5: {f_lev:.3f}, LEV r=3p: {f_lev30:.3f}")


def test_criterion_09_fast_leverage_quality():
    n, p = 2000, 100
    X = gen_design(DesignSpec("T3", n, p, seed=31))
    medians = []
    for kappa in (1, 5, 10):
        r2 = int(np.ceil(kappa * np.log(n)))
        corrs = [
            compare_to_exact(
                X, approx_leverage(X, ApproxLeverageConfig(r1=2 * p, r2=r2, seed=s))
            )[0]
            for s in range(10)
        ]
        medians.append(float(np.median(corrs)))
    assert medians[0] <= medians[1] <= medians[2], medians
    assert medians[2] > 0.8, medians
    print(f"CRITERION 9: PASS median approximation correlations "
          f"{[round(m, 3) for m in medians]} nondecreasing, final > 0.8")


def test_criterion_10_approximate_scores_substitute_for_exact():
    n, p = 2000, 100
    X = gen_design(DesignSpec("T3", n, p, seed=31))
    beta0 = default_beta(p)
    y = gen_response(X, beta0, 9.0, 3)
    prob = RegressionProblem(X, y, beta0=beta0, sigma2=9.0)
    h = leverage_scores_exact(X)
    cfg = ApproxLeverageConfig(r1=2 * p, r2=int(np.ceil(10 * np.log(n))), seed=5)
    a = approx_leverage(X, cfg).scores
    for scheme, alpha in (("LEV", None), ("SLEV", 0.9)):
        exact = build_distribution(scheme, scores=h, alpha=alpha)
        approx = build_distribution(scheme, scores=a, alpha=alpha, source="bfast")
        v_exact = run_conditional(prob, exact, r=500, reps=1000, seed=41).variance_trace
        v_approx = run_conditional(prob, approx, r=500, reps=1000, seed=43).variance_trace
        rel = abs(v_approx - v_exact) / v_exact
        assert rel < 0.15, (scheme, rel)
    print("CRITERION 10: PASS sketched-score variance traces within 15% of "
          "exact-score values for LEV and SLEV(0.9)")


def test_criterion_11_single_thread_determinism(tmp_path):
    cfg = {
        "design": {"family": "GA", "n": 300, "p": 5, "seed": 2},
        "sigma2": 9.0,
        "beta0": "default",
        "schemes": [{"scheme": "UNIF"}, {"scheme": "LEV"},
                    {"scheme": "SLEV", "alpha": 0.9}],
        "r_grid": [15, 25],
        "mode": "conditional",
        "reps": 100,
        "master_seed": 3,
    }
    cfg_path = tmp_path / "config.json"
    cfg_path.write_text(json.dumps(cfg))
    outs = []
    for name in ("a", "b"):
        out = tmp_path / name
        code = cli.main(["experiment", "--config", str(cfg_path),
                         "--out", str(out), "--threads", "1"])
        assert code == 0
        outs.append((out / "reports.csv").read_bytes())
    assert outs[0] == outs[1]
    print("CRITERION 11: PASS repeated single-thread experiment runs produce "
          "bit-identical reports.csv")
