"""Monte Carlo bias/variance/MSE estimation and the closed-form leading-order
variance formulas for the weighted and unweighted subsampling estimators.

The analytic expressions drop the Taylor remainder terms; the gap between
empirical and analytic variance is the diagnostic for how well the linear
approximation holds at a given subsample size.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .linalg import (
    OLSFit,
    RegressionProblem,
    as_design_matrix,
    leverage_scores_exact,
    solve_ols,
    solve_wls,
)
from .sampling import (
    SamplingDistribution,
    draw_subsample,
    unweighted_estimate,
    weighted_estimate,
)

__all__ = [
    "BiasVarianceReport",
    "mse_decomposition",
    "run_conditional",
    "run_unconditional",
    "analytic_conditional_variance",
    "analytic_unconditional_variance",
    "analytic_levunw_variances",
]

DEFAULT_REPS = 1000


@dataclass(frozen=True)
class BiasVarianceReport:
    scheme: str
    alpha: float | None
    r: int
    mode: str  # "conditional" | "unconditional"
    weighted: bool
    reps: int
    bias_sq: float
    variance_trace: float
    mse: float
    analytic_variance_trace: float | None
    rank_deficient_count: int
    bias_sq_wls: float | None = None
    mean_estimate: np.ndarray = field(default=None, repr=False)
    coordinate_variance: np.ndarray = field(default=None, repr=False)


def mse_decomposition(estimates, reference, X=None):
    """Empirical (bias_sq, variance_trace, mse, prediction_mse).

    bias_sq = ||mean - reference||^2; variance_trace is the trace of the
    population covariance (divisor = number of estimates); mse is their sum.
    prediction_mse averages (1/n)||X(reference - estimate)||^2 when X is given.
    """
    B = np.asarray(estimates, dtype=float)
    if B.ndim != 2 or B.shape[0] < 1:
        raise ValueError("estimates must be a nonempty list of vectors")
    ref = np.asarray(reference, dtype=float).reshape(-1)
    mean = B.mean(axis=0)
    bias_sq = float(np.sum((mean - ref) ** 2))
    dev = B - mean
    variance_trace = float(np.mean(np.sum(dev**2, axis=1)))
    mse = bias_sq + variance_trace
    prediction_mse = None
    if X is not None:
        X = as_design_matrix(X)
        resid = (B - ref) @ X.T
        prediction_mse = float(np.mean(np.sum(resid**2, axis=1)) / X.shape[0])
    return bias_sq, variance_trace, mse, prediction_mse


def _seed_sequence(seed) -> np.random.SeedSequence:
    if isinstance(seed, np.random.SeedSequence):
        return seed
    return np.random.SeedSequence(seed)


def _collect(problem, dist, r, weighted, reps, children, fresh_noise=False):
    estimate = weighted_estimate if weighted else unweighted_estimate
    betas = np.empty((reps, problem.p))
    rank_deficient = 0
    for i, child in enumerate(children):
        rng = np.random.default_rng(child)
        if fresh_noise:
            eps = rng.normal(0.0, np.sqrt(problem.sigma2), problem.n)
            prob_i = RegressionProblem(
                problem.X, problem.X @ problem.beta0 + eps, problem.beta0, problem.sigma2
            )
        else:
            prob_i = problem
        sub = draw_subsample(dist, r, rng)
        est = estimate(prob_i, sub, scheme=dist.scheme)
        betas[i] = est.beta_tilde
        rank_deficient += est.rank_deficient
    return betas, rank_deficient


def run_conditional(
    problem: RegressionProblem,
    dist: SamplingDistribution,
    r: int,
    weighted: bool = True,
    reps: int = DEFAULT_REPS,
    seed=0,
) -> BiasVarianceReport:
    """Monte Carlo bias/variance with (X, y) fixed, over the sampling randomness.

    Bias is measured against the full-sample OLS estimate; for the unweighted
    estimator the bias against the full-sample WLS estimate (weights r*pi) is
    reported as well, since that is where LEVUNW is conditionally centered.
    """
    if reps < 2:
        raise ValueError("reps must be >= 2")
    fit = solve_ols(problem.X, problem.y)
    children = _seed_sequence(seed).spawn(reps)
    betas, bad = _collect(problem, dist, r, weighted, reps, children)
    bias_sq, var_tr, mse, _ = mse_decomposition(betas, fit.beta_hat)
    bias_sq_wls = None
    analytic = None
    if weighted:
        if fit.numerical_rank == problem.p:
            V = analytic_conditional_variance(fit, problem.X, dist, r)
            analytic = float(np.trace(V))
    else:
        try:
            wfit = solve_wls(problem.X, problem.y, r * dist.probs)
            mean = betas.mean(axis=0)
            bias_sq_wls = float(np.sum((mean - wfit.beta_hat_wls) ** 2))
            if wfit.numerical_rank == problem.p:
                Vc, _ = analytic_levunw_variances(problem, dist.probs * problem.p, r)
                analytic = float(np.trace(Vc))
        except ValueError:
            pass
    return BiasVarianceReport(
        scheme=dist.scheme,
        alpha=dist.alpha,
        r=r,
        mode="conditional",
        weighted=weighted,
        reps=reps,
        bias_sq=bias_sq,
        variance_trace=var_tr,
        mse=mse,
        analytic_variance_trace=analytic,
        rank_deficient_count=bad,
        bias_sq_wls=bias_sq_wls,
        mean_estimate=betas.mean(axis=0),
        coordinate_variance=betas.var(axis=0),
    )


def run_unconditional(
    problem: RegressionProblem,
    dist: SamplingDistribution,
    r: int,
    weighted: bool = True,
    reps: int = DEFAULT_REPS,
    seed=0,
) -> BiasVarianceReport:
    """Monte Carlo bias/variance with X fixed and fresh noise per replicate.

    Each replicate draws eps ~ N(0, sigma2 I), forms y = X beta0 + eps, draws
    one subsample, and estimates.  Bias is against beta0.
    """
    if problem.beta0 is None or problem.sigma2 is None:
        raise ValueError("unconditional study requires beta0 and sigma2")
    if reps < 2:
        raise ValueError("reps must be >= 2")
    children = _seed_sequence(seed).spawn(reps)
    betas, bad = _collect(problem, dist, r, weighted, reps, children, fresh_noise=True)
    bias_sq, var_tr, mse, _ = mse_decomposition(betas, problem.beta0)
    analytic = None
    h = leverage_scores_exact(problem.X)
    if int(round(h.sum())) == problem.p:
        try:
            if weighted:
                V = analytic_unconditional_variance(
                    problem.X, h, dist, r, problem.sigma2
                )
            else:
                _, V = analytic_levunw_variances(
                    problem, dist.probs * problem.p, r, sigma2=problem.sigma2
                )
            analytic = float(np.trace(V))
        except ValueError:
            pass
    return BiasVarianceReport(
        scheme=dist.scheme,
        alpha=dist.alpha,
        r=r,
        mode="unconditional",
        weighted=weighted,
        reps=reps,
        bias_sq=bias_sq,
        variance_trace=var_tr,
        mse=mse,
        analytic_variance_trace=analytic,
        rank_deficient_count=bad,
        mean_estimate=betas.mean(axis=0),
        coordinate_variance=betas.var(axis=0),
    )


def _gram_inverse(X: np.ndarray) -> np.ndarray:
    G = X.T @ X
    return np.linalg.inv(G)


def analytic_conditional_variance(
    fit: OLSFit, X, dist: SamplingDistribution, r: int
) -> np.ndarray:
    """Leading-order conditional variance of the weighted estimator:
    (X'X)^-1 X' Diag(e^2 / (r pi)) X (X'X)^-1.

    Rows with zero probability but nonzero residual contribute +inf.
    """
    X = as_design_matrix(X)
    e2 = fit.residuals**2
    pi = dist.probs
    mid = np.where(
        pi > 0, e2 / (r * np.where(pi > 0, pi, 1.0)), np.where(e2 > 0, np.inf, 0.0)
    )
    Ginv = _gram_inverse(X)
    A = Ginv @ X.T
    if np.isinf(mid).any():
        return np.full((X.shape[1], X.shape[1]), np.inf)
    return A @ (mid[:, None] * A.T)


def analytic_unconditional_variance(
    X, h, dist: SamplingDistribution, r: int, sigma2: float
) -> np.ndarray:
    """Leading-order unconditional variance of the weighted estimator:
    sigma2 (X'X)^-1 + (sigma2/r) (X'X)^-1 X' Diag((1-h)^2 / pi) X (X'X)^-1."""
    X = as_design_matrix(X)
    h = np.asarray(h, dtype=float)
    pi = dist.probs
    w = (1.0 - h) ** 2
    mid = np.where(pi > 0, w / np.where(pi > 0, pi, 1.0), np.where(w > 0, np.inf, 0.0))
    Ginv = _gram_inverse(X)
    A = Ginv @ X.T
    if np.isinf(mid).any():
        return np.full((X.shape[1], X.shape[1]), np.inf)
    return sigma2 * Ginv + (sigma2 / r) * (A @ (mid[:, None] * A.T))


def analytic_levunw_variances(
    problem: RegressionProblem, h, r: int, sigma2: float | None = None
):
    """Leading-order (conditional, unconditional) variances of LEVUNW.

    W0 = Diag(r h / p); conditional variance is
    (X'W0X)^-1 X' Diag(e_w) W0 Diag(e_w) X (X'W0X)^-1 and the unconditional
    variance is the two-term expression built from P = X (X'W0X)^-1 X' W0.
    The unconditional part needs sigma2 (taken from the problem by default).
    """
    X = problem.X
    n, p = X.shape
    h = np.asarray(h, dtype=float)
    w0 = r * h / p
    G = X.T @ (w0[:, None] * X)
    if np.linalg.matrix_rank(G) < p:
        raise ValueError("X' W0 X is singular")
    Ginv = np.linalg.inv(G)
    A = Ginv @ X.T

    wfit = solve_wls(X, problem.y, w0)
    ew = wfit.residuals_w
    cond = A @ ((ew**2 * w0)[:, None] * A.T)

    if sigma2 is None:
        sigma2 = problem.sigma2
    uncond = None
    if sigma2 is not None:
        term1 = sigma2 * (A @ (w0[:, None] ** 2 * A.T))
        P = X @ (A * w0[None, :])
        d = 1.0 - np.diag(P)
        term2 = sigma2 * (A @ ((d**2 * w0)[:, None] * A.T))
        uncond = term1 + term2
    return cond, uncond
