"""Reproducible synthetic designs: the GA / T-family matrices, the closed-form
toy designs, the replicated-row worst case, and leverage summary statistics."""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from scipy.linalg import hadamard

from .linalg import leverage_scores_exact

__all__ = [
    "DesignSpec",
    "LeverageSummary",
    "gen_design",
    "replicated_row_design",
    "default_beta",
    "gen_response",
    "leverage_summary",
    "covariance_matrix",
]

log = logging.getLogger(__name__)

TOY_FAMILIES = (
    "sample-mean",      # all-ones column, uniform leverage
    "pm-one",           # alternating +/-1 column
    "inflated-line",    # X_i = i, leverage grows as i^2
    "in-fill-line",     # X_i = 1/i, leverage decays as 1/i^2
    "regression-surface",  # paired sqrt(n/3^j) rows, p = 2
    "truncated-hadamard",  # orthogonal design, uniform leverage p/n
    "truncated-identity",  # leverage exactly 1 or 0
    "worst-case",       # one odd row, n-1 identical rows
)

FAMILIES = ("GA", "T", "T1", "T2", "T3", "replicated-row") + TOY_FAMILIES

DEFAULT_SIGMA2 = 9.0


@dataclass(frozen=True)
class DesignSpec:
    family: str
    n: int
    p: int
    seed: int = 0
    df: int | None = None  # degrees of freedom for the T family
    keep: int | None = None  # replicated-row: number of high-leverage rows kept

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown design family {self.family!r}")
        if self.n < self.p:
            raise ValueError(f"need n >= p, got {self.n}x{self.p}")


@dataclass(frozen=True)
class LeverageSummary:
    """Summary statistics of the normalized leverage probabilities h/p."""

    min: float
    median: float
    max: float
    mean: float
    std_dev: float
    max_over_min: float
    max_over_mean: float
    max_over_median: float


def covariance_matrix(p: int) -> np.ndarray:
    """AR(1)-style covariance Sigma_ij = 2 * 0.5^|i-j|."""
    idx = np.arange(p)
    return 2.0 * 0.5 ** np.abs(idx[:, None] - idx[None, :])


def _rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def _gaussian_rows(rng, n: int, p: int) -> np.ndarray:
    L = np.linalg.cholesky(covariance_matrix(p))
    return rng.standard_normal((n, p)) @ L.T


def _t_rows(rng, n: int, p: int, df: int) -> np.ndarray:
    # multivariate t: Z / sqrt(chi2_df / df) per row, mean zero
    Z = _gaussian_rows(rng, n, p)
    scale = np.sqrt(rng.chisquare(df, size=n) / df)
    return Z / scale[:, None]


def gen_design(spec: DesignSpec) -> np.ndarray:
    """Generate the design matrix for a DesignSpec."""
    n, p = spec.n, spec.p
    rng = _rng(spec.seed)
    fam = spec.family
    if fam == "GA":
        return 1.0 + _gaussian_rows(rng, n, p)
    if fam in ("T", "T1", "T2", "T3"):
        df = spec.df if fam == "T" else int(fam[1])
        if df is None or df < 1:
            raise ValueError("T family needs df >= 1")
        return _t_rows(rng, n, p, df)
    if fam == "replicated-row":
        keep = spec.keep if spec.keep is not None else 50
        df = spec.df if spec.df is not None else 3
        return replicated_row_design(n, p, keep, df, spec.seed)
    if fam == "sample-mean":
        _require_p(fam, p, 1)
        return np.ones((n, 1))
    if fam == "pm-one":
        _require_p(fam, p, 1)
        col = np.where(np.arange(n) % 2 == 0, 1.0, -1.0)
        return col.reshape(-1, 1)
    if fam == "inflated-line":
        _require_p(fam, p, 1)
        return np.arange(1, n + 1, dtype=float).reshape(-1, 1)
    if fam == "in-fill-line":
        _require_p(fam, p, 1)
        return (1.0 / np.arange(1, n + 1)).reshape(-1, 1)
    if fam == "regression-surface":
        _require_p(fam, p, 2)
        if n % 2 != 0:
            raise ValueError("regression-surface needs even n")
        k = n // 2
        X = np.zeros((n, 2))
        vals = np.sqrt(n / 3.0 ** np.arange(1, k + 1))
        X[0::2, 0] = vals
        X[1::2, 1] = vals
        return X
    if fam == "truncated-hadamard":
        if n & (n - 1) != 0:
            raise ValueError("truncated-hadamard needs n a power of 2")
        return hadamard(n).astype(float)[:, :p]
    if fam == "truncated-identity":
        return np.eye(n)[:, :p]
    if fam == "worst-case":
        u = rng.standard_normal(p)
        w = rng.standard_normal(p)
        X = np.tile(u, (n, 1))
        X[0] = w
        return X
    raise AssertionError(f"unhandled family {fam!r}")


def _require_p(fam: str, p: int, expected: int) -> None:
    if p != expected:
        raise ValueError(f"{fam} requires p = {expected}, got {p}")


def replicated_row_design(n: int, p: int, keep: int, df: int, seed) -> np.ndarray:
    """Rank-loss worst case: keep the highest-leverage rows of a T(df) draw
    and fill the rest with copies of its minimum-leverage row."""
    if keep > n:
        raise ValueError(f"keep ({keep}) exceeds n ({n})")
    rng = _rng(seed)
    base = _t_rows(rng, n, p, df)
    if keep == n:
        return base
    h = leverage_scores_exact(base)
    order = np.argsort(h)
    top = base[order[-keep:][::-1]]
    worst = base[order[0]]
    return np.vstack([top, np.tile(worst, (n - keep, 1))])


def default_beta(p: int) -> np.ndarray:
    """Coefficient pattern (1 x10, 0.1 x(p-20), 1 x10); all-ones when p < 20."""
    if p < 20:
        log.info("default_beta: p=%d < 20, falling back to all-ones", p)
        return np.ones(p)
    return np.concatenate([np.ones(10), 0.1 * np.ones(p - 20), np.ones(10)])


def gen_response(X, beta0, sigma2: float, seed) -> np.ndarray:
    """y = X beta0 + N(0, sigma2 I) noise; sigma2 = 0 is the noise-free mode."""
    if sigma2 < 0:
        raise ValueError(f"sigma2 must be >= 0, got {sigma2}")
    X = np.asarray(X, dtype=float)
    beta0 = np.asarray(beta0, dtype=float)
    rng = _rng(seed)
    eps = rng.normal(0.0, np.sqrt(sigma2), X.shape[0]) if sigma2 > 0 else 0.0
    return X @ beta0 + eps


def leverage_summary(h, p: int) -> LeverageSummary:
    """Table-style summary statistics of the leverage probabilities h/p."""
    probs = np.asarray(h, dtype=float) / p
    mn = float(probs.min())
    mx = float(probs.max())
    med = float(np.median(probs))
    mean = float(probs.mean())
    std = float(probs.std(ddof=1)) if probs.size > 1 else 0.0
    with np.errstate(divide="ignore"):
        return LeverageSummary(
            min=mn,
            median=med,
            max=mx,
            mean=mean,
            std_dev=std,
            max_over_min=mx / mn if mn > 0 else float("inf"),
            max_over_mean=mx / mean if mean > 0 else float("inf"),
            max_over_median=mx / med if med > 0 else float("inf"),
        )
