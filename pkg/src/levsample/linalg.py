"""Dense decompositions, rank-aware least-squares solvers, and exact leverage scores.

All solvers route through the SVD so that rank-deficient problems return the
minimum-norm solution via the Moore-Penrose pseudoinverse.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "ThinSVD",
    "OLSFit",
    "WLSFit",
    "RegressionProblem",
    "thin_svd",
    "numerical_rank",
    "rank_tolerance",
    "solve_ols",
    "solve_wls",
    "leverage_scores_exact",
]


def as_design_matrix(X) -> np.ndarray:
    """Validate and return a dense n x p float matrix."""
    X = np.asarray(X, dtype=float)
    if X.ndim != 2:
        raise ValueError(f"expected a 2-d matrix, got ndim={X.ndim}")
    n, p = X.shape
    if n < 1 or p < 1:
        raise ValueError(f"matrix must be at least 1x1, got {n}x{p}")
    if not np.all(np.isfinite(X)):
        raise ValueError("matrix contains non-finite entries")
    return X


def as_vector(v, n: int, name: str = "vector") -> np.ndarray:
    v = np.asarray(v, dtype=float).reshape(-1)
    if v.shape[0] != n:
        raise ValueError(f"{name} has length {v.shape[0]}, expected {n}")
    if not np.all(np.isfinite(v)):
        raise ValueError(f"{name} contains non-finite entries")
    return v


@dataclass(frozen=True)
class ThinSVD:
    """Thin SVD X = U diag(s) V^T with U n x p, V p x p."""

    U: np.ndarray
    singular_values: np.ndarray
    V: np.ndarray


@dataclass(frozen=True)
class OLSFit:
    beta_hat: np.ndarray
    residuals: np.ndarray
    leverage: np.ndarray | None
    numerical_rank: int


@dataclass(frozen=True)
class WLSFit:
    beta_hat_wls: np.ndarray
    residuals_w: np.ndarray
    weights: np.ndarray
    numerical_rank: int


@dataclass(frozen=True)
class RegressionProblem:
    """A least-squares problem (X, y), optionally with ground truth for
    unconditional (fresh-noise) studies."""

    X: np.ndarray
    y: np.ndarray
    beta0: np.ndarray | None = None
    sigma2: float | None = None

    def __post_init__(self):
        X = as_design_matrix(self.X)
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "y", as_vector(self.y, X.shape[0], "y"))
        if self.beta0 is not None:
            object.__setattr__(
                self, "beta0", as_vector(self.beta0, X.shape[1], "beta0")
            )

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def p(self) -> int:
        return self.X.shape[1]


def thin_svd(X) -> ThinSVD:
    """Thin SVD of an n x p matrix with n >= p."""
    X = as_design_matrix(X)
    n, p = X.shape
    if n < p:
        raise ValueError(f"thin_svd requires n >= p, got {n}x{p}")
    U, s, Vt = np.linalg.svd(X, full_matrices=False)
    return ThinSVD(U=U, singular_values=s, V=Vt.T)


def rank_tolerance(singular_values: np.ndarray, n: int, p: int) -> float:
    """Singular-value cutoff max(n, p) * eps * sigma_max."""
    smax = singular_values[0] if singular_values.size else 0.0
    return max(n, p) * np.finfo(float).eps * smax


def numerical_rank(svd: ThinSVD, n: int) -> int:
    """Number of singular values above the standard rank tolerance."""
    s = svd.singular_values
    if s.size == 0 or s[0] == 0.0:
        return 0
    tol = rank_tolerance(s, n, s.size)
    return int(np.count_nonzero(s > tol))


def _svd_solve(svd: ThinSVD, n: int, y: np.ndarray) -> tuple[np.ndarray, int]:
    """Minimum-norm least-squares solution from a precomputed thin SVD."""
    k = numerical_rank(svd, n)
    if k == 0:
        return np.zeros(svd.V.shape[0]), 0
    U, s, V = svd.U, svd.singular_values, svd.V
    coef = (U[:, :k].T @ y) / s[:k]
    return V[:, :k] @ coef, k


def solve_ols(X, y, compute_leverage: bool = False) -> OLSFit:
    """Ordinary least squares via SVD; minimum-norm under rank deficiency."""
    X = as_design_matrix(X)
    n, p = X.shape
    y = as_vector(y, n, "y")
    svd = thin_svd(X) if n >= p else None
    if svd is None:
        # wide systems only arise in subproblems; fall back to lstsq
        beta, _, rank, _ = np.linalg.lstsq(X, y, rcond=None)
        return OLSFit(beta, y - X @ beta, None, int(rank))
    beta, k = _svd_solve(svd, n, y)
    leverage = None
    if compute_leverage:
        leverage = np.sum(svd.U[:, :k] ** 2, axis=1)
    return OLSFit(beta, y - X @ beta, leverage, k)


def solve_wls(X, y, weights) -> WLSFit:
    """Weighted least squares: minimize sum_i w_i (y_i - x_i^T beta)^2."""
    X = as_design_matrix(X)
    n, p = X.shape
    y = as_vector(y, n, "y")
    w = as_vector(weights, n, "weights")
    if np.any(w < 0):
        raise ValueError("weights must be nonnegative")
    if not np.any(w > 0):
        raise ValueError("weights are all zero")
    sw = np.sqrt(w)
    Xw = X * sw[:, None]
    yw = y * sw
    if n >= p:
        svd = thin_svd(Xw)
        beta, k = _svd_solve(svd, n, yw)
    else:
        beta, _, k, _ = np.linalg.lstsq(Xw, yw, rcond=None)
        k = int(k)
    return WLSFit(beta, y - X @ beta, w, k)


def leverage_scores_exact(X) -> np.ndarray:
    """Exact statistical leverage scores h_ii (hat-matrix diagonal).

    Computed as squared row norms of the leading numerical-rank columns of U,
    so the scores sum to the numerical rank.
    """
    X = as_design_matrix(X)
    n, p = X.shape
    if n < p:
        raise ValueError(f"leverage scores require n >= p, got {n}x{p}")
    svd = thin_svd(X)
    k = numerical_rank(svd, n)
    return np.sum(svd.U[:, :k] ** 2, axis=1)
