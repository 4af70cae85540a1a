"""Two-projection randomized approximation of leverage scores.

Sketch the column space with an r1 x n projection, orthogonalize against the
R factor of the sketch, then estimate row norms through a p x r2 projection.
BFast uses +/-1 entries, GFast Gaussian entries.  Approximate scores are
renormalized to sum to p so they are directly usable as sampling weights.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_triangular

from .linalg import as_design_matrix, leverage_scores_exact, rank_tolerance

__all__ = [
    "ApproxLeverageConfig",
    "ApproxLeverageScores",
    "SketchRankError",
    "approx_leverage",
    "leverage_from_projections",
    "compare_to_exact",
    "timing_benchmark",
]

KINDS = ("binary", "gaussian")
MAX_RETRIES = 3


class SketchRankError(RuntimeError):
    """The sketched matrix Pi1 @ X stayed rank-deficient after reseeded retries."""


@dataclass(frozen=True)
class ApproxLeverageConfig:
    r1: int
    r2: int
    kind: str = "binary"
    seed: int = 0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}, got {self.kind!r}")
        if self.r2 < 1:
            raise ValueError(f"r2 must be >= 1, got {self.r2}")


@dataclass(frozen=True)
class ApproxLeverageScores:
    scores: np.ndarray
    config: ApproxLeverageConfig
    normalized_sum: float


def _projection(rng: np.random.Generator, shape: tuple[int, int], kind: str) -> np.ndarray:
    if kind == "binary":
        return rng.integers(0, 2, size=shape).astype(float) * 2.0 - 1.0
    return rng.standard_normal(shape)


def leverage_from_projections(X, Pi1, Pi2) -> np.ndarray:
    """Raw approximate scores for explicit projections (renormalized to sum p).

    With Pi1 square orthogonal and Pi2 = I_p this recovers the exact scores,
    since X R^{-1} is then an orthonormal basis of the column space.
    """
    X = as_design_matrix(X)
    n, p = X.shape
    r2 = Pi2.shape[1]
    M = Pi1 @ X
    R = np.linalg.qr(M, mode="r")
    diag = np.abs(np.diag(R))
    tol = max(M.shape) * np.finfo(float).eps
    if diag.size < p or diag.max() == 0 or diag.min() <= tol * diag.max():
        raise SketchRankError("Pi1 @ X is numerically rank-deficient")
    # X @ R^{-1} via triangular solve of R^T Y^T = X^T
    Y = solve_triangular(R, X.T, trans="T", lower=False).T
    B = Y @ Pi2
    scores = np.sum(B**2, axis=1) / r2
    total = scores.sum()
    if total <= 0:
        raise SketchRankError("approximate scores collapsed to zero")
    return scores * (p / total)


def approx_leverage(X, cfg: ApproxLeverageConfig) -> ApproxLeverageScores:
    """Approximate all leverage scores of X using the cfg projections.

    Retries with a fresh seed up to 3 times if the sketch loses rank, then
    raises SketchRankError so the caller can fall back to exact scores.
    """
    X = as_design_matrix(X)
    n, p = X.shape
    if cfg.r1 < p:
        raise ValueError(f"r1 must be >= p ({p}), got {cfg.r1}")
    last_err: Exception | None = None
    for attempt in range(MAX_RETRIES):
        rng = np.random.default_rng(
            np.random.SeedSequence(cfg.seed, spawn_key=(attempt,))
        )
        Pi1 = _projection(rng, (cfg.r1, n), cfg.kind) / np.sqrt(cfg.r1)
        Pi2 = _projection(rng, (p, cfg.r2), cfg.kind)
        try:
            scores = leverage_from_projections(X, Pi1, Pi2)
        except SketchRankError as err:
            last_err = err
            continue
        return ApproxLeverageScores(scores=scores, config=cfg, normalized_sum=float(scores.sum()))
    raise SketchRankError(
        f"sketch rank-deficient after {MAX_RETRIES} retries: {last_err}"
    )


def compare_to_exact(X, approx) -> tuple[float, float]:
    """Pearson correlation and max relative error against exact scores.

    The relative error is taken over rows whose exact score exceeds the rank
    tolerance, so exactly-zero leverage rows do not divide by zero.
    """
    X = as_design_matrix(X)
    scores = approx.scores if isinstance(approx, ApproxLeverageScores) else np.asarray(approx, float)
    h = leverage_scores_exact(X)
    if scores.shape != h.shape:
        raise ValueError("score vector length does not match the matrix")
    if np.std(h) == 0 or np.std(scores) == 0:
        corr = 0.0
    else:
        corr = float(np.corrcoef(h, scores)[0, 1])
    tol = max(X.shape) * np.finfo(float).eps
    mask = h > tol
    max_rel = float(np.max(np.abs(h[mask] - scores[mask]) / h[mask])) if mask.any() else 0.0
    return corr, max_rel


def timing_benchmark(
    sizes,
    reps: int = 3,
    kinds=("binary", "gaussian"),
    r1: int | None = None,
    r2: int | None = None,
    seed: int = 0,
) -> list[dict]:
    """Median wall-clock time of exact vs approximate scores per (n, p).

    r1 defaults to 2p and r2 to ceil(10 ln n) per size.  Returns one row per
    (size, method) for the `n,p,method,r1,r2,median_seconds` CSV.
    """
    sizes = list(sizes)
    if not sizes:
        raise ValueError("sizes must be nonempty")
    rows = []
    for i, (n, p) in enumerate(sizes):
        rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(i,)))
        X = rng.standard_normal((n, p))
        size_r1 = r1 if r1 is not None else 2 * p
        size_r2 = r2 if r2 is not None else int(np.ceil(10 * np.log(n)))

        def _median_time(fn):
            times = []
            for _ in range(reps):
                t0 = time.perf_counter()
                fn()
                times.append(time.perf_counter() - t0)
            return float(np.median(times))

        rows.append(
            {
                "n": n,
                "p": p,
                "method": "exact",
                "median_seconds": _median_time(lambda: leverage_scores_exact(X)),
            }
        )
        for kind in kinds:
            cfg = ApproxLeverageConfig(r1=size_r1, r2=size_r2, kind=kind, seed=seed)
            method = "bfast" if kind == "binary" else "gfast"
            rows.append(
                {
                    "n": n,
                    "p": p,
                    "method": method,
                    "r1": size_r1,
                    "r2": size_r2,
                    "median_seconds": _median_time(lambda: approx_leverage(X, cfg)),
                }
            )
    return rows
