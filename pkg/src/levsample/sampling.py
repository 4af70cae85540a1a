"""Sampling distributions, with-replacement subsampling, and the four
subsampling estimators (UNIF, LEV, SLEV weighted; LEVUNW unweighted)."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import RegressionProblem

__all__ = [
    "SamplingDistribution",
    "Subsample",
    "SubsampleEstimate",
    "RankLossResult",
    "build_distribution",
    "draw_subsample",
    "weighted_estimate",
    "unweighted_estimate",
    "rank_loss_trial",
]

SCHEMES = ("UNIF", "LEV", "SLEV", "APPROX_LEV", "APPROX_SLEV")
SOURCES = ("exact", "bfast", "gfast")


@dataclass(frozen=True)
class SamplingDistribution:
    probs: np.ndarray
    scheme: str
    alpha: float | None = None
    source: str = "exact"

    def __post_init__(self):
        probs = np.asarray(self.probs, dtype=float)
        if np.any(probs < 0):
            raise ValueError("sampling probabilities must be nonnegative")
        total = probs.sum()
        if not np.isclose(total, 1.0, rtol=0, atol=1e-10):
            raise ValueError(f"probabilities sum to {total}, expected 1")
        object.__setattr__(self, "probs", probs)

    @property
    def n(self) -> int:
        return self.probs.shape[0]


@dataclass(frozen=True)
class Subsample:
    """r row indices drawn with replacement plus their draw-time probabilities."""

    indices: np.ndarray
    probs_at_draw: np.ndarray
    r: int


@dataclass(frozen=True)
class SubsampleEstimate:
    beta_tilde: np.ndarray
    subproblem_rank: int
    rank_deficient: bool
    scheme: str
    weighted: bool


@dataclass(frozen=True)
class RankLossResult:
    fraction_singular: float
    rank_histogram: dict[int, int]
    trials: int


def build_distribution(
    scheme: str,
    scores=None,
    n: int | None = None,
    alpha: float | None = None,
    source: str = "exact",
) -> SamplingDistribution:
    """Build sampling probabilities for UNIF, LEV, or SLEV.

    LEV: pi_i = h_ii / sum(h).  SLEV: pi = alpha * pi_lev + (1 - alpha) / n.
    `scores` may be exact or approximate leverage scores; `source` records
    provenance and flips the scheme tag to APPROX_* for non-exact scores.
    """
    if source not in SOURCES:
        raise ValueError(f"unknown leverage source {source!r}")
    if scheme == "UNIF":
        if n is None:
            if scores is None:
                raise ValueError("UNIF needs n")
            n = len(scores)
        probs = np.full(n, 1.0 / n)
        return SamplingDistribution(probs, "UNIF")
    if scheme not in ("LEV", "SLEV"):
        raise ValueError(f"unknown scheme {scheme!r}")
    if scores is None:
        raise ValueError(f"{scheme} needs leverage scores")
    h = np.asarray(scores, dtype=float)
    if np.any(h < 0):
        raise ValueError("leverage scores must be nonnegative")
    total = h.sum()
    if total <= 0:
        raise ValueError("leverage scores sum to zero")
    pi_lev = h / total
    tag = scheme if source == "exact" else f"APPROX_{scheme}"
    if scheme == "LEV":
        return SamplingDistribution(pi_lev, tag, source=source)
    if alpha is None or not 0.0 < alpha < 1.0:
        raise ValueError(f"SLEV requires alpha in (0, 1), got {alpha}")
    m = pi_lev.shape[0]
    probs = alpha * pi_lev + (1.0 - alpha) / m
    return SamplingDistribution(probs, tag, alpha=alpha, source=source)


def _as_rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def draw_subsample(dist: SamplingDistribution, r: int, seed) -> Subsample:
    """Draw r i.i.d. indices with replacement via inverse-CDF binary search.

    Deterministic for a fixed seed; zero-probability rows are never drawn.
    """
    if r < 1:
        raise ValueError(f"subsample size must be >= 1, got {r}")
    rng = _as_rng(seed)
    cdf = np.cumsum(dist.probs)
    if cdf[-1] <= 0:
        raise ValueError("degenerate distribution: all mass zero")
    cdf /= cdf[-1]
    u = rng.random(r)
    indices = np.searchsorted(cdf, u, side="right")
    return Subsample(indices=indices, probs_at_draw=dist.probs[indices], r=r)


def _lstsq(A: np.ndarray, b: np.ndarray) -> tuple[np.ndarray, int]:
    beta, _, rank, _ = np.linalg.lstsq(A, b, rcond=None)
    return beta, int(rank)


def weighted_estimate(
    problem: RegressionProblem, sub: Subsample, scheme: str = ""
) -> SubsampleEstimate:
    """Solve the rescaled subproblem min ||D S^T y - D S^T X b||^2 with
    D_kk = 1 / sqrt(r * pi_{i_k}); minimum-norm under rank deficiency."""
    idx = sub.indices
    if idx.max(initial=0) >= problem.n:
        raise ValueError("subsample index out of range")
    d = 1.0 / np.sqrt(sub.r * sub.probs_at_draw)
    Xs = problem.X[idx] * d[:, None]
    ys = problem.y[idx] * d
    beta, rank = _lstsq(Xs, ys)
    return SubsampleEstimate(
        beta_tilde=beta,
        subproblem_rank=rank,
        rank_deficient=rank < problem.p,
        scheme=scheme,
        weighted=True,
    )


def unweighted_estimate(
    problem: RegressionProblem, sub: Subsample, scheme: str = ""
) -> SubsampleEstimate:
    """Solve the raw subproblem min ||S^T y - S^T X b||^2 (LEVUNW when the
    subsample came from leverage-based probabilities)."""
    idx = sub.indices
    if idx.max(initial=0) >= problem.n:
        raise ValueError("subsample index out of range")
    beta, rank = _lstsq(problem.X[idx], problem.y[idx])
    return SubsampleEstimate(
        beta_tilde=beta,
        subproblem_rank=rank,
        rank_deficient=rank < problem.p,
        scheme=scheme,
        weighted=False,
    )


def rank_loss_trial(
    problem: RegressionProblem,
    dist: SamplingDistribution,
    r: int,
    trials: int,
    seed,
    weighted: bool = True,
) -> RankLossResult:
    """Fraction of subsampled solves with rank < p, plus the rank histogram.

    Each trial's RNG stream derives from (seed, trial index), so results are
    reproducible independent of execution order.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    ss = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    estimate = weighted_estimate if weighted else unweighted_estimate
    hist: dict[int, int] = {}
    singular = 0
    for child in ss.spawn(trials):
        sub = draw_subsample(dist, r, np.random.default_rng(child))
        est = estimate(problem, sub, scheme=dist.scheme)
        hist[est.subproblem_rank] = hist.get(est.subproblem_rank, 0) + 1
        singular += est.rank_deficient
    return RankLossResult(
        fraction_singular=singular / trials,
        rank_histogram=dict(sorted(hist.items())),
        trials=trials,
    )
