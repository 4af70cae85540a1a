"""Leverage-score subsampling for over-constrained least squares.

Exact and fast-approximate statistical leverage scores, the UNIF / LEV /
SLEV / LEVUNW subsampling estimators, closed-form leading-order variance
formulas, synthetic design generators, and a Monte Carlo experiment harness.
"""

__version__ = "0.1.0"

from .datagen import (
    DesignSpec,
    LeverageSummary,
    covariance_matrix,
    default_beta,
    gen_design,
    gen_response,
    leverage_summary,
    replicated_row_design,
)
from .fastlev import (
    ApproxLeverageConfig,
    ApproxLeverageScores,
    SketchRankError,
    approx_leverage,
    compare_to_exact,
    timing_benchmark,
)
from .linalg import (
    OLSFit,
    RegressionProblem,
    ThinSVD,
    WLSFit,
    leverage_scores_exact,
    numerical_rank,
    solve_ols,
    solve_wls,
    thin_svd,
)
from .sampling import (
    SamplingDistribution,
    Subsample,
    SubsampleEstimate,
    build_distribution,
    draw_subsample,
    rank_loss_trial,
    unweighted_estimate,
    weighted_estimate,
)
from .stats import (
    BiasVarianceReport,
    analytic_conditional_variance,
    analytic_levunw_variances,
    analytic_unconditional_variance,
    mse_decomposition,
    run_conditional,
    run_unconditional,
)

__all__ = [
    "__version__",
    "DesignSpec",
    "LeverageSummary",
    "covariance_matrix",
    "default_beta",
    "gen_design",
    "gen_response",
    "leverage_summary",
    "replicated_row_design",
    "ApproxLeverageConfig",
    "ApproxLeverageScores",
    "SketchRankError",
    "approx_leverage",
    "compare_to_exact",
    "timing_benchmark",
    "OLSFit",
    "RegressionProblem",
    "ThinSVD",
    "WLSFit",
    "leverage_scores_exact",
    "numerical_rank",
    "solve_ols",
    "solve_wls",
    "thin_svd",
    "SamplingDistribution",
    "Subsample",
    "SubsampleEstimate",
    "build_distribution",
    "draw_subsample",
    "rank_loss_trial",
    "unweighted_estimate",
    "weighted_estimate",
    "BiasVarianceReport",
    "analytic_conditional_variance",
    "analytic_levunw_variances",
    "analytic_unconditional_variance",
    "mse_decomposition",
    "run_conditional",
    "run_unconditional",
]
