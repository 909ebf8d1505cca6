"""likrank: marginal likelihood feature ranking for two-class data.

Rank the columns of a very wide feature matrix by how well each one alone
predicts a binary label under a two-parameter logistic model, then choose
how many of the top-ranked features to keep (threshold, change-point, or
block-wise cross-validation), classify with per-class centroids, and score
ranking quality through misranking counts and AUC.  A simulation engine
generates matched synthetic problems for calibration studies.
"""

__version__ = "0.1.0"

from .adaptive_select import (
    BlockCvSettings,
    ChangePointSettings,
    ThresholdSettings,
    scrambled_threshold,
    select_block_cv,
    select_changepoint,
    select_threshold,
    threshold_rule,
    u2_hat,
    u2_hat_all,
)
from .classify_eval import (
    CentroidModel,
    cv_error,
    predict,
    prefix_error_curve,
    test_error,
    train_centroid,
)
from .data_model import (
    DataError,
    FeatureScore,
    LabeledMatrix,
    Ranking,
    SelectionResult,
    standardize,
    validate,
)
from .logit_rank import (
    FitSettings,
    fit_feature,
    fit_matrix,
    negative_log_likelihood,
    rank,
    zscore,
    zscore_empirical,
)
from .metrics import (
    RankingQuality,
    count_misrankings,
    likelihood_profile,
    roc_area,
    roc_points,
    theorem3_misrank_probability,
    theorem4_expected_misrankings,
)
from .simulate import (
    NoiseSpec,
    SignalSpec,
    SimConfig,
    generate,
    generate_section53,
)

__all__ = [
    "__version__",
    "BlockCvSettings",
    "CentroidModel",
    "ChangePointSettings",
    "DataError",
    "FeatureScore",
    "FitSettings",
    "LabeledMatrix",
    "NoiseSpec",
    "Ranking",
    "RankingQuality",
    "SelectionResult",
    "SignalSpec",
    "SimConfig",
    "ThresholdSettings",
    "count_misrankings",
    "cv_error",
    "fit_feature",
    "fit_matrix",
    "generate",
    "generate_section53",
    "likelihood_profile",
    "negative_log_likelihood",
    "predict",
    "prefix_error_curve",
    "rank",
    "roc_area",
    "roc_points",
    "scrambled_threshold",
    "select_block_cv",
    "select_changepoint",
    "select_threshold",
    "standardize",
    "test_error",
    "theorem3_misrank_probability",
    "theorem4_expected_misrankings",
    "threshold_rule",
    "train_centroid",
    "u2_hat",
    "u2_hat_all",
    "validate",
    "zscore",
    "zscore_empirical",
]
