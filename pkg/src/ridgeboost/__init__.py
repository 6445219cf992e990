"""Once-boosting with (kernel) ridge regression for robust, efficient plug-in estimates."""

from .audit import MaeReport, audit, contraction_factor, holdout_mae, sample_mae
from .boost import PointEstimate, RidgeBooster, boost_lambda
from .exceptions import (
    ConfigError,
    DegenerateData,
    DimensionMismatch,
    EmptyData,
    EvaluationFailure,
    FileError,
    InvalidParameter,
    NoConvergence,
    NotFactorizable,
    NotSymmetric,
    RidgeBoostError,
    SchemaError,
)
from .features import (
    IdentityFeatures,
    Kernel,
    PolynomialFeatures,
    RandomFourierFeatures,
    gram,
    median_heuristic_bandwidth,
    sample_rff,
)
from .functionals import (
    DiffSpec,
    LinearFunctional,
    average_derivative_functional,
    counterfactual_mean_functional,
    eval_functional,
    functional_on_features,
    missing_mean_functional,
)
from .regress import KernelRidge, fit_ridge_dual, fit_ridge_primal, predict
from .riesz import check_equivalence, fit_riesz_dual, fit_riesz_primal, implied_weights

__version__ = "0.1.0"
