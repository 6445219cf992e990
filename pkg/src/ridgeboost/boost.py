"""Once-boosting with ridge regression and the resulting plug-in inference.

Fit any initial regressor, then run a single ridge regression of its
residuals on RKHS features and add the two. Plug-in estimates of linear
functionals computed with the boosted predictor equal a Riesz-weighted
bias-corrected estimate, which is what the standard errors here are built
on.
"""

import math
from dataclasses import asdict, dataclass

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin, clone
from sklearn.pipeline import make_pipeline
from sklearn.preprocessing import StandardScaler
from sklearn.utils.validation import check_array, check_is_fitted, check_X_y

from ._linalg import solve_spd, sym_eigenvalues
from .audit import moment_eigenvalues, sample_mae
from .exceptions import DimensionMismatch, InvalidParameter, RidgeBoostError
from .features import IdentityFeatures, Kernel, PolynomialFeatures, RandomFourierFeatures, gram, median_heuristic_bandwidth
from .functionals import LinearFunctional, eval_functional, functional_on_features, unit_contributions
from .regress import KernelRidge, _check_lambda, factor_regularized_moment, fit_ridge_dual, fit_ridge_primal
from .riesz import check_equivalence, fit_riesz_dual, fit_riesz_primal

Z_95 = 1.959964

RESULT_COLUMNS = (
    "label",
    "theta_hat",
    "std_error",
    "ci_low",
    "ci_high",
    "mae_before",
    "mae_after",
    "equivalence_residual",
)


def boost_lambda(n):
    """Default boosting penalty, ``n ** -1.5`` in the normalised objective.

    This is ``n ** -0.5`` for the penalty of the unnormalised residual
    least-squares problem ``|r - Phi b|**2 + lam |b|**2``.
    """
    return float(n) ** -1.5


@dataclass
class PointEstimate:
    label: str
    theta_hat: float
    std_error: float
    ci_low: float
    ci_high: float
    n_source: int
    n_target: int
    mae_before: float
    mae_after: float
    equivalence_residual: float
    theta_init: float = math.nan
    se_plugin: float = math.nan
    method: str = "boosted"
    status: str = "ok"

    @classmethod
    def from_se(cls, label, theta_hat, std_error, **kw):
        half = Z_95 * std_error
        return cls(label, theta_hat, std_error, theta_hat - half, theta_hat + half, **kw)

    @classmethod
    def failed(cls, label, message, n_source=0):
        nan = math.nan
        return cls(label, nan, nan, nan, nan, n_source, 0, nan, nan, nan, status=f"error: {message}")

    def covers(self, value):
        return self.ci_low <= value <= self.ci_high

    def as_dict(self):
        return asdict(self)


class _ZeroPredictor:
    def predict(self, X):
        return np.zeros(np.atleast_2d(X).shape[0])


class RidgeBooster(RegressorMixin, BaseEstimator):
    """Initial regressor plus one ridge boosting step on its residuals.

    Parameters
    ----------
    init : "krr", "zero", estimator or callable, default="krr"
        Initial predictor. "krr" is a dual RBF kernel ridge regression with
        median-heuristic bandwidth and penalty ``n ** -0.5`` (on standardised
        covariates when ``standardize``). An estimator is cloned and fitted;
        a plain callable is used as an already-fitted prediction function.
    features : {"rff", "identity", "polynomial"} or transformer, default="rff"
        Feature map of the boosting RKHS. Ignored when ``kernel`` is set.
    kernel : Kernel, {"rbf", "linear", "polynomial"} or None, default=None
        If given, boost in the dual with this kernel instead of explicit
        features. A string "rbf" takes its bandwidth from ``bandwidth``.
    n_components : int, default=200
        Number of random Fourier features for ``features="rff"``.
    degree : int, default=2
        Degree for ``features="polynomial"``.
    bandwidth : float or "median", default="median"
    lam : float or "auto", default="auto"
        Boosting penalty in the normalised objective; "auto" is
        :func:`boost_lambda`.
    standardize : bool, default=True
        Standardise covariates before the feature map.
    residuals : {"loo", "boosted", "init"}, default="loo"
        Residuals entering the source-sample variance term: leave-one-out
        residuals of the boosting step, raw boosted residuals, or residuals of
        the initial predictor.
    random_state : int or None, default=0
    fit_intercept : bool, default=True
        Fit the initial estimator on centred outcomes and add the mean back.
        Applies to "krr" and estimator inits; "zero" and callables are taken
        as given.
    """

    def __init__(
        self,
        init="krr",
        features="rff",
        kernel=None,
        n_components=200,
        degree=2,
        bandwidth="median",
        lam="auto",
        standardize=True,
        residuals="loo",
        random_state=0,
        fit_intercept=True,
    ):
        self.init = init
        self.features = features
        self.kernel = kernel
        self.n_components = n_components
        self.degree = degree
        self.bandwidth = bandwidth
        self.lam = lam
        self.standardize = standardize
        self.residuals = residuals
        self.random_state = random_state
        self.fit_intercept = fit_intercept

    # -- construction -----------------------------------------------------

    def _make_init(self):
        if isinstance(self.init, str):
            if self.init == "krr":
                krr = KernelRidge(kernel="rbf", bandwidth="median", lam="auto")
                return make_pipeline(StandardScaler(), krr) if self.standardize else krr
            if self.init == "zero":
                return _ZeroPredictor()
            raise InvalidParameter(f"unknown init {self.init!r}")
        if hasattr(self.init, "fit"):
            return clone(self.init)
        if callable(self.init):
            return self.init
        raise InvalidParameter("init must be 'krr', 'zero', an estimator or a callable")

    def _make_features(self):
        if not isinstance(self.features, str):
            return clone(self.features)
        if self.features == "rff":
            return RandomFourierFeatures(self.n_components, self.bandwidth, self.random_state)
        if self.features == "identity":
            return IdentityFeatures()
        if self.features == "polynomial":
            return PolynomialFeatures(degree=self.degree)
        raise InvalidParameter(f"unknown feature map {self.features!r}")

    def _make_kernel(self, Xs):
        if isinstance(self.kernel, Kernel):
            return self.kernel
        if self.kernel == "rbf":
            bw = median_heuristic_bandwidth(Xs) if self.bandwidth == "median" else float(self.bandwidth)
            return Kernel.rbf(bw)
        if self.kernel == "linear":
            return Kernel.linear()
        if self.kernel == "polynomial":
            return Kernel.polynomial(self.degree)
        raise InvalidParameter(f"unknown kernel {self.kernel!r}")

    def fit(self, X, y):
        X, y = check_X_y(X, y, dtype=float, y_numeric=True)
        if self.residuals not in ("loo", "boosted", "init"):
            raise InvalidParameter(f"unknown residuals mode {self.residuals!r}")
        n = X.shape[0]
        self.n_features_in_ = X.shape[1]
        self.X_fit_, self.y_fit_ = X, y

        init = self._make_init()
        self.y_offset_ = 0.0
        if hasattr(init, "fit") and not isinstance(init, _ZeroPredictor):
            if self.fit_intercept:
                self.y_offset_ = float(y.mean())
            init.fit(X, y - self.y_offset_)
        self.init_ = init
        self.lam_ = boost_lambda(n) if self.lam == "auto" else _check_lambda(self.lam)

        self.scaler_ = StandardScaler().fit(X) if self.standardize else None
        Xs = self._scale(X)
        self.resid_init_ = y - self.predict_init(X)

        if self.kernel is None:
            self.feature_map_ = self._make_features().fit(Xs)
            self.kernel_ = None
            self.Phi_ = self.feature_map_.transform(Xs)
            self.factorization_ = factor_regularized_moment(self.Phi_, self.lam_)
            self.boost_fit_ = fit_ridge_primal(self.Phi_, self.resid_init_, self.lam_, factorization=self.factorization_)
        else:
            kernel = self._make_kernel(Xs)
            self.feature_map_ = None
            self.kernel_ = kernel
            self.Xs_fit_ = Xs
            self.K_ = gram(kernel, Xs)
            self.boost_fit_ = fit_ridge_dual(self.K_, self.resid_init_, self.lam_, anchors=Xs, kernel=kernel)
        self.resid_boosted_ = y - self.predict(X)
        self.mae_init_ = self._sample_mae(self.resid_init_)
        self.mae_boosted_ = self._sample_mae(self.resid_boosted_)
        return self

    # -- prediction -------------------------------------------------------

    def _scale(self, X):
        return X if self.scaler_ is None else self.scaler_.transform(X)

    def _check_X(self, X):
        check_is_fitted(self, "boost_fit_")
        X = check_array(X, dtype=float)
        if X.shape[1] != self.n_features_in_:
            raise DimensionMismatch(f"expected {self.n_features_in_} columns, got {X.shape[1]}")
        return X

    def transform_features(self, X):
        """Boosting features ``phi(x)`` of raw covariate rows (primal only)."""
        if self.kernel_ is not None:
            raise InvalidParameter("a dual booster has no explicit feature map")
        return self.feature_map_.transform(self._scale(self._check_X(X)))

    def predict_init(self, X):
        X = check_array(X, dtype=float)
        fn = self.init_.predict if hasattr(self.init_, "predict") else self.init_
        return np.asarray(fn(X), dtype=float).ravel() + self.y_offset_

    def predict_boost(self, X):
        X = self._check_X(X)
        if self.kernel_ is None:
            return self.feature_map_.transform(self._scale(X)) @ self.boost_fit_.beta
        return gram(self.kernel_, self._scale(X), self.Xs_fit_) @ self.boost_fit_.coeffs

    def predict(self, X):
        X = self._check_X(X)
        return self.predict_init(X) + self.predict_boost(X)

    # -- diagnostics ------------------------------------------------------

    def _sample_mae(self, r):
        if self.kernel_ is None:
            return sample_mae(self.Phi_, r)
        quad = max(float(r @ self.K_ @ r), 0.0)
        return math.sqrt(quad) / r.shape[0]

    @property
    def moment_eigenvalues_(self):
        check_is_fitted(self, "boost_fit_")
        if not hasattr(self, "_eigenvalues"):
            if self.kernel_ is None:
                self._eigenvalues = moment_eigenvalues(self.Phi_)
            else:
                self._eigenvalues = moment_eigenvalues_dual(self.K_)
        return self._eigenvalues

    def leverages(self):
        """Diagonal of the boosting step's hat matrix on the training rows."""
        check_is_fitted(self, "boost_fit_")
        n = self.X_fit_.shape[0]
        if self.kernel_ is None:
            S = solve_spd(self.factorization_, self.Phi_.T)
            return np.einsum("ij,ji->i", self.Phi_, S) / n
        G = self.K_ + n * self.lam_ * np.eye(n)
        return np.diag(np.linalg.solve(G, self.K_))

    # -- inference --------------------------------------------------------

    def riesz_weights(self, theta):
        """Implied Riesz weights ``alpha(x_i)`` of ``theta`` on the training rows."""
        check_is_fitted(self, "boost_fit_")
        if self.kernel_ is None:
            theta_phi = functional_on_features(theta, self.transform_features)
            riesz = fit_riesz_primal(self.Phi_, theta_phi, self.lam_, factorization=self.factorization_)
            return self.Phi_ @ riesz.eta
        scaled = LinearFunctional(self._scale(theta.anchors), theta.weights, theta.label, theta.units)
        riesz = fit_riesz_dual(self.kernel_, self.Xs_fit_, scaled, self.lam_)
        return gram(self.kernel_, self.Xs_fit_, riesz.anchors) @ riesz.coeffs

    def _variance_residuals(self, mode):
        if mode == "init":
            return self.resid_init_
        if mode == "boosted":
            return self.resid_boosted_
        return self.resid_boosted_ / (1.0 - self.leverages())

    def estimate(self, theta, method="boosted", residuals=None):
        """Plug-in estimate of ``theta`` with a 95% normal confidence interval.

        ``method="naive"`` plugs in the initial predictor and keeps only the
        target-sample variance term.
        """
        check_is_fitted(self, "boost_fit_")
        if theta.input_dim != self.n_features_in_:
            raise DimensionMismatch(f"functional anchors have {theta.input_dim} columns, model expects {self.n_features_in_}")
        n_p = self.X_fit_.shape[0]
        n_q = theta.n_units
        common = dict(n_source=n_p, n_target=n_q, mae_before=self.mae_init_, mae_after=self.mae_boosted_)
        theta_init = eval_functional(theta, self.predict_init)
        if method == "naive":
            contrib = unit_contributions(theta, self.predict_init)
            s_q2 = float(np.var(contrib, ddof=1)) if n_q > 1 else 0.0
            se = math.sqrt(s_q2 / n_q)
            return PointEstimate.from_se(
                theta.label, theta_init, se, equivalence_residual=math.nan, theta_init=theta_init,
                se_plugin=se, method="naive", **common,
            )
        if method != "boosted":
            raise InvalidParameter(f"unknown method {method!r}")

        contrib = unit_contributions(theta, self.predict)
        theta_hat = eval_functional(theta, self.predict)
        s_q2 = float(np.var(contrib, ddof=1)) if n_q > 1 else 0.0
        alpha = self.riesz_weights(theta)
        r = self._variance_residuals(residuals or self.residuals)
        s_p2 = float(np.var(alpha * r, ddof=1)) if n_p > 1 else 0.0
        se = math.sqrt(s_q2 / n_q + s_p2 / n_p)

        if self.kernel_ is None:
            theta_phi = functional_on_features(theta, self.transform_features)
            gap, _ = check_equivalence(self.Phi_, self.resid_init_, theta_phi, self.lam_)
        else:
            gap = abs((theta_hat - theta_init) - float(alpha @ self.resid_init_) / n_p)
        se_plugin = math.sqrt(float(np.var(contrib)) / n_q)
        return PointEstimate.from_se(
            theta.label, theta_hat, se, equivalence_residual=gap, theta_init=theta_init,
            se_plugin=se_plugin, **common,
        )

    def profile(self, family, method="boosted"):
        """Estimate every functional in ``family`` from this one fitted model.

        Failures are reported per entry in ``status`` instead of aborting.
        """
        family = list(family)
        if not family:
            raise InvalidParameter("profile needs at least one functional")
        out = []
        for theta in family:
            try:
                out.append(self.estimate(theta, method=method))
            except RidgeBoostError as exc:
                out.append(PointEstimate.failed(getattr(theta, "label", "?"), str(exc), self.X_fit_.shape[0]))
        return out


def moment_eigenvalues_dual(K):
    """Eigenvalues of ``K / n``; these are the nonzero spectrum of ``Phi.T Phi / n``."""
    return sym_eigenvalues(np.asarray(K) / K.shape[0])
