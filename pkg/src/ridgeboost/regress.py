"""Ridge regression in an RKHS, primal and dual, under one objective.

Every fit minimises

    J(h) = (1/n) * sum_i (z_i - h(x_i))**2 + lam * ||h||**2

so the primal solution is ``beta = (M + lam I)^{-1} Phi.T z / n`` with
``M = Phi.T Phi / n`` and the dual solution is ``c = (K + n lam I)^{-1} z``.
The two agree exactly whenever ``K = Phi Phi.T``.
"""

from dataclasses import dataclass
from typing import Any, Optional

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.utils.validation import check_array, check_is_fitted, check_X_y

from ._linalg import SpdFactorization, factor_spd, solve_spd
from .exceptions import DimensionMismatch, InvalidParameter
from .features import Kernel, gram, median_heuristic_bandwidth


def default_lambda(n):
    """n ** -1/2, the rate used for the initial kernel ridge fit."""
    return float(n) ** -0.5


def _check_lambda(lam):
    lam = float(lam)
    if not lam > 0 or not np.isfinite(lam):
        raise InvalidParameter(f"lambda must be a positive finite number, got {lam}")
    return lam


@dataclass(frozen=True)
class RidgeFitPrimal:
    beta: np.ndarray
    lam: float
    n_train: int
    factorization: SpdFactorization
    feature_map: Optional[Any] = None


@dataclass(frozen=True)
class RidgeFitDual:
    coeffs: np.ndarray
    lam: float
    anchors: Optional[np.ndarray] = None
    kernel: Optional[Kernel] = None


def second_moment(Phi):
    Phi = np.asarray(Phi, dtype=float)
    M = Phi.T @ Phi / Phi.shape[0]
    return 0.5 * (M + M.T)


def factor_regularized_moment(Phi, lam):
    """Cholesky factor of ``Phi.T Phi / n + lam I``, shared by ridge and Riesz solves."""
    M = second_moment(Phi)
    return factor_spd(M + _check_lambda(lam) * np.eye(M.shape[0]))


def fit_ridge_primal(Phi, z, lam, factorization=None, feature_map=None):
    """Ridge regression of ``z`` on the columns of ``Phi``.

    ``factorization`` may be a precomputed :func:`factor_regularized_moment`
    for the same ``Phi`` and ``lam``; it is then reused instead of refactoring.
    """
    Phi = check_array(Phi, dtype=float)
    z = np.asarray(z, dtype=float).ravel()
    if z.shape[0] != Phi.shape[0]:
        raise DimensionMismatch(f"Phi has {Phi.shape[0]} rows, z has {z.shape[0]}")
    lam = _check_lambda(lam)
    n = Phi.shape[0]
    if factorization is None:
        factorization = factor_regularized_moment(Phi, lam)
    beta = solve_spd(factorization, Phi.T @ z / n)
    return RidgeFitPrimal(beta=beta, lam=lam, n_train=n, factorization=factorization, feature_map=feature_map)


def fit_ridge_dual(K, z, lam, anchors=None, kernel=None):
    K = np.asarray(K, dtype=float)
    z = np.asarray(z, dtype=float).ravel()
    n = K.shape[0]
    if K.shape != (n, n) or z.shape[0] != n:
        raise DimensionMismatch(f"Gram matrix {K.shape} incompatible with z of length {z.shape[0]}")
    lam = _check_lambda(lam)
    F = factor_spd(K + n * lam * np.eye(n))
    return RidgeFitDual(coeffs=solve_spd(F, z), lam=lam, anchors=anchors, kernel=kernel)


def predict(fit, X_new):
    """Evaluate a primal or dual ridge fit.

    For a primal fit without a stored feature map, ``X_new`` is taken to be
    the feature matrix itself.
    """
    if isinstance(fit, RidgeFitPrimal):
        Phi = X_new if fit.feature_map is None else fit.feature_map.transform(X_new)
        Phi = np.atleast_2d(np.asarray(Phi, dtype=float))
        if Phi.shape[1] != fit.beta.shape[0]:
            raise DimensionMismatch(f"expected {fit.beta.shape[0]} features, got {Phi.shape[1]}")
        return Phi @ fit.beta
    if isinstance(fit, RidgeFitDual):
        if fit.anchors is None or fit.kernel is None:
            raise InvalidParameter("dual fit needs anchors and a kernel to predict on new rows")
        return gram(fit.kernel, X_new, fit.anchors) @ fit.coeffs
    raise TypeError(f"not a ridge fit: {type(fit).__name__}")


class KernelRidge(RegressorMixin, BaseEstimator):
    """Kernel ridge regression solved in the dual.

    Parameters
    ----------
    kernel : {"rbf", "linear", "polynomial"}, default="rbf"
    bandwidth : float or "median", default="median"
        RBF bandwidth; "median" uses the median heuristic on the training rows.
    degree, offset : polynomial kernel parameters.
    lam : float or "auto", default="auto"
        Penalty in the normalised objective; "auto" means ``n ** -0.5``.
    """

    def __init__(self, kernel="rbf", bandwidth="median", degree=2, offset=1.0, lam="auto"):
        self.kernel = kernel
        self.bandwidth = bandwidth
        self.degree = degree
        self.offset = offset
        self.lam = lam

    def _make_kernel(self, X):
        if self.kernel == "rbf":
            bw = median_heuristic_bandwidth(X) if self.bandwidth == "median" else float(self.bandwidth)
            return Kernel.rbf(bw)
        if self.kernel == "polynomial":
            return Kernel.polynomial(self.degree, self.offset)
        if self.kernel == "linear":
            return Kernel.linear()
        raise InvalidParameter(f"unknown kernel {self.kernel!r}")

    def fit(self, X, y):
        X, y = check_X_y(X, y, dtype=float, y_numeric=True)
        n = X.shape[0]
        self.kernel_ = self._make_kernel(X)
        self.lam_ = default_lambda(n) if self.lam == "auto" else _check_lambda(self.lam)
        self.X_fit_ = X
        self.dual_fit_ = fit_ridge_dual(gram(self.kernel_, X), y, self.lam_, anchors=X, kernel=self.kernel_)
        self.n_features_in_ = X.shape[1]
        return self

    def predict(self, X):
        check_is_fitted(self, "dual_fit_")
        X = check_array(X, dtype=float)
        if X.shape[1] != self.n_features_in_:
            raise DimensionMismatch(f"expected {self.n_features_in_} columns, got {X.shape[1]}")
        return predict(self.dual_fit_, X)
