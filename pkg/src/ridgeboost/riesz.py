"""Ridge Riesz regression and the ridge/Riesz numerical equivalence.

The primal problem

    min_eta  eta.T M eta - 2 theta(Phi).T eta + lam |eta|**2,   M = Phi.T Phi / n

has solution ``eta = (M + lam I)^{-1} theta(Phi)``. Its implied weights
``alpha(x_i) = phi(x_i).T eta`` satisfy, for every response ``z``,

    theta(Phi).T beta_ridge(z) == alpha.T z / n

which is what lets a ridge plug-in estimate be read as a weighting estimator.
"""

from dataclasses import dataclass
from typing import Any, Optional

import numpy as np
import scipy.linalg
from sklearn.utils.validation import check_array

from ._linalg import SpdFactorization, factor_spd, solve_spd
from .exceptions import DimensionMismatch, NotFactorizable
from .features import Kernel, gram
from .regress import _check_lambda, second_moment


@dataclass(frozen=True)
class RieszFitPrimal:
    eta: np.ndarray
    lam: float
    feature_map: Optional[Any] = None

    def __call__(self, X):
        return implied_weights(self, X)


@dataclass(frozen=True)
class RieszFitDual:
    """``alpha(x) = sum_a coeffs[a] k(x, anchors[a])`` over training rows and functional anchors."""

    coeffs: np.ndarray
    anchors: np.ndarray
    lam: float
    kernel: Kernel

    def __call__(self, X):
        return implied_weights(self, X)


def fit_riesz_primal(Phi_p, theta_phi, lam, factorization=None, feature_map=None):
    """Minimise the ridge-penalised Riesz loss over ``eta``.

    Parameters
    ----------
    Phi_p : ndarray of shape (n, D)
        Source features.
    theta_phi : ndarray of shape (D,)
        The functional applied to each feature coordinate.
    lam : float
    factorization : SpdFactorization, optional
        Factor of ``M + lam I`` for this ``Phi_p``; reused when given.
    """
    Phi_p = check_array(Phi_p, dtype=float)
    theta_phi = np.asarray(theta_phi, dtype=float).ravel()
    if theta_phi.shape[0] != Phi_p.shape[1]:
        raise DimensionMismatch(f"theta(Phi) has length {theta_phi.shape[0]}, Phi has {Phi_p.shape[1]} columns")
    lam = _check_lambda(lam)
    if factorization is None:
        M = second_moment(Phi_p)
        factorization = factor_spd(M + lam * np.eye(M.shape[0]))
    if not isinstance(factorization, SpdFactorization):
        raise TypeError("factorization must be an SpdFactorization")
    return RieszFitPrimal(eta=solve_spd(factorization, theta_phi), lam=lam, feature_map=feature_map)


def fit_riesz_dual(kernel, X_p, theta, lam):
    """Exact minimiser of the penalised Riesz loss over the RKHS of ``kernel``.

    The minimiser lies in the span of ``k(., x_i)`` for training rows and
    ``k(., u_s)`` for the functional's anchors. Writing ``A`` for the stacked
    anchors and ``D`` for the diagonal selector with ``1/n`` on training rows,
    stationarity reads ``K_AA (D K_AA + lam I) c = K_AA e_U w``; we solve the
    nonsingular factor ``(D K_AA + lam I) c = e_U w``, which needs no jitter
    even when ``K_AA`` is rank deficient.
    """
    X_p = check_array(X_p, dtype=float)
    lam = _check_lambda(lam)
    n, m = X_p.shape[0], theta.anchors.shape[0]
    if theta.input_dim != X_p.shape[1]:
        raise DimensionMismatch("functional anchors and training rows have different widths")
    A = np.vstack([X_p, theta.anchors])
    K = gram(kernel, A)
    sel = np.concatenate([np.full(n, 1.0 / n), np.zeros(m)])
    rhs = np.concatenate([np.zeros(n), theta.weights])
    system = sel[:, None] * K + lam * np.eye(n + m)
    try:
        coeffs = scipy.linalg.solve(system, rhs, check_finite=False)
    except np.linalg.LinAlgError as exc:
        raise NotFactorizable(str(exc)) from exc
    return RieszFitDual(coeffs=coeffs, anchors=A, lam=lam, kernel=kernel)


def dual_stationarity_gap(fit, X_p, theta):
    """Norm of the gradient of the restricted Riesz objective at ``fit``."""
    n = X_p.shape[0]
    K_Ap = gram(fit.kernel, fit.anchors, X_p)
    K_AA = gram(fit.kernel, fit.anchors)
    K_AU = gram(fit.kernel, fit.anchors, theta.anchors)
    G = K_Ap @ K_Ap.T / n + fit.lam * K_AA
    rhs = K_AU @ theta.weights
    return float(np.linalg.norm(G @ fit.coeffs - rhs)), float(np.linalg.norm(rhs))


def implied_weights(fit, X_p):
    """``alpha(x_i)`` for each source row.

    For a primal fit without a stored feature map ``X_p`` must already be
    the feature matrix.
    """
    if isinstance(fit, RieszFitPrimal):
        Phi = X_p if fit.feature_map is None else fit.feature_map.transform(X_p)
        Phi = np.atleast_2d(np.asarray(Phi, dtype=float))
        if Phi.shape[1] != fit.eta.shape[0]:
            raise DimensionMismatch(f"expected {fit.eta.shape[0]} features, got {Phi.shape[1]}")
        return Phi @ fit.eta
    if isinstance(fit, RieszFitDual):
        return gram(fit.kernel, X_p, fit.anchors) @ fit.coeffs
    raise TypeError(f"not a Riesz fit: {type(fit).__name__}")


def check_equivalence(Phi_p, z, theta_phi, lam, *, beta_perturbation=0.0):
    """Absolute gap between the ridge plug-in and the Riesz weighting estimate.

    The ridge side uses a Cholesky factor of ``M + lam I``; the Riesz side
    an independent LU factorization, so a shared-solver bug cannot cancel.
    ``beta_perturbation`` shifts every ridge coefficient and exists only to
    exercise failure paths.

    Returns
    -------
    gap : float
        ``|theta(Phi).T beta - alpha.T z / n|``
    theta_hat : float
        The ridge plug-in value ``theta(Phi).T beta``.
    """
    Phi_p = check_array(Phi_p, dtype=float)
    z = np.asarray(z, dtype=float).ravel()
    theta_phi = np.asarray(theta_phi, dtype=float).ravel()
    n, D = Phi_p.shape
    if z.shape[0] != n or theta_phi.shape[0] != D:
        raise DimensionMismatch("Phi, z and theta(Phi) have inconsistent sizes")
    lam = _check_lambda(lam)

    M_ridge = Phi_p.T @ Phi_p / n
    F = factor_spd(0.5 * (M_ridge + M_ridge.T) + lam * np.eye(D))
    beta = solve_spd(F, Phi_p.T @ z / n) + beta_perturbation
    plug_in = float(theta_phi @ beta)

    G = np.einsum("ij,ik->jk", Phi_p, Phi_p) / n + lam * np.eye(D)
    try:
        eta = scipy.linalg.lu_solve(scipy.linalg.lu_factor(G, check_finite=False), theta_phi)
    except np.linalg.LinAlgError as exc:
        raise NotFactorizable(str(exc)) from exc
    weighted = float((Phi_p @ eta) @ z / n)
    return abs(plug_in - weighted), plug_in


def riesz_objective(Phi_p, theta_phi, lam, eta):
    """Value of the penalised empirical Riesz loss at ``eta``."""
    Phi_p = np.asarray(Phi_p, dtype=float)
    a = Phi_p @ eta
    return float(a @ a / Phi_p.shape[0] - 2.0 * theta_phi @ eta + lam * eta @ eta)


__all__ = [
    "RieszFitDual",
    "RieszFitPrimal",
    "check_equivalence",
    "dual_stationarity_gap",
    "fit_riesz_dual",
    "fit_riesz_primal",
    "implied_weights",
    "riesz_objective",
]
