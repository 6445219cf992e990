import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from sklearn.base import clone

from ridgeboost.exceptions import DimensionMismatch, InvalidParameter
from ridgeboost.features import Kernel, PolynomialFeatures, gram
from ridgeboost.regress import KernelRidge, default_lambda, fit_ridge_dual, fit_ridge_primal, predict


def test_primal_matches_normal_equations(rng):
    Phi, z = rng.normal(size=(30, 4)), rng.normal(size=30)
    lam = 0.3
    fit = fit_ridge_primal(Phi, z, lam)
    expected = np.linalg.solve(Phi.T @ Phi + 30 * lam * np.eye(4), Phi.T @ z)
    np.testing.assert_allclose(fit.beta, expected, rtol=1e-10)
    np.testing.assert_allclose(predict(fit, Phi), Phi @ expected, rtol=1e-10)


@settings(max_examples=30, deadline=None)
@given(
    n=st.integers(3, 40),
    D=st.integers(1, 10),
    lam=st.sampled_from([1e-3, 1e-1, 1.0, 10.0]),
    seed=st.integers(0, 2**32 - 1),
)
def test_primal_and_dual_agree_in_sample(n, D, lam, seed):
    r = np.random.default_rng(seed)
    Phi, z = r.normal(size=(n, D)), r.normal(size=n)
    primal = Phi @ fit_ridge_primal(Phi, z, lam).beta
    dual = Phi @ Phi.T @ fit_ridge_dual(Phi @ Phi.T, z, lam).coeffs
    np.testing.assert_allclose(primal, dual, atol=1e-8 * (1 + np.abs(z).max()))


def test_polynomial_kernel_dual_equals_explicit_primal(rng):
    X, y = rng.normal(size=(25, 2)), rng.normal(size=25)
    Xnew = rng.normal(size=(7, 2))
    fmap = PolynomialFeatures(degree=2, offset=1.0).fit(X)
    primal = fit_ridge_primal(fmap.transform(X), y, 0.05, feature_map=fmap)
    k = Kernel.polynomial(2, 1.0)
    dual = fit_ridge_dual(gram(k, X), y, 0.05, anchors=X, kernel=k)
    np.testing.assert_allclose(predict(primal, Xnew), predict(dual, Xnew), atol=1e-8)


def test_validation(rng):
    Phi = rng.normal(size=(5, 2))
    with pytest.raises(InvalidParameter):
        fit_ridge_primal(Phi, np.ones(5), 0.0)
    with pytest.raises(DimensionMismatch):
        fit_ridge_primal(Phi, np.ones(4), 1.0)
    with pytest.raises(InvalidParameter):
        predict(fit_ridge_dual(Phi @ Phi.T, np.ones(5), 1.0), Phi)


def test_default_lambda():
    assert default_lambda(100) == pytest.approx(0.1)


def test_kernel_ridge_estimator(rng):
    X = rng.uniform(-2, 2, size=(150, 1))
    y = np.sin(X[:, 0]) + 0.1 * rng.normal(size=150)
    est = KernelRidge(lam=1e-3).fit(X, y)
    grid = np.linspace(-1.5, 1.5, 20)[:, None]
    assert np.max(np.abs(est.predict(grid) - np.sin(grid[:, 0]))) < 0.15
    assert est.get_params()["kernel"] == "rbf"
    assert clone(est).get_params() == est.get_params()
    with pytest.raises(DimensionMismatch):
        est.predict(np.ones((2, 2)))
    with pytest.raises(InvalidParameter):
        KernelRidge(kernel="laplace").fit(X, y)
