import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ridgeboost import RidgeBooster
from ridgeboost.audit import MaeReport, audit, contraction_factor, holdout_mae, moment_eigenvalues, sample_mae
from ridgeboost.exceptions import DimensionMismatch, EmptyData, InvalidParameter
from ridgeboost.regress import fit_ridge_primal


def test_sample_mae_is_dual_norm(rng):
    Phi, r = rng.normal(size=(30, 4)), rng.normal(size=30)
    value = sample_mae(Phi, r)
    assert value == pytest.approx(np.linalg.norm(Phi.T @ r) / 30)
    # no unit-ball direction beats the aligned one
    for _ in range(50):
        b = rng.normal(size=4)
        b /= np.linalg.norm(b)
        assert abs((Phi @ b) @ r / 30) <= value + 1e-15
    with pytest.raises(DimensionMismatch):
        sample_mae(Phi, r[:-1])
    with pytest.raises(EmptyData):
        sample_mae(np.empty((0, 2)), np.empty(0))


@settings(max_examples=60, deadline=None)
@given(
    n=st.integers(2, 80),
    D=st.integers(1, 12),
    lam=st.sampled_from([1e-3, 1e-1, 1.0, 10.0]),
    seed=st.integers(0, 2**32 - 1),
)
def test_one_step_contraction(n, D, lam, seed):
    r = np.random.default_rng(seed)
    Phi, resid = r.normal(size=(n, D)), r.normal(size=n)
    beta = fit_ridge_primal(Phi, resid, lam).beta
    before, after = sample_mae(Phi, resid), sample_mae(Phi, resid - Phi @ beta)
    assert after <= contraction_factor(Phi, lam) * before * (1 + 1e-10) + 1e-300


def test_contraction_factor_closed_form():
    Phi = np.diag([2.0, 1.0]) * np.sqrt(2)
    # Phi.T Phi / n = diag(4, 1)
    assert moment_eigenvalues(Phi) == pytest.approx([4.0, 1.0])
    assert contraction_factor(Phi, 1.0) == pytest.approx(0.5)
    with pytest.raises(InvalidParameter):
        contraction_factor(Phi, 0.0)


def test_report_flags():
    ok = MaeReport(1.0, 0.4, 0.5, [1.0])
    bad = MaeReport(1.0, 0.6, 0.5, [1.0])
    assert ok.passed and not bad.passed


@pytest.mark.parametrize("kernel", [None, "rbf"])
def test_audit_fitted_model(rng, kernel):
    X = rng.normal(size=(80, 2))
    y = X[:, 0] ** 2 + 0.1 * rng.normal(size=80)
    model = RidgeBooster(init="zero", kernel=kernel, n_components=30, lam=1e-2).fit(X, y)
    Xh = rng.normal(size=(40, 2))
    yh = Xh[:, 0] ** 2
    report = audit(model, Xh, yh)
    assert report.passed
    assert report.mae_boosted < report.mae_init
    assert report.holdout_mae == pytest.approx(holdout_mae(model, Xh, yh))
    assert report.holdout_mae < report.holdout_mae_init


def test_tiny_lambda_on_training_rows_drives_mae_to_zero(rng):
    X = rng.normal(size=(60, 2))
    y = np.sin(X[:, 0]) + rng.normal(size=60)
    model = RidgeBooster(n_components=20, lam=1e-10).fit(X, y)
    report = audit(model, X, y)
    assert report.passed
    assert report.mae_boosted < 1e-4 * report.mae_init
    assert report.holdout_mae == pytest.approx(report.mae_boosted, abs=1e-12)
