import math

import numpy as np
import pytest
from scipy import integrate
from scipy.special import expit

from ridgeboost.exceptions import InvalidParameter
from ridgeboost.sim import (
    CSV_COLUMNS,
    FROZEN_TRUTH,
    DgpConfig,
    SimSettings,
    draw_dataset,
    regression_derivative,
    regression_function,
    run_monte_carlo,
    target_seed,
    true_average_derivative,
)


def quadrature_truth(mu):
    """Closed form up to one 1-d integral.

    With X1, X2 ~ N(mu, 1): E[sin X1 + X1 cos X1] = mu exp(-1/2) cos(mu) by
    Stein's identity, and E[X3] = 0 because X1 - X2 is symmetric about 0.
    """
    dens = lambda t: math.exp(-0.5 * (t - mu) ** 2) / math.sqrt(2 * math.pi)  # noqa: E731
    sig, _ = integrate.quad(lambda t: expit(t) * dens(t), -np.inf, np.inf, epsabs=1e-13)
    return 0.2 + mu * math.exp(-0.5) * math.cos(mu) + sig


def test_quadrature_at_zero_is_exact():
    assert quadrature_truth(0.0) == pytest.approx(0.7, abs=1e-12)


@pytest.mark.parametrize("mu", sorted(FROZEN_TRUTH))
def test_frozen_truth_matches_quadrature(mu):
    value, se = FROZEN_TRUTH[mu]
    assert se <= 1e-3
    assert abs(value - quadrature_truth(mu)) <= 4 * se


def test_oracle_rejects_small_draws():
    with pytest.raises(InvalidParameter):
        true_average_derivative(0.0, 10**5)


def test_derivative_matches_finite_difference(rng):
    X = rng.normal(size=(50, 3))
    h = 1e-6
    up, down = X.copy(), X.copy()
    up[:, 0] += h
    down[:, 0] -= h
    fd = (regression_function(up) - regression_function(down)) / (2 * h)
    np.testing.assert_allclose(regression_derivative(X), fd, atol=1e-6)


def test_draws_are_reproducible_and_shifted():
    a = draw_dataset(DgpConfig(1.0, 2000, 5))
    b = draw_dataset(DgpConfig(1.0, 2000, 5))
    np.testing.assert_array_equal(a.X, b.X)
    np.testing.assert_array_equal(a.y, b.y)
    assert abs(a.X[:, :2].mean() - 1.0) < 0.1
    assert abs(a.X[:, 2].mean()) < 0.15
    unlabeled = draw_dataset(DgpConfig(0.0, 10, 5), labeled=False)
    assert unlabeled.y is None and unlabeled.provenance == "target"
    with pytest.raises(InvalidParameter):
        DgpConfig(0.0, 1, 0)


def test_target_seeds_do_not_collide_with_source_seeds():
    seqs = {tuple(target_seed(0, r, k)) for r in range(50) for k in range(3)}
    assert len(seqs) == 150
    assert all(s[0] >= 2**31 for s in seqs)


def test_minimal_grid():
    rows = run_monte_carlo([50], [0.0], 1, settings=SimSettings(n_components=20))
    assert [r.method for r in rows] == ["naive", "boosted"]
    assert all(r.replications + r.failed == 1 for r in rows)
    assert set(vars(rows[0])) == set(CSV_COLUMNS)


def test_parallel_matches_serial():
    kw = dict(ns=[40, 60], mus=[-1.0, 1.0], replications=4, base_seed=3, settings=SimSettings(n_components=15))
    assert run_monte_carlo(n_jobs=1, **kw) == run_monte_carlo(n_jobs=2, **kw)


@pytest.mark.slow
def test_ci_width_scales_like_root_n():
    rows = run_monte_carlo([250, 500], [0.0], 100, base_seed=77)
    w = {r.n: r.mean_ci_width for r in rows if r.method == "boosted"}
    assert 0.6 <= w[500] / w[250] <= 0.82
