"""Empirical linear functionals as weighted anchor sets.

A functional is stored as anchors ``u_s`` and weights ``w_s`` with
``theta(f) = sum_s w_s f(u_s)``. Each anchor also belongs to an evaluation
unit (a target row, or a row whose derivative is differenced) so that the
per-unit contributions needed for standard errors can be recovered.
"""

from dataclasses import dataclass, field

import numpy as np

from .exceptions import DimensionMismatch, EmptyData, EvaluationFailure, InvalidParameter


@dataclass(frozen=True)
class LinearFunctional:
    """``theta(f) = sum_s weights[s] * f(anchors[s])``.

    ``units[s]`` is the evaluation unit of anchor ``s``. The contribution of
    unit ``u`` is ``n_units * sum_{s in u} w_s f(u_s)`` so that ``theta(f)``
    is the plain mean of the contributions.
    """

    anchors: np.ndarray
    weights: np.ndarray
    label: str = "functional"
    units: np.ndarray = field(default=None)

    def __post_init__(self):
        anchors = np.atleast_2d(np.asarray(self.anchors, dtype=float))
        weights = np.asarray(self.weights, dtype=float).ravel()
        if anchors.shape[0] < 1:
            raise EmptyData("a functional needs at least one anchor")
        if weights.shape[0] != anchors.shape[0]:
            raise DimensionMismatch(f"{anchors.shape[0]} anchors but {weights.shape[0]} weights")
        if not np.all(np.isfinite(weights)) or not np.all(np.isfinite(anchors)):
            raise InvalidParameter("anchors and weights must be finite")
        units = np.arange(anchors.shape[0]) if self.units is None else np.asarray(self.units, dtype=int).ravel()
        if units.shape[0] != anchors.shape[0]:
            raise DimensionMismatch("one unit index per anchor is required")
        _, units = np.unique(units, return_inverse=True)
        object.__setattr__(self, "anchors", anchors)
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "units", units.ravel())

    @property
    def n_units(self):
        return int(self.units.max()) + 1

    @property
    def input_dim(self):
        return self.anchors.shape[1]

    def __call__(self, f):
        return eval_functional(self, f)


@dataclass(frozen=True)
class DiffSpec:
    """Symmetric difference along ``coordinate`` with step ``step``."""

    coordinate: int
    step: float

    def __post_init__(self):
        if not self.step > 0:
            raise InvalidParameter("differencing step must be positive")
        if self.coordinate < 0:
            raise InvalidParameter("coordinate must be non-negative")


def _as_rows(X):
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if X.shape[0] < 1:
        raise EmptyData("no evaluation rows")
    return X


def missing_mean_functional(X_target, label="missing_mean"):
    """Mean of ``f`` over the target rows."""
    X = _as_rows(X_target)
    n = X.shape[0]
    return LinearFunctional(X.copy(), np.full(n, 1.0 / n), label=label)


def default_step(X_eval, coordinate):
    """0.1 times the sample standard deviation of the differenced coordinate."""
    X = _as_rows(X_eval)
    sd = float(np.std(X[:, coordinate], ddof=1)) if X.shape[0] > 1 else 0.0
    return 0.1 * sd if sd > 0 else 0.1


def average_derivative_functional(X_eval, spec, label=None):
    """Average symmetric difference quotient of ``f`` along one coordinate.

    ``spec`` is a :class:`DiffSpec` or an integer coordinate, in which case
    the step defaults to :func:`default_step`.
    """
    X = _as_rows(X_eval)
    if not isinstance(spec, DiffSpec):
        spec = DiffSpec(int(spec), default_step(X, int(spec)))
    j, h = spec.coordinate, spec.step
    if j >= X.shape[1]:
        raise InvalidParameter(f"coordinate {j} out of range for {X.shape[1]} columns")
    n = X.shape[0]
    up, down = X.copy(), X.copy()
    up[:, j] += h
    down[:, j] -= h
    w = 1.0 / (2.0 * h * n)
    idx = np.arange(n)
    return LinearFunctional(
        np.vstack([up, down]),
        np.concatenate([np.full(n, w), np.full(n, -w)]),
        label=label or f"avg_derivative(j={j})",
        units=np.concatenate([idx, idx]),
    )


def counterfactual_mean_functional(X, coordinate, value, label=None):
    """Mean of ``f`` after setting ``coordinate`` to ``value`` in every row."""
    X = _as_rows(X)
    if not 0 <= coordinate < X.shape[1]:
        raise InvalidParameter(f"coordinate {coordinate} out of range for {X.shape[1]} columns")
    U = X.copy()
    U[:, coordinate] = value
    n = X.shape[0]
    return LinearFunctional(U, np.full(n, 1.0 / n), label=label or f"counterfactual(j={coordinate},a={value:g})")


def _evaluate(f, U):
    fn = f.predict if hasattr(f, "predict") else f
    try:
        vals = np.asarray(fn(U), dtype=float).ravel()
    except Exception as exc:  # noqa: BLE001 - any predictor failure is reported uniformly
        raise EvaluationFailure(f"predictor failed on {U.shape[0]} anchor rows: {exc}") from exc
    if vals.shape[0] != U.shape[0]:
        raise EvaluationFailure(f"predictor returned {vals.shape[0]} values for {U.shape[0]} rows")
    return vals


def unit_contributions(theta, f):
    """Per-unit contributions whose mean is ``theta(f)``."""
    vals = theta.weights * _evaluate(f, theta.anchors)
    return theta.n_units * np.bincount(theta.units, weights=vals, minlength=theta.n_units)


def eval_functional(theta, f):
    """``sum_s w_s f(u_s)`` for a callable or an object with ``predict``."""
    return float(theta.weights @ _evaluate(f, theta.anchors))


def functional_on_features(theta, feature_map):
    """Apply ``theta`` coordinatewise to a feature map: ``sum_s w_s phi(u_s)``."""
    fn = feature_map.transform if hasattr(feature_map, "transform") else feature_map
    if getattr(feature_map, "n_features_in_", theta.input_dim) != theta.input_dim:
        raise DimensionMismatch(f"feature map expects {feature_map.n_features_in_} inputs, anchors have {theta.input_dim}")
    Phi = np.asarray(fn(theta.anchors), dtype=float)
    return theta.weights @ Phi
