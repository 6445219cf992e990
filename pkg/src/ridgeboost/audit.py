"""Sample multiaccuracy error over the unit ball of the feature RKHS.

For the unit ball ``{h = phi.T b : |b| <= 1}`` the supremum of
``|(1/n) sum_i h(x_i) r_i|`` is the dual norm ``|Phi.T r| / n``. One ridge
boosting step maps ``Phi.T r / n`` to ``lam (M + lam I)^{-1} Phi.T r / n``,
which shrinks it by at least ``max_j lam / (lam + s_j)`` where ``s_j`` are
the eigenvalues of ``M = Phi.T Phi / n``.
"""

from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from ._linalg import sym_eigenvalues
from .exceptions import DimensionMismatch, EmptyData
from .features import gram
from .regress import _check_lambda, second_moment


def sample_mae(Phi, residuals):
    """``|Phi.T residuals| / n`` (unsquared)."""
    Phi = np.atleast_2d(np.asarray(Phi, dtype=float))
    r = np.asarray(residuals, dtype=float).ravel()
    if Phi.shape[0] != r.shape[0]:
        raise DimensionMismatch(f"Phi has {Phi.shape[0]} rows, residuals have {r.shape[0]}")
    if r.shape[0] == 0:
        raise EmptyData("no rows")
    return float(np.linalg.norm(Phi.T @ r) / r.shape[0])


def moment_eigenvalues(Phi):
    return sym_eigenvalues(second_moment(Phi))


def contraction_factor(Phi, lam, eigenvalues=None):
    """``max_j lam / (lam + s_j)`` over the eigenvalues of ``Phi.T Phi / n``."""
    lam = _check_lambda(lam)
    ev = moment_eigenvalues(Phi) if eigenvalues is None else np.asarray(eigenvalues, dtype=float)
    smallest = max(float(ev.min()), 0.0)
    return lam / (lam + smallest)


@dataclass
class MaeReport:
    mae_init: float
    mae_boosted: float
    contraction_factor: float
    eigenvalues: List[float] = field(repr=False)
    holdout_mae: Optional[float] = None
    holdout_mae_init: Optional[float] = None

    @property
    def passed(self):
        """Whether the one-step contraction bound holds (with 1e-10 slack)."""
        return self.mae_boosted <= self.contraction_factor * self.mae_init * (1 + 1e-10) + 1e-300


def _rkhs_mae(model, X, r):
    if model.kernel_ is None:
        return sample_mae(model.transform_features(X), r)
    K = gram(model.kernel_, model._scale(X))
    return float(np.sqrt(max(r @ K @ r, 0.0)) / r.shape[0])


def _holdout_arrays(X_holdout, Y_holdout):
    X = np.atleast_2d(np.asarray(X_holdout, dtype=float))
    Y = np.asarray(Y_holdout, dtype=float).ravel()
    if X.shape[0] == 0:
        raise EmptyData("holdout sample is empty")
    if X.shape[0] != Y.shape[0]:
        raise DimensionMismatch(f"holdout has {X.shape[0]} rows but {Y.shape[0]} outcomes")
    return X, Y


def holdout_mae(model, X_holdout, Y_holdout, stage="boosted"):
    """Sample MAE of a fitted :class:`~ridgeboost.RidgeBooster` on held-out rows.

    ``stage="init"`` measures the initial predictor instead.
    """
    X, Y = _holdout_arrays(X_holdout, Y_holdout)
    pred = model.predict_init(X) if stage == "init" else model.predict(X)
    return _rkhs_mae(model, X, Y - pred)


def audit(model, X_holdout=None, Y_holdout=None):
    """Build a :class:`MaeReport` for a fitted booster."""
    ev = model.moment_eigenvalues_
    report = MaeReport(
        mae_init=model.mae_init_,
        mae_boosted=model.mae_boosted_,
        contraction_factor=contraction_factor(None, model.lam_, eigenvalues=ev),
        eigenvalues=[float(v) for v in ev],
    )
    if X_holdout is not None:
        report.holdout_mae = holdout_mae(model, X_holdout, Y_holdout)
        report.holdout_mae_init = holdout_mae(model, X_holdout, Y_holdout, stage="init")
    return report
