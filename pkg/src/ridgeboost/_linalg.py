"""Dense symmetric linear algebra: jittered Cholesky solves and eigenvalues."""

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .exceptions import DimensionMismatch, NoConvergence, NotFactorizable, NotSymmetric

_SYM_RTOL = 1e-10
_MAX_RETRIES = 6


def _check_symmetric(A):
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise NotSymmetric(f"expected a square matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise NotSymmetric("matrix has non-finite entries")
    scale = max(np.abs(A).max(initial=0.0), 1.0)
    if np.abs(A - A.T).max(initial=0.0) > _SYM_RTOL * scale:
        raise NotSymmetric("matrix is not symmetric within 1e-10 relative")
    return A


@dataclass(frozen=True)
class SpdFactorization:
    """Lower Cholesky factor of ``A + jitter_used * I``."""

    factor: np.ndarray
    jitter_used: float

    @property
    def size(self):
        return self.factor.shape[0]

    def reconstruct(self):
        return self.factor @ self.factor.T


def factor_spd(A, jitter_floor=0.0):
    """Cholesky-factor a symmetric matrix, adding diagonal jitter on failure.

    The first attempt uses ``jitter_floor``. Each retry multiplies the jitter
    by 10 (starting from ``max(jitter_floor, 1e-11 * trace/n)``), for at most
    six retries, and never beyond ``1e-6 * trace/n``.

    Raises
    ------
    NotSymmetric
        If ``A`` is not square, finite and symmetric.
    NotFactorizable
        If no admissible jitter yields a positive definite matrix.
    """
    A = _check_symmetric(A)
    if jitter_floor < 0:
        raise ValueError("jitter_floor must be non-negative")
    n = A.shape[0]
    A = 0.5 * (A + A.T)
    ceiling = 1e-6 * max(float(np.trace(A)) / max(n, 1), 0.0)
    for jitter in _jitter_schedule(float(jitter_floor), ceiling):
        try:
            L = scipy.linalg.cholesky(A + jitter * np.eye(n), lower=True, check_finite=False)
        except np.linalg.LinAlgError:
            continue
        return SpdFactorization(factor=L, jitter_used=jitter)
    raise NotFactorizable(f"matrix of size {n} is not positive definite within jitter {ceiling:.3g}")


def _jitter_schedule(floor, ceiling):
    yield floor
    jitter = max(floor, ceiling * 10.0 ** (1 - _MAX_RETRIES))
    if jitter <= 0:
        return
    for _ in range(_MAX_RETRIES):
        if jitter > ceiling * (1 + 1e-12) and jitter > floor:
            return
        if jitter > floor:
            yield jitter
        jitter *= 10.0


def solve_spd(F, B):
    """Solve ``(A + jitter I) X = B`` given a factorization of ``A``."""
    B = np.asarray(B, dtype=float)
    if B.shape[0] != F.size:
        raise DimensionMismatch(f"factor has size {F.size}, right-hand side has {B.shape[0]} rows")
    return scipy.linalg.cho_solve((F.factor, True), B, check_finite=False)


def sym_eigenvalues(A):
    """Eigenvalues of a symmetric matrix in descending order."""
    A = _check_symmetric(A)
    try:
        w = np.linalg.eigvalsh(0.5 * (A + A.T))
    except np.linalg.LinAlgError as exc:
        raise NoConvergence(str(exc)) from exc
    return w[::-1].copy()
