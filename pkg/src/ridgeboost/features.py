"""Feature maps and kernels that define the auditing RKHS.

Feature maps follow the scikit-learn transformer protocol (``fit`` /
``transform``) so they can be cloned, grid-searched and dropped into
pipelines. Kernels are small immutable value objects evaluated by
:func:`gram`.
"""

from dataclasses import dataclass
from itertools import combinations_with_replacement
from math import factorial

import numpy as np
from scipy.spatial.distance import cdist, pdist
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted, check_random_state

from .exceptions import DegenerateData, DimensionMismatch, InvalidParameter

_MEDIAN_SUBSAMPLE = 500


def median_heuristic_bandwidth(X):
    """Median pairwise Euclidean distance between rows of ``X``.

    At most 500 rows enter the computation; larger inputs are subsampled
    without replacement using a generator seeded with 0.
    """
    X = check_array(X, dtype=float)
    n = X.shape[0]
    if n < 2:
        raise InvalidParameter("median heuristic needs at least two rows")
    if n > _MEDIAN_SUBSAMPLE:
        idx = np.random.default_rng(0).choice(n, _MEDIAN_SUBSAMPLE, replace=False)
        X = X[np.sort(idx)]
    dists = pdist(X)
    positive = dists[dists > 0]
    if positive.size == 0:
        raise DegenerateData("all rows are identical; bandwidth is undefined")
    median = float(np.median(dists))
    # heavy duplication can put the median at zero while the data is not degenerate
    return median if median > 0 else float(np.median(positive))


def _check_input_dim(X, expected):
    X = check_array(X, dtype=float)
    if X.shape[1] != expected:
        raise DimensionMismatch(f"expected {expected} input columns, got {X.shape[1]}")
    return X


class IdentityFeatures(TransformerMixin, BaseEstimator):
    """phi(x) = x."""

    def fit(self, X, y=None):
        X = check_array(X, dtype=float)
        self.n_features_in_ = X.shape[1]
        self.n_output_features_ = X.shape[1]
        return self

    def transform(self, X):
        check_is_fitted(self, "n_features_in_")
        return _check_input_dim(X, self.n_features_in_).copy()


def _monomial_exponents(d, degree, include_bias):
    """Exponent vectors of every monomial of total degree <= ``degree``."""
    exps = []
    low = 0 if include_bias else 1
    for q in range(low, degree + 1):
        for combo in combinations_with_replacement(range(d), q):
            e = np.zeros(d, dtype=int)
            for j in combo:
                e[j] += 1
            exps.append(e)
    return np.array(exps, dtype=int).reshape(-1, d)


class PolynomialFeatures(TransformerMixin, BaseEstimator):
    """All monomials up to ``degree``.

    Parameters
    ----------
    degree : int, default=2
    include_bias : bool, default=True
        Keep the constant monomial.
    offset : float or None, default=None
        When ``None`` the monomials are unscaled. When a positive number
        ``c`` is given, the monomial ``x**k`` (with ``k0 = degree - |k|``)
        is multiplied by ``sqrt(multinomial(degree; k0, k) * c**k0)`` so that
        ``phi(a) @ phi(b) == (a @ b + c) ** degree`` exactly, i.e. the map is
        the explicit feature map of ``Kernel.polynomial(degree, c)``.
    """

    def __init__(self, degree=2, include_bias=True, offset=None):
        self.degree = degree
        self.include_bias = include_bias
        self.offset = offset

    def fit(self, X, y=None):
        X = check_array(X, dtype=float)
        if int(self.degree) < 1:
            raise InvalidParameter("degree must be >= 1")
        if self.offset is not None and self.offset < 0:
            raise InvalidParameter("offset must be non-negative")
        d = X.shape[1]
        include_bias = self.include_bias or (self.offset is not None and self.offset > 0)
        self.exponents_ = _monomial_exponents(d, int(self.degree), include_bias)
        if self.offset is None:
            self.scales_ = np.ones(len(self.exponents_))
        else:
            q = int(self.degree)
            scales = []
            for e in self.exponents_:
                k0 = q - int(e.sum())
                coef = factorial(q) / (factorial(k0) * np.prod([factorial(int(k)) for k in e]))
                scales.append(np.sqrt(coef * float(self.offset) ** k0))
            self.scales_ = np.array(scales)
        self.n_features_in_ = d
        self.n_output_features_ = len(self.exponents_)
        return self

    def transform(self, X):
        check_is_fitted(self, "exponents_")
        X = _check_input_dim(X, self.n_features_in_)
        out = np.ones((X.shape[0], len(self.exponents_)))
        for col, e in enumerate(self.exponents_):
            for j in np.flatnonzero(e):
                out[:, col] *= X[:, j] ** e[j]
        return out * self.scales_


class RandomFourierFeatures(TransformerMixin, BaseEstimator):
    """Random Fourier features for the Gaussian (RBF) kernel.

    ``phi(x) = sqrt(2 / D) * cos(W.T x + b)`` with ``W ~ N(0, 1 / bandwidth**2)``
    entrywise and ``b ~ Uniform[0, 2 pi)``, so that ``phi(x) @ phi(y)``
    approximates ``exp(-|x - y|**2 / (2 bandwidth**2))``.

    Parameters
    ----------
    n_components : int, default=200
        Output dimension D.
    bandwidth : float or "median", default="median"
        "median" applies :func:`median_heuristic_bandwidth` to the data seen
        in ``fit``.
    random_state : int, RandomState instance or None, default=0
    """

    def __init__(self, n_components=200, bandwidth="median", random_state=0):
        self.n_components = n_components
        self.bandwidth = bandwidth
        self.random_state = random_state

    def fit(self, X, y=None):
        X = check_array(X, dtype=float)
        if int(self.n_components) < 1:
            raise InvalidParameter("n_components must be >= 1")
        if isinstance(self.bandwidth, str):
            if self.bandwidth != "median":
                raise InvalidParameter(f"unknown bandwidth rule {self.bandwidth!r}")
            bw = median_heuristic_bandwidth(X)
        else:
            bw = float(self.bandwidth)
        if not bw > 0:
            raise InvalidParameter("bandwidth must be positive")
        rng = check_random_state(self.random_state)
        d, D = X.shape[1], int(self.n_components)
        self.bandwidth_ = bw
        self.frequencies_ = rng.normal(0.0, 1.0 / bw, size=(d, D))
        self.phases_ = rng.uniform(0.0, 2.0 * np.pi, size=D)
        self.n_features_in_ = d
        self.n_output_features_ = D
        return self

    def transform(self, X):
        check_is_fitted(self, "frequencies_")
        X = _check_input_dim(X, self.n_features_in_)
        return np.sqrt(2.0 / self.n_output_features_) * np.cos(X @ self.frequencies_ + self.phases_)


def sample_rff(bandwidth, input_dim, n_components, seed):
    """Draw a fitted :class:`RandomFourierFeatures` map without data."""
    if not bandwidth > 0:
        raise InvalidParameter("bandwidth must be positive")
    if n_components < 1 or input_dim < 1:
        raise InvalidParameter("dimensions must be positive")
    rff = RandomFourierFeatures(n_components=n_components, bandwidth=float(bandwidth), random_state=seed)
    return rff.fit(np.zeros((1, input_dim)))


@dataclass(frozen=True)
class Kernel:
    """A positive semidefinite kernel: ``linear``, ``polynomial`` or ``rbf``."""

    kind: str = "rbf"
    bandwidth: float = 1.0
    degree: int = 2
    offset: float = 1.0

    def __post_init__(self):
        if self.kind not in ("linear", "polynomial", "rbf"):
            raise InvalidParameter(f"unknown kernel kind {self.kind!r}")
        if self.kind == "rbf" and not self.bandwidth > 0:
            raise InvalidParameter("rbf bandwidth must be positive")
        if self.kind == "polynomial" and (self.degree < 1 or self.offset < 0):
            raise InvalidParameter("polynomial kernel needs degree >= 1 and offset >= 0")

    @classmethod
    def linear(cls):
        return cls(kind="linear")

    @classmethod
    def polynomial(cls, degree=2, offset=1.0):
        return cls(kind="polynomial", degree=int(degree), offset=float(offset))

    @classmethod
    def rbf(cls, bandwidth):
        return cls(kind="rbf", bandwidth=float(bandwidth))

    def explicit_map(self):
        """Unfitted feature map whose inner products equal this kernel, if one is finite."""
        if self.kind == "linear":
            return IdentityFeatures()
        if self.kind == "polynomial":
            return PolynomialFeatures(degree=self.degree, offset=self.offset)
        raise InvalidParameter("the rbf kernel has no finite explicit map; use RandomFourierFeatures")


def gram(kernel, A, B=None):
    """Kernel matrix with entries ``k(a_i, b_j)``."""
    A = check_array(A, dtype=float)
    B = A if B is None else check_array(B, dtype=float)
    if A.shape[1] != B.shape[1]:
        raise DimensionMismatch(f"column counts differ: {A.shape[1]} vs {B.shape[1]}")
    if kernel.kind == "linear":
        return A @ B.T
    if kernel.kind == "polynomial":
        return (A @ B.T + kernel.offset) ** kernel.degree
    sq = cdist(A, B, "sqeuclidean")
    return np.exp(-sq / (2.0 * kernel.bandwidth**2))
