"""Kernel Gram matrices and the empirical dependence estimator.

The estimator is the biased statistic

    hsic(K_X, K_Y) = tr(K_X H K_Y H) / n^2,      H = I - (1/n) 1 1^T.

H is never materialized in the production path: H K H equals K with row and
column means subtracted (plus the grand mean added back), which is O(n^2)
instead of the O(n^3) literal matrix product. centering_matrix() exists so
tests can compare against the literal formula.

For the linear kernel on standardized features the estimator collapses to
the squared Frobenius norm of the cross-correlation matrix; see
hsic_linear_fast(). The RBF kernel is included as a generality check of the
kernel-generic estimator, not because the fast path uses it.
"""

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import DegenerateBandwidthError, DimensionError, InvalidInputError
from .features import CorrMatrix, FeatureBatch

# Test hook: added to every hsic_linear_fast() result. Verification tests
# set this to a nonzero value to prove the identity check actually fires.
_fast_path_bias = 0.0


@dataclass(frozen=True)
class KernelSpec:
    """Kernel choice for Gram computation.

    kind is "linear" or "rbf"; bandwidth applies to the RBF kernel only and
    None means the median heuristic (median pairwise Euclidean distance).
    """

    kind: str
    bandwidth: float | None = None

    def __post_init__(self):
        if self.kind not in ("linear", "rbf"):
            raise InvalidInputError(f"unknown kernel kind {self.kind!r}")
        if self.kind == "linear" and self.bandwidth is not None:
            raise InvalidInputError("linear kernel takes no bandwidth")
        if self.bandwidth is not None and not self.bandwidth > 0:
            raise InvalidInputError(f"bandwidth must be > 0, got {self.bandwidth}")

    @classmethod
    def linear(cls) -> "KernelSpec":
        return cls("linear")

    @classmethod
    def rbf(cls, bandwidth: float | None = None) -> "KernelSpec":
        return cls("rbf", bandwidth)


@dataclass(frozen=True)
class GramMatrix:
    """An n x n kernel Gram matrix plus the spec that produced it."""

    k: np.ndarray
    spec: KernelSpec

    def __post_init__(self):
        arr = np.ascontiguousarray(self.k, dtype=np.float64)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise DimensionError(f"Gram matrix must be square, got {arr.shape}")
        object.__setattr__(self, "k", arr)

    @property
    def n(self) -> int:
        return self.k.shape[0]


def centering_matrix(n: int) -> np.ndarray:
    """Dense H = I - (1/n) 1 1^T. Only for tests/verification; the
    production estimator centers by mean subtraction instead."""
    if n < 1:
        raise InvalidInputError(f"need n >= 1, got {n}")
    return np.eye(n) - np.full((n, n), 1.0 / n)


def median_bandwidth(x: np.ndarray) -> float:
    """Median pairwise Euclidean distance between rows.

    Raises DegenerateBandwidthError when the median is zero (at least half
    of the row pairs coincide), since exp(-d2 / (2 sigma^2)) is undefined.
    """
    d2 = _kernels.pairwise_sq_dists(x)
    iu = np.triu_indices(x.shape[0], k=1)
    med = float(np.median(np.sqrt(d2[iu])))
    if med <= 0.0:
        raise DegenerateBandwidthError(
            "median pairwise distance is 0; pass an explicit bandwidth")
    return med


def _batch_data(x) -> np.ndarray:
    if isinstance(x, FeatureBatch):
        return x.data
    arr = np.ascontiguousarray(x, dtype=np.float64)
    if arr.ndim != 2:
        raise DimensionError(f"expected an n x d matrix, got shape {arr.shape}")
    return arr


def gram(x, spec: KernelSpec) -> GramMatrix:
    """Gram matrix of a feature batch under the given kernel.

    Linear: K = X X^T. RBF: K_ab = exp(-||x_a - x_b||^2 / (2 sigma^2)) with
    sigma from the spec or the median heuristic.
    """
    data = _batch_data(x)
    if spec.kind == "linear":
        return GramMatrix(_kernels.gram_linear(data), spec)
    sigma = spec.bandwidth if spec.bandwidth is not None else median_bandwidth(data)
    d2 = _kernels.pairwise_sq_dists(data)
    return GramMatrix(_kernels.rbf_from_sq_dists(d2, sigma), spec)


def hsic_empirical(kx: GramMatrix, ky: GramMatrix) -> float:
    """Biased dependence estimate tr(K_X H K_Y H) / n^2 (>= 0 for PSD Grams)."""
    if kx.n != ky.n:
        raise DimensionError(f"Gram sizes differ: {kx.n} vs {ky.n}")
    kxc = _kernels.center_gram(kx.k)
    kyc = _kernels.center_gram(ky.k)
    return _kernels.hsic_trace_dot(kxc, kyc)


def hsic_linear_fast(x, y) -> float:
    """Linear-kernel fast path: ||C||_F^2 with C = X^T Y / n.

    For standardized (column mean zero) inputs this equals
    hsic_empirical(gram(x, linear), gram(y, linear)) exactly in real
    arithmetic; the equivalence at 1e-9 relative tolerance is enforced by
    the verification suite.
    """
    xd = _batch_data(x)
    yd = _batch_data(y)
    if xd.shape != yd.shape:
        raise DimensionError(f"shapes differ: {xd.shape} vs {yd.shape}")
    c = _kernels.cross_correlation(xd, yd)
    return float((c * c).sum()) + _fast_path_bias


def frobenius_sq(c: CorrMatrix | np.ndarray) -> float:
    """Squared Frobenius norm of a correlation matrix."""
    arr = c.c if isinstance(c, CorrMatrix) else np.asarray(c, dtype=np.float64)
    return float((arr * arr).sum())
