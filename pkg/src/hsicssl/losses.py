"""The two redundancy-reduction objectives and their analytic gradients.

Both losses act on the cross-correlation matrix C = X^T Y / n of two
standardized views and share the on-diagonal term:

    barlow_twins:  sum_i (1 - C_ii)^2  +  lam * sum_{i != j} C_ij^2
    hsic_ssl:      sum_i (1 - C_ii)^2  +  lam * sum_{i != j} (1 + C_ij)^2

barlow_twins drives off-diagonal correlations to 0; hsic_ssl drives them to
-1, which keeps ||C||_F^2 maximal while excluding the all-ones solution
(C_ij = 1 everywhere maximizes ||C||_F^2 but means every feature dimension
is a copy of every other).

The default trade-off weight is lam = 1/d, balancing the d on-diagonal
terms against the d*(d-1) off-diagonal ones; 0.005 (the grid-searched value
common for barlow_twins) can be passed explicitly.

squared_view_distance() implements the alignment identity

    ||X - Y||_F^2 = 2*n*d - 2*n*tr(C)

which holds for unit-population-std columns (tr(X^T X) = n*d). Note the
variant "2d - 2n tr(C)" seen with unit-NORM columns does not apply here;
under our standardization it fails the X = Y => 0 sanity check.
"""

import enum
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import DimensionError, InvalidInputError
from .features import DEFAULT_EPS, CorrMatrix, FeatureBatch


class LossKind(enum.Enum):
    BARLOW_TWINS = "barlow_twins"
    HSIC_SSL = "hsic_ssl"

    @classmethod
    def parse(cls, name: str) -> "LossKind":
        try:
            return cls(name.strip().lower())
        except ValueError:
            raise InvalidInputError(
                f"unknown loss {name!r}; use barlow_twins or hsic_ssl") from None


class LambdaOrigin(enum.Enum):
    EXPLICIT = "explicit"
    ONE_OVER_D = "1/d"


@dataclass(frozen=True)
class Lambda:
    """Trade-off weight on the off-diagonal term."""

    value: float
    origin: LambdaOrigin = LambdaOrigin.EXPLICIT

    def __post_init__(self):
        if not self.value > 0:
            raise InvalidInputError(f"lambda must be > 0, got {self.value}")

    def check_dim(self, d: int) -> None:
        """A 1/d-derived lambda must match the dimension it is used with."""
        if self.origin is LambdaOrigin.ONE_OVER_D and self.value != 1.0 / d:
            raise InvalidInputError(
                f"lambda {self.value} tagged 1/d does not match d={d}")


def default_lambda(d: int) -> Lambda:
    """The balancing rule lam = 1/d."""
    if d < 1:
        raise InvalidInputError(f"d must be >= 1, got {d}")
    return Lambda(1.0 / d, LambdaOrigin.ONE_OVER_D)


@dataclass(frozen=True)
class LossTerms:
    total: float
    on_diag: float
    off_diag: float


@dataclass(frozen=True)
class LossReport:
    """Loss value, its decomposition, and gradients w.r.t. both views."""

    total: float
    on_diag: float
    off_diag: float
    grad_x: np.ndarray
    grad_y: np.ndarray


def _as_lambda(lam) -> Lambda:
    return lam if isinstance(lam, Lambda) else Lambda(float(lam))


def _square_corr(c) -> np.ndarray:
    arr = c.c if isinstance(c, CorrMatrix) else np.ascontiguousarray(c, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise DimensionError(f"correlation matrix must be square, got {arr.shape}")
    return arr


def _loss_terms(c: np.ndarray, lam: Lambda, kind: LossKind) -> LossTerms:
    lam.check_dim(c.shape[0])
    if kind is LossKind.HSIC_SSL:
        on, off = _kernels.hsic_ssl_loss_terms(c)
    else:
        on, off = _kernels.bt_loss_terms(c)
    return LossTerms(on + lam.value * off, on, off)


def barlow_twins_loss(c, lam) -> LossTerms:
    """On-diagonal pull to +1, off-diagonal pull to 0."""
    return _loss_terms(_square_corr(c), _as_lambda(lam), LossKind.BARLOW_TWINS)


def hsic_ssl_loss(c, lam) -> LossTerms:
    """On-diagonal pull to +1, off-diagonal pull to -1."""
    return _loss_terms(_square_corr(c), _as_lambda(lam), LossKind.HSIC_SSL)


def _view_matrix(v) -> np.ndarray:
    if isinstance(v, FeatureBatch):
        return v.data
    arr = np.ascontiguousarray(v, dtype=np.float64)
    if arr.ndim != 2:
        raise DimensionError(f"view must be an n x d matrix, got shape {arr.shape}")
    if not np.isfinite(arr).all():
        raise InvalidInputError("view contains non-finite entries")
    return arr


def loss_gradients(x, y, kind: LossKind, lam,
                   through_standardization: bool = True,
                   eps: float = DEFAULT_EPS) -> LossReport:
    """Loss value and exact analytic gradients w.r.t. the raw view matrices.

    The forward pass always standardizes both views (idempotent when they
    already are), computes C = X^T Y / n and the chosen loss. With
    through_standardization=True the returned gradients chain through the
    per-column batch mean/std, exactly as a normalization layer's backward
    would; with False they are the partial derivatives w.r.t. the
    standardized matrices themselves (the plain C-level chain rule).
    """
    kind = LossKind.parse(kind) if isinstance(kind, str) else kind
    lam = _as_lambda(lam)
    a = _view_matrix(x)
    b = _view_matrix(y)
    if a.shape != b.shape:
        raise DimensionError(f"view shapes differ: {a.shape} vs {b.shape}")
    n = a.shape[0]

    xs, _, sig_x = _kernels.standardize_columns(a, eps)
    ys, _, sig_y = _kernels.standardize_columns(b, eps)
    c = _kernels.cross_correlation(xs, ys)
    terms = _loss_terms(c, lam, kind)

    g = _kernels.loss_grad_wrt_corr(c, lam.value, kind is LossKind.HSIC_SSL)
    grad_x = (ys @ g.T) / n
    grad_y = (xs @ g) / n
    if through_standardization:
        grad_x = _kernels.standardize_backward(grad_x, xs, sig_x, eps)
        grad_y = _kernels.standardize_backward(grad_y, ys, sig_y, eps)
    return LossReport(terms.total, terms.on_diag, terms.off_diag, grad_x, grad_y)


def loss_value(x, y, kind: LossKind, lam, eps: float = DEFAULT_EPS) -> float:
    """Forward pass only (standardize both views, then the chosen loss).

    This is the scalar function whose gradient loss_gradients() returns
    with through_standardization=True; finite-difference checks difference
    this directly.
    """
    kind = LossKind.parse(kind) if isinstance(kind, str) else kind
    lam = _as_lambda(lam)
    a = _view_matrix(x)
    b = _view_matrix(y)
    if a.shape != b.shape:
        raise DimensionError(f"view shapes differ: {a.shape} vs {b.shape}")
    xs, _, _ = _kernels.standardize_columns(a, eps)
    ys, _, _ = _kernels.standardize_columns(b, eps)
    c = _kernels.cross_correlation(xs, ys)
    return _loss_terms(c, lam, kind).total


def squared_view_distance(x, y) -> tuple[float, float]:
    """||X - Y||_F^2 and its trace form 2*n*d - 2*n*tr(C).

    Views are standardized first (the identity requires unit-std columns).
    The two numbers are asserted to agree within 1e-8 relative; a violation
    means the inputs broke the standardization contract.
    """
    a = _view_matrix(x)
    b = _view_matrix(y)
    if a.shape != b.shape:
        raise DimensionError(f"view shapes differ: {a.shape} vs {b.shape}")
    n, d = a.shape
    xs, _, _ = _kernels.standardize_columns(a, DEFAULT_EPS)
    ys, _, _ = _kernels.standardize_columns(b, DEFAULT_EPS)
    diff = xs - ys
    dist = float((diff * diff).sum())
    trace_c = float(np.trace(_kernels.cross_correlation(xs, ys)))
    trace_identity_value = 2.0 * n * d - 2.0 * n * trace_c
    if abs(dist - trace_identity_value) > 1e-8 * (1.0 + dist):
        raise InvalidInputError(
            "squared-distance/trace identity violated; inputs are not "
            f"standardizable ({dist} vs {trace_identity_value})")
    return dist, trace_identity_value
