"""Standardized feature batches and the empirical cross-correlation matrix.

Conventions used throughout the package:

* standardization is per column, (x - mean) / max(std, eps), with the
  population std (divide by n, not n - 1);
* all arithmetic is float64;
* a column whose std falls below eps is divided by eps instead and a
  DegenerateColumnWarning is emitted (training can transiently produce
  constant columns, so this is not fatal).

With both views standardized this way, every entry of C = X^T Y / n lies in
[-1, 1] by Cauchy-Schwarz.
"""

import warnings
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .errors import DegenerateColumnWarning, DimensionError, InvalidInputError

DEFAULT_EPS = 1e-8


def _as_matrix(data, what: str) -> np.ndarray:
    # Own a fresh copy so freezing it never mutates the caller's array.
    arr = np.array(data, dtype=np.float64, order="C")
    if arr.ndim != 2:
        raise DimensionError(f"{what} must be a 2-d matrix, got shape {arr.shape}")
    if not np.isfinite(arr).all():
        raise InvalidInputError(f"{what} contains non-finite entries")
    return arr


@dataclass(frozen=True)
class RawBatch:
    """An n x d matrix of raw (not yet standardized) features, n >= 2."""

    data: np.ndarray

    def __post_init__(self):
        arr = _as_matrix(self.data, "RawBatch")
        n, d = arr.shape
        if n < 2:
            raise InvalidInputError(f"need at least 2 samples, got {n}")
        if d < 1:
            raise InvalidInputError("need at least 1 feature column")
        arr.flags.writeable = False
        object.__setattr__(self, "data", arr)

    @property
    def n(self) -> int:
        return self.data.shape[0]

    @property
    def d(self) -> int:
        return self.data.shape[1]


@dataclass(frozen=True)
class FeatureBatch:
    """An n x d matrix whose columns have mean 0 and population std 1.

    Instances are produced by standardize(); the array is frozen so batches
    can be shared across threads.
    """

    data: np.ndarray

    def __post_init__(self):
        arr = _as_matrix(self.data, "FeatureBatch")
        if arr.shape[0] < 2:
            raise InvalidInputError("FeatureBatch needs at least 2 samples")
        arr.flags.writeable = False
        object.__setattr__(self, "data", arr)

    @property
    def n(self) -> int:
        return self.data.shape[0]

    @property
    def d(self) -> int:
        return self.data.shape[1]


@dataclass(frozen=True)
class CorrMatrix:
    """The d x d empirical cross-correlation C = X^T Y / n.

    Symmetry is NOT assumed: C is symmetric only for X = Y. For genuinely
    standardized inputs every entry is in [-1, 1] up to rounding; this is a
    documented invariant (checked by the test suite), not a constructor
    check, because perturbed matrices used for finite differencing may
    legitimately step slightly outside it.
    """

    c: np.ndarray
    n: int = field(default=0)

    def __post_init__(self):
        arr = _as_matrix(self.c, "CorrMatrix")
        arr.flags.writeable = False
        object.__setattr__(self, "c", arr)

    @property
    def d(self) -> int:
        return self.c.shape[0]


def standardize(raw, eps: float = DEFAULT_EPS) -> FeatureBatch:
    """Standardize each column to mean 0 / population std 1.

    ``raw`` may be a RawBatch, a FeatureBatch (idempotent up to rounding) or
    any array-like matrix. Columns with std < eps pass through the
    eps-guarded divisor and are reported via DegenerateColumnWarning.
    """
    if eps <= 0:
        raise InvalidInputError(f"eps must be positive, got {eps}")
    if isinstance(raw, (RawBatch, FeatureBatch)):
        arr = raw.data
    else:
        arr = RawBatch(raw).data
    z, _, sigma = _kernels.standardize_columns(arr, eps)
    degenerate = np.flatnonzero(sigma < eps)
    if degenerate.size:
        warnings.warn(DegenerateColumnWarning(degenerate), stacklevel=2)
    return FeatureBatch(z)


def cross_correlation(x: FeatureBatch, y: FeatureBatch) -> CorrMatrix:
    """Empirical cross-correlation C = X^T Y / n between two views."""
    if x.n != y.n:
        raise DimensionError(f"sample counts differ: {x.n} vs {y.n}")
    if x.d != y.d:
        raise DimensionError(f"feature dims differ: {x.d} vs {y.d}")
    c = _kernels.cross_correlation(x.data, y.data)
    return CorrMatrix(c, n=x.n)
