"""Exception and warning types shared across the package."""


class HsicSslError(Exception):
    """Base class for all errors raised by this package."""


class InvalidInputError(HsicSslError, ValueError):
    """Input data violates a contract (non-finite values, bad ranges, ...)."""


class DimensionError(HsicSslError, ValueError):
    """Matrix shapes are incompatible with the requested operation."""


class ConfigError(HsicSslError, ValueError):
    """A run/sweep configuration failed validation; message names the field."""


class DegenerateBandwidthError(HsicSslError, ValueError):
    """Median-heuristic bandwidth collapsed to zero (all-identical rows)."""


class IngestionError(HsicSslError, ValueError):
    """CSV ingestion failed; message carries the offending file and row."""


class SplitError(HsicSslError, ValueError):
    """A train/eval split left some class without training samples."""


class DivergenceError(HsicSslError, RuntimeError):
    """Training produced non-finite weights."""

    def __init__(self, epoch: int):
        super().__init__(f"non-finite weights after epoch {epoch}")
        self.epoch = epoch


class CheckpointError(HsicSslError, ValueError):
    """A checkpoint file is unreadable or has the wrong version tag."""


class BackendError(HsicSslError, RuntimeError):
    """The requested kernel backend is unavailable."""


class DegenerateColumnWarning(UserWarning):
    """A feature column had (population) std below the eps guard.

    Carries the offending column indices in ``columns``.
    """

    def __init__(self, columns):
        self.columns = tuple(int(c) for c in columns)
        super().__init__(
            f"columns {list(self.columns)} have std below eps; "
            "standardization divided by eps instead"
        )
