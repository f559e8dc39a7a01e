"""Seeded synthetic two-view datasets and CSV ingestion.

A sample is drawn as: class label c, latent point z near the class center,
then one shared random linear embedding of z into the input space; each
view applies its own independent augmentation (rotation in a random
coordinate plane, scale jitter, additive Gaussian noise, coordinate
dropout) to that embedded point. Vector data stands in for augmented
images; the losses never look at the input modality.

Randomness uses the Philox counter-based generator. Each sample owns a
substream keyed by its index, so regenerating with a larger N leaves
earlier samples bit-identical, and the whole dataset is reproducible from
(seed, config) alone.
"""

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ConfigError, IngestionError

# Philox stream tags. Samples use their own index; dataset-level draws sit
# at the top of the key space, far above any sample count.
_TAG_CENTERS = (1 << 64) - 1
_TAG_EMBED = (1 << 64) - 2


def _stream(seed: int, tag: int) -> np.random.Generator:
    key = np.array([seed, tag], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


@dataclass(frozen=True)
class AugmentSpec:
    """Per-view augmentation strengths; all-zeros means identical views."""

    noise_std: float = 0.5
    rotation_max_angle: float = 0.3
    coord_dropout_prob: float = 0.05
    scale_jitter: float = 0.1

    def __post_init__(self):
        if self.noise_std < 0:
            raise ConfigError(f"noise_std must be >= 0, got {self.noise_std}")
        if self.rotation_max_angle < 0:
            raise ConfigError(
                f"rotation_max_angle must be >= 0, got {self.rotation_max_angle}")
        if not 0 <= self.coord_dropout_prob < 1:
            raise ConfigError(
                f"coord_dropout_prob must be in [0, 1), got {self.coord_dropout_prob}")
        if self.scale_jitter < 0:
            raise ConfigError(f"scale_jitter must be >= 0, got {self.scale_jitter}")


@dataclass(frozen=True)
class GenConfig:
    """Full generator parameterization (everything but the seed)."""

    classes: int
    samples: int
    latent_dim: int
    input_dim: int
    augment: AugmentSpec = field(default_factory=AugmentSpec)
    center_scale: float = 3.0
    latent_noise_std: float = 1.5

    def __post_init__(self):
        if self.classes < 2:
            raise ConfigError(f"classes must be >= 2, got {self.classes}")
        if self.samples < 2 * self.classes:
            raise ConfigError(
                f"samples must be >= 2 * classes, got {self.samples}")
        if self.latent_dim < 1:
            raise ConfigError(f"latent_dim must be >= 1, got {self.latent_dim}")
        if self.input_dim < self.latent_dim:
            raise ConfigError(
                f"input_dim must be >= latent_dim, got {self.input_dim}")
        if self.center_scale <= 0 or self.latent_noise_std < 0:
            raise ConfigError("center_scale must be > 0 and latent_noise_std >= 0")


@dataclass(frozen=True)
class TwoViewDataset:
    """Two augmented views of the same samples, plus integer labels.

    seed/gen_config are None for datasets loaded from CSV; labels may be
    None (unlabeled data cannot feed the linear probe). The constructor
    takes ownership of the arrays and freezes them.
    """

    view_a: np.ndarray
    view_b: np.ndarray
    labels: np.ndarray | None
    seed: int | None = None
    gen_config: GenConfig | None = None

    def __post_init__(self):
        if self.view_a.shape != self.view_b.shape:
            raise ConfigError(
                f"view shapes differ: {self.view_a.shape} vs {self.view_b.shape}")
        if self.labels is not None and len(self.labels) != len(self.view_a):
            raise ConfigError(
                f"label count {len(self.labels)} != sample count {len(self.view_a)}")
        for arr in (self.view_a, self.view_b):
            arr.flags.writeable = False
        if self.labels is not None:
            self.labels.flags.writeable = False

    def __len__(self) -> int:
        return self.view_a.shape[0]

    @property
    def input_dim(self) -> int:
        return self.view_a.shape[1]

    @property
    def num_classes(self) -> int:
        if self.labels is None:
            raise ConfigError("dataset is unlabeled")
        if self.gen_config is not None:
            return self.gen_config.classes
        return int(self.labels.max()) + 1


def _augment(v: np.ndarray, rng: np.random.Generator, spec: AugmentSpec) -> np.ndarray:
    out = v.copy()
    p = out.shape[0]
    if p >= 2:
        i, j = rng.choice(p, size=2, replace=False)
        angle = rng.uniform(-spec.rotation_max_angle, spec.rotation_max_angle)
        ca, sa = math.cos(angle), math.sin(angle)
        vi, vj = out[i], out[j]
        out[i] = vi * ca - vj * sa
        out[j] = vi * sa + vj * ca
    out *= 1.0 + rng.uniform(-spec.scale_jitter, spec.scale_jitter)
    out += spec.noise_std * rng.standard_normal(p)
    out[rng.random(p) < spec.coord_dropout_prob] = 0.0
    return out


def generate(classes: int, samples: int, latent_dim: int, input_dim: int,
             spec: AugmentSpec, seed: int, *, center_scale: float = 3.0,
             latent_noise_std: float = 1.5) -> TwoViewDataset:
    """Draw a seeded two-view dataset; bit-identical for equal (seed, config)."""
    cfg = GenConfig(classes, samples, latent_dim, input_dim, spec,
                    center_scale, latent_noise_std)
    return generate_from_config(cfg, seed)


def generate_from_config(cfg: GenConfig, seed: int) -> TwoViewDataset:
    centers = _stream(seed, _TAG_CENTERS).normal(
        scale=cfg.center_scale, size=(cfg.classes, cfg.latent_dim))
    embed = _stream(seed, _TAG_EMBED).normal(
        scale=1.0 / math.sqrt(cfg.latent_dim),
        size=(cfg.latent_dim, cfg.input_dim))

    view_a = np.empty((cfg.samples, cfg.input_dim))
    view_b = np.empty((cfg.samples, cfg.input_dim))
    labels = np.empty(cfg.samples, dtype=np.int64)
    for i in range(cfg.samples):
        rng = _stream(seed, i)
        c = int(rng.integers(cfg.classes))
        z = centers[c] + cfg.latent_noise_std * rng.standard_normal(cfg.latent_dim)
        base = z @ embed
        view_a[i] = _augment(base, rng, cfg.augment)
        view_b[i] = _augment(base, rng, cfg.augment)
        labels[i] = c
    return TwoViewDataset(view_a, view_b, labels, seed=seed, gen_config=cfg)


# ---------------------------------------------------------------------------
# CSV conventions: comma separator, '.' decimal point, one header row,
# UTF-8, LF line endings. Floats are written with shortest round-trip repr,
# so export -> load is bit-exact.
# ---------------------------------------------------------------------------

def write_matrix_csv(path, matrix: np.ndarray, prefix: str = "f") -> None:
    matrix = np.asarray(matrix, dtype=np.float64)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(f"{prefix}{j}" for j in range(matrix.shape[1])) + "\n")
        for row in matrix:
            fh.write(",".join(repr(float(v)) for v in row) + "\n")


def write_labels_csv(path, labels: np.ndarray) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("label\n")
        for v in labels:
            fh.write(f"{int(v)}\n")


def export_dataset(ds: TwoViewDataset, out_dir) -> dict[str, Path]:
    """Write view_a.csv / view_b.csv (and labels.csv if labeled)."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {"view_a": out / "view_a.csv", "view_b": out / "view_b.csv"}
    write_matrix_csv(paths["view_a"], ds.view_a)
    write_matrix_csv(paths["view_b"], ds.view_b)
    if ds.labels is not None:
        paths["labels"] = out / "labels.csv"
        write_labels_csv(paths["labels"], ds.labels)
    return paths


def load_matrix_csv(path) -> np.ndarray:
    path = Path(path)
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise IngestionError(f"{path}: {exc}") from exc
    if not lines:
        raise IngestionError(f"{path}: empty file (missing header)")
    width = len(lines[0].split(","))
    rows = []
    for idx, line in enumerate(lines[1:], start=2):
        parts = line.split(",")
        if len(parts) != width:
            raise IngestionError(
                f"{path}: row {idx} has {len(parts)} fields, expected {width}")
        try:
            row = [float(p) for p in parts]
        except ValueError as exc:
            raise IngestionError(f"{path}: row {idx}: {exc}") from exc
        if not all(math.isfinite(v) for v in row):
            raise IngestionError(f"{path}: row {idx} contains non-finite values")
        rows.append(row)
    if not rows:
        raise IngestionError(f"{path}: no data rows")
    return np.array(rows, dtype=np.float64)


def load_labels_csv(path) -> np.ndarray:
    path = Path(path)
    lines = path.read_text(encoding="utf-8").splitlines()
    if not lines:
        raise IngestionError(f"{path}: empty file (missing header)")
    labels = []
    for idx, line in enumerate(lines[1:], start=2):
        try:
            labels.append(int(line.strip()))
        except ValueError as exc:
            raise IngestionError(f"{path}: row {idx}: {exc}") from exc
        if labels[-1] < 0:
            raise IngestionError(f"{path}: row {idx}: negative label")
    return np.array(labels, dtype=np.int64)


def load_paired_csv(path_a, path_b, path_labels=None) -> TwoViewDataset:
    """Load externally supplied paired views (labels optional)."""
    view_a = load_matrix_csv(path_a)
    view_b = load_matrix_csv(path_b)
    if view_a.shape[0] != view_b.shape[0]:
        raise IngestionError(
            f"row counts differ: {path_a} has {view_a.shape[0]}, "
            f"{path_b} has {view_b.shape[0]}")
    if view_a.shape[1] != view_b.shape[1]:
        raise IngestionError(
            f"column counts differ: {path_a} has {view_a.shape[1]}, "
            f"{path_b} has {view_b.shape[1]}")
    labels = None
    if path_labels is not None:
        labels = load_labels_csv(path_labels)
        if len(labels) != view_a.shape[0]:
            raise IngestionError(
                f"row counts differ: views have {view_a.shape[0]} rows, "
                f"{path_labels} has {len(labels)}")
    return TwoViewDataset(view_a, view_b, labels)
