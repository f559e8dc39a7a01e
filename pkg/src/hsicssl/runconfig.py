"""Flat key=value run configuration.

A config file is UTF-8 text, one `key = value` per line; blank lines and
lines starting with '#' are ignored. Every key has a default, so an empty
file is a valid (default) run. Unknown keys are rejected by name.

Keys and defaults (see README for the full schema):

    classes=4 samples=2560 latent_dim=8 input_dim=32
    noise_std=0.5 rotation_max_angle=0.3 coord_dropout_prob=0.05
    scale_jitter=0.1 center_scale=3.0 latent_noise_std=1.5
    encoder_hidden=64,32 projector_hidden=32 projector_dim=8
    activation=relu
    loss=barlow_twins lambda=1/d batch_size=64 epochs=50
    learning_rate=0.05 momentum=0.9
    train_fraction=0.8 probe_epochs=300
    seed=1 [data_seed init_seed train_seed probe_seed]

`lambda` is either the literal string 1/d (resolved against
projector_dim) or an explicit positive number. The four component seeds
default to seed+0..seed+3 and may be pinned individually.
"""

from dataclasses import dataclass, fields, replace
from pathlib import Path

from .errors import ConfigError
from .losses import Lambda, LossKind, default_lambda
from .synthgen import AugmentSpec, GenConfig
from .trainer import EncoderConfig, TrainConfig


@dataclass(frozen=True)
class RunConfig:
    classes: int = 4
    samples: int = 2560
    latent_dim: int = 8
    input_dim: int = 32
    noise_std: float = 0.5
    rotation_max_angle: float = 0.3
    coord_dropout_prob: float = 0.05
    scale_jitter: float = 0.1
    center_scale: float = 3.0
    latent_noise_std: float = 1.5
    encoder_hidden: tuple = (64, 32)
    projector_hidden: tuple = (32,)
    projector_dim: int = 8
    activation: str = "relu"
    loss: str = "barlow_twins"
    lam: str = "1/d"          # config key: lambda
    batch_size: int = 64
    epochs: int = 50
    learning_rate: float = 0.05
    momentum: float = 0.9
    train_fraction: float = 0.8
    probe_epochs: int = 300
    seed: int = 1
    data_seed: int | None = None
    init_seed: int | None = None
    train_seed: int | None = None
    probe_seed: int | None = None

    def __post_init__(self):
        LossKind.parse(self.loss)
        self.lam_value()  # validates the lambda syntax eagerly
        for name in ("seed", "data_seed", "init_seed", "train_seed", "probe_seed"):
            v = getattr(self, name)
            if v is not None and v < 0:
                raise ConfigError(f"{name} must be >= 0, got {v}")

    # resolved component seeds -------------------------------------------
    @property
    def data_seed_(self) -> int:
        return self.seed if self.data_seed is None else self.data_seed

    @property
    def init_seed_(self) -> int:
        return self.seed + 1 if self.init_seed is None else self.init_seed

    @property
    def train_seed_(self) -> int:
        return self.seed + 2 if self.train_seed is None else self.train_seed

    @property
    def probe_seed_(self) -> int:
        return self.seed + 3 if self.probe_seed is None else self.probe_seed

    # sub-configs ----------------------------------------------------------
    def lam_value(self) -> float:
        raw = self.lam.strip()
        if raw == "1/d":
            return 1.0 / self.projector_dim
        try:
            value = float(raw)
        except ValueError:
            raise ConfigError(
                f"lambda must be '1/d' or a positive number, got {raw!r}") from None
        if value <= 0:
            raise ConfigError(f"lambda must be > 0, got {value}")
        return value

    def lam_obj(self) -> Lambda:
        if self.lam.strip() == "1/d":
            return default_lambda(self.projector_dim)
        return Lambda(self.lam_value())

    def gen_config(self) -> GenConfig:
        aug = AugmentSpec(self.noise_std, self.rotation_max_angle,
                          self.coord_dropout_prob, self.scale_jitter)
        return GenConfig(self.classes, self.samples, self.latent_dim,
                         self.input_dim, aug, self.center_scale,
                         self.latent_noise_std)

    def encoder_config(self) -> EncoderConfig:
        enc_widths = (self.input_dim,) + self.encoder_hidden
        proj_widths = (enc_widths[-1],) + self.projector_hidden + (self.projector_dim,)
        return EncoderConfig(enc_widths, proj_widths, self.activation,
                             self.init_seed_)

    def train_config(self) -> TrainConfig:
        return TrainConfig(LossKind.parse(self.loss), self.lam_obj(),
                           self.batch_size, self.epochs, self.learning_rate,
                           self.momentum, self.train_seed_)


_INT_KEYS = {"classes", "samples", "latent_dim", "input_dim", "projector_dim",
             "batch_size", "epochs", "probe_epochs", "seed", "data_seed",
             "init_seed", "train_seed", "probe_seed"}
_FLOAT_KEYS = {"noise_std", "rotation_max_angle", "coord_dropout_prob",
               "scale_jitter", "center_scale", "latent_noise_std",
               "learning_rate", "momentum", "train_fraction"}
_LIST_KEYS = {"encoder_hidden", "projector_hidden"}
_STR_KEYS = {"activation", "loss", "lambda"}
_RUN_KEYS = _INT_KEYS | _FLOAT_KEYS | _LIST_KEYS | _STR_KEYS


def parse_kv_text(text: str, path: str = "<config>") -> dict[str, str]:
    """Raw key -> value strings from flat key=value text."""
    out: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {line!r}")
        key, _, value = stripped.partition("=")
        key = key.strip()
        value = value.strip()
        if key in out:
            raise ConfigError(f"{path}:{lineno}: duplicate key {key!r}")
        out[key] = value
    return out


def _convert(key: str, value: str):
    try:
        if key in _INT_KEYS:
            return int(value)
        if key in _FLOAT_KEYS:
            return float(value)
        if key in _LIST_KEYS:
            if not value:
                return ()
            return tuple(int(v.strip()) for v in value.split(","))
    except ValueError:
        raise ConfigError(f"config field {key!r}: cannot parse {value!r}") from None
    return value


_OPTIONAL_KEYS = {"data_seed", "init_seed", "train_seed", "probe_seed"}


def config_from_items(items: dict[str, str], path: str = "<config>") -> RunConfig:
    kwargs = {}
    for key, value in items.items():
        if key not in _RUN_KEYS:
            raise ConfigError(f"{path}: unknown config key {key!r}")
        if value == "" and key in _OPTIONAL_KEYS:
            continue
        if value == "" and key not in _LIST_KEYS:
            raise ConfigError(f"{path}: config field {key!r} has no value")
        attr = "lam" if key == "lambda" else key
        kwargs[attr] = _convert(key, value)
    return RunConfig(**kwargs)


def load_run_config(path) -> RunConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return config_from_items(parse_kv_text(text, str(path)), str(path))


# ---------------------------------------------------------------------------
# Sweep plans: a run config plus the sweep axis description in one file.
# ---------------------------------------------------------------------------

_SWEEP_AXES = ("projector_dim", "batch_size", "epochs")


@dataclass(frozen=True)
class SweepPlan:
    axis: str
    values: tuple
    repeats: int
    both_losses: bool
    base: RunConfig

    def __post_init__(self):
        if self.axis not in _SWEEP_AXES:
            raise ConfigError(f"axis must be one of {_SWEEP_AXES}, got {self.axis!r}")
        if not self.values:
            raise ConfigError("values must be a nonempty list")
        if any(v < 1 for v in self.values):
            raise ConfigError(f"axis values must be >= 1, got {self.values}")
        if self.repeats < 1:
            raise ConfigError(f"repeats must be >= 1, got {self.repeats}")

    def run_configs(self) -> list[RunConfig]:
        """Cross product: axis values x losses x repeats, in plan order."""
        losses = ("barlow_twins", "hsic_ssl") if self.both_losses else (self.base.loss,)
        runs = []
        for value in self.values:
            for loss in losses:
                for rep in range(self.repeats):
                    runs.append(replace(self.base, **{self.axis: value},
                                        loss=loss, seed=self.base.seed + rep))
        return runs


def load_sweep_plan(path) -> SweepPlan:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read plan {path}: {exc}") from exc
    items = parse_kv_text(text, str(path))
    axis = items.pop("axis", None)
    if axis is None:
        raise ConfigError(f"{path}: sweep plan needs an 'axis' key")
    values_raw = items.pop("values", "")
    try:
        values = tuple(int(v.strip()) for v in values_raw.split(",") if v.strip())
    except ValueError:
        raise ConfigError(f"config field 'values': cannot parse {values_raw!r}") from None
    repeats_raw = items.pop("repeats", "3")
    try:
        repeats = int(repeats_raw)
    except ValueError:
        raise ConfigError(f"config field 'repeats': cannot parse {repeats_raw!r}") from None
    both_raw = items.pop("both_losses", "true").strip().lower()
    if both_raw not in ("true", "false"):
        raise ConfigError(f"config field 'both_losses': expected true/false, "
                          f"got {both_raw!r}")
    base = config_from_items(items, str(path))
    return SweepPlan(axis.strip(), values, repeats, both_raw == "true", base)


def config_to_items(cfg: RunConfig) -> dict[str, str]:
    """Flat string form of a config (inverse of config_from_items).

    Every key is always emitted (unset optional seeds as empty strings), so
    CSV rows have a stable column set.
    """
    out = {}
    for f in fields(cfg):
        key = "lambda" if f.name == "lam" else f.name
        v = getattr(cfg, f.name)
        if v is None:
            out[key] = ""
        elif key in _LIST_KEYS:
            out[key] = ",".join(str(int(x)) for x in v)
        else:
            out[key] = repr(v) if isinstance(v, float) else str(v)
    return out
