"""Desk-scale two-view training and linear-probe evaluation.

One encoder and one projector are shared by both views (no momentum
encoder, no predictor asymmetry, no stop-gradient): each minibatch runs
both augmented views through the same weights, standardizes the projector
outputs per batch, applies the chosen loss and backpropagates through the
standardization statistics. The optimizer is plain SGD with momentum.

Evaluation follows the usual linear protocol: drop the projector, freeze
the encoder, fit a multinomial logistic regression on the features by
full-batch gradient descent, and report held-out accuracy.
"""

import json
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .errors import (CheckpointError, ConfigError, DimensionError,
                     DivergenceError, InvalidInputError, SplitError)
from .losses import Lambda, LossKind, loss_gradients
from .mlp import _ACTIVATIONS, MLP
from .synthgen import TwoViewDataset

_CKPT_VERSION = "hsicssl-ckpt-1"

# Philox stream tags (second key word) for the trainer's RNG uses.
_TAG_INIT = 101
_TAG_SHUFFLE = 102
_TAG_PROBE_SPLIT = 103


def _stream(seed: int, tag: int) -> np.random.Generator:
    key = np.array([seed, tag], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


@dataclass(frozen=True)
class EncoderConfig:
    """Widths of the encoder (input ... feature) and projector (feature ... d)."""

    layer_widths: tuple
    projector_widths: tuple
    activation: str = "relu"
    init_seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "layer_widths", tuple(int(w) for w in self.layer_widths))
        object.__setattr__(self, "projector_widths",
                           tuple(int(w) for w in self.projector_widths))
        if len(self.layer_widths) < 2:
            raise ConfigError("encoder needs at least input and feature widths")
        if len(self.projector_widths) < 2:
            raise ConfigError("projector needs at least feature and output widths")
        if self.projector_widths[0] != self.layer_widths[-1]:
            raise ConfigError(
                f"projector input {self.projector_widths[0]} != "
                f"encoder feature dim {self.layer_widths[-1]}")
        if any(w < 1 for w in self.layer_widths + self.projector_widths):
            raise ConfigError("all widths must be >= 1")
        if self.activation not in _ACTIVATIONS:
            raise ConfigError(f"activation must be one of {_ACTIVATIONS}")

    @property
    def feature_dim(self) -> int:
        return self.layer_widths[-1]

    @property
    def projector_dim(self) -> int:
        return self.projector_widths[-1]


@dataclass(frozen=True)
class TrainConfig:
    loss: LossKind
    lam: Lambda
    batch_size: int
    epochs: int
    learning_rate: float
    momentum: float = 0.9
    seed: int = 0

    def __post_init__(self):
        if self.batch_size < 2:
            raise ConfigError(
                f"batch_size must be >= 2 (standardization needs n >= 2), "
                f"got {self.batch_size}")
        if self.epochs < 1:
            raise ConfigError(f"epochs must be >= 1, got {self.epochs}")
        # learning_rate 0 is allowed: a zero-step run is a useful control.
        if self.learning_rate < 0:
            raise ConfigError(f"learning_rate must be >= 0, got {self.learning_rate}")
        if not 0 <= self.momentum < 1:
            raise ConfigError(f"momentum must be in [0, 1), got {self.momentum}")


@dataclass
class TrainedModel:
    encoder: MLP
    projector: MLP
    config: EncoderConfig
    loss_history: list = field(default_factory=list)


@dataclass(frozen=True)
class ProbeResult:
    """Held-out accuracy of the linear probe.

    per_class_accuracy[c] is NaN for classes absent from the eval split;
    overall accuracy is the class-count-weighted mean of the rest.
    """

    accuracy: float
    per_class_accuracy: np.ndarray
    weights: np.ndarray
    n_train: int
    n_eval: int


def build_model(enc: EncoderConfig) -> TrainedModel:
    """Fresh encoder + projector with fan-in uniform init from init_seed."""
    rng = _stream(enc.init_seed, _TAG_INIT)
    encoder = MLP(enc.layer_widths, enc.activation, rng)
    projector = MLP(enc.projector_widths, enc.activation, rng)
    return TrainedModel(encoder, projector, enc, [])


def train(data: TwoViewDataset, enc: EncoderConfig, cfg: TrainConfig) -> TrainedModel:
    """Minibatch SGD on the two-view objective; deterministic per seed."""
    n = len(data)
    if n == 0:
        raise ConfigError("dataset is empty")
    if cfg.batch_size > n:
        raise ConfigError(f"batch_size {cfg.batch_size} > dataset size {n}")
    if data.input_dim != enc.layer_widths[0]:
        raise ConfigError(
            f"encoder input width {enc.layer_widths[0]} != "
            f"data dim {data.input_dim}")
    cfg.lam.check_dim(enc.projector_dim)

    model = build_model(enc)
    nets = (model.encoder, model.projector)
    velocity = [[np.zeros_like(p) for p in net.params()] for net in nets]
    shuffle_rng = _stream(cfg.seed, _TAG_SHUFFLE)
    batches_per_epoch = n // cfg.batch_size  # remainder dropped: a tail
    # batch smaller than 2 cannot be standardized, and ragged batches would
    # make batch_size a fuzzy experimental variable

    for epoch in range(1, cfg.epochs + 1):
        perm = shuffle_rng.permutation(n)
        epoch_losses = []
        for b in range(batches_per_epoch):
            idx = perm[b * cfg.batch_size:(b + 1) * cfg.batch_size]
            try:
                loss = _train_step(model, data.view_a[idx], data.view_b[idx],
                                   cfg, velocity)
            except InvalidInputError as exc:
                # non-finite activations surface here before the epoch check
                raise DivergenceError(epoch) from exc
            epoch_losses.append(loss)
        model.loss_history.append(float(np.mean(epoch_losses)))
        if not (model.encoder.all_finite() and model.projector.all_finite()):
            raise DivergenceError(epoch)
    return model


def _train_step(model, xa, xb, cfg, velocity) -> float:
    # both views intentionally pass through the SAME parameter store
    feat_a, cache_ea = model.encoder.forward_cached(xa)
    za, cache_pa = model.projector.forward_cached(feat_a)
    feat_b, cache_eb = model.encoder.forward_cached(xb)
    zb, cache_pb = model.projector.forward_cached(feat_b)

    rep = loss_gradients(za, zb, cfg.loss, cfg.lam, through_standardization=True)

    gfa, gw_pa, gb_pa = model.projector.backward(cache_pa, rep.grad_x)
    _, gw_ea, gb_ea = model.encoder.backward(cache_ea, gfa)
    gfb, gw_pb, gb_pb = model.projector.backward(cache_pb, rep.grad_y)
    _, gw_eb, gb_eb = model.encoder.backward(cache_eb, gfb)

    grads = [
        [ga + gb for ga, gb in zip(gw_ea + gb_ea, gw_eb + gb_eb)],
        [ga + gb for ga, gb in zip(gw_pa + gb_pa, gw_pb + gb_pb)],
    ]
    for net, vel, grad in zip((model.encoder, model.projector), velocity, grads):
        for p, v, g in zip(net.params(), vel, grad):
            v *= cfg.momentum
            v += g
            p -= cfg.learning_rate * v
    return rep.total


def extract_features(model: TrainedModel, inputs) -> np.ndarray:
    """Encoder-only forward pass (the projector never sees eval data)."""
    x = np.asarray(inputs, dtype=np.float64)
    if x.ndim != 2 or x.shape[1] != model.encoder.in_dim:
        raise DimensionError(
            f"expected (n, {model.encoder.in_dim}) inputs, got {x.shape}")
    return model.encoder.forward(x)


def linear_probe(features, labels, train_fraction: float = 0.8,
                 probe_epochs: int = 300, seed: int = 0,
                 learning_rate: float = 0.5, momentum: float = 0.9) -> ProbeResult:
    """Multinomial logistic regression on frozen features.

    Full-batch gradient descent from a zero init; the split permutation is
    the only seeded randomness, so results are deterministic per seed.
    """
    x = np.asarray(features, dtype=np.float64)
    y = np.asarray(labels)
    if x.ndim != 2 or len(y) != x.shape[0]:
        raise DimensionError(
            f"features {x.shape} and labels ({len(y)},) do not align")
    if not 0 < train_fraction < 1:
        raise ConfigError(f"train_fraction must be in (0, 1), got {train_fraction}")
    if probe_epochs < 1:
        raise ConfigError(f"probe_epochs must be >= 1, got {probe_epochs}")
    n = x.shape[0]
    k = int(y.max()) + 1
    perm = _stream(seed, _TAG_PROBE_SPLIT).permutation(n)
    n_train = int(round(train_fraction * n))
    if n_train < 1 or n_train >= n:
        raise ConfigError(f"split leaves no data: n_train={n_train} of {n}")
    train_idx, eval_idx = perm[:n_train], perm[n_train:]

    present = np.unique(y)
    train_classes = np.unique(y[train_idx])
    missing = np.setdiff1d(present, train_classes)
    if missing.size:
        raise SplitError(f"classes {missing.tolist()} absent from the train split")

    # standardize with train-split statistics only
    xt = np.ascontiguousarray(x[train_idx])
    zt, mu, sigma = _kernels.standardize_columns(xt, 1e-8)
    ze = (x[eval_idx] - mu) / np.maximum(sigma, 1e-8)
    yt, ye = y[train_idx], y[eval_idx]

    zt1 = np.hstack([zt, np.ones((n_train, 1))])
    ze1 = np.hstack([ze, np.ones((n - n_train, 1))])
    w = np.zeros((x.shape[1] + 1, k))
    vel = np.zeros_like(w)
    onehot = np.eye(k)[yt]
    for _ in range(probe_epochs):
        logits = zt1 @ w
        logits -= logits.max(axis=1, keepdims=True)
        p = np.exp(logits)
        p /= p.sum(axis=1, keepdims=True)
        grad = zt1.T @ (p - onehot) / n_train
        vel *= momentum
        vel += grad
        w -= learning_rate * vel

    pred = (ze1 @ w).argmax(axis=1)
    correct = pred == ye
    per_class = np.full(k, np.nan)
    for c in range(k):
        mask = ye == c
        if mask.any():
            per_class[c] = float(correct[mask].mean())
    return ProbeResult(float(correct.mean()), per_class, w,
                       n_train, n - n_train)


# ---------------------------------------------------------------------------
# Checkpoints: a single .npz with a version tag, widths, activation,
# row-major weight/bias arrays per layer, the loss trajectory, and the
# originating run config as JSON (when available).
# ---------------------------------------------------------------------------

def save_checkpoint(model: TrainedModel, path, run_config: dict | None = None) -> None:
    arrays = {
        "format_version": np.array(_CKPT_VERSION),
        "activation": np.array(model.config.activation),
        "encoder_widths": np.array(model.config.layer_widths, dtype=np.int64),
        "projector_widths": np.array(model.config.projector_widths, dtype=np.int64),
        "init_seed": np.array(model.config.init_seed, dtype=np.int64),
        "loss_history": np.array(model.loss_history, dtype=np.float64),
        "config_json": np.array(json.dumps(run_config) if run_config else ""),
    }
    for i, (w, b) in enumerate(zip(model.encoder.weights, model.encoder.biases)):
        arrays[f"enc_w{i}"] = w
        arrays[f"enc_b{i}"] = b
    for i, (w, b) in enumerate(zip(model.projector.weights, model.projector.biases)):
        arrays[f"proj_w{i}"] = w
        arrays[f"proj_b{i}"] = b
    with open(path, "wb") as fh:
        np.savez(fh, **arrays)


def load_checkpoint(path) -> tuple[TrainedModel, dict | None]:
    try:
        data = np.load(path, allow_pickle=False)
    except (OSError, ValueError) as exc:
        raise CheckpointError(f"cannot read checkpoint {path}: {exc}") from exc
    with data:
        version = str(data.get("format_version", ""))
        if version != _CKPT_VERSION:
            raise CheckpointError(
                f"checkpoint version {version!r} != expected {_CKPT_VERSION!r}")
        activation = str(data["activation"])
        enc_widths = tuple(int(w) for w in data["encoder_widths"])
        proj_widths = tuple(int(w) for w in data["projector_widths"])
        n_enc = len(enc_widths) - 1
        n_proj = len(proj_widths) - 1
        encoder = MLP.from_params([data[f"enc_w{i}"] for i in range(n_enc)],
                                  [data[f"enc_b{i}"] for i in range(n_enc)],
                                  activation)
        projector = MLP.from_params([data[f"proj_w{i}"] for i in range(n_proj)],
                                    [data[f"proj_b{i}"] for i in range(n_proj)],
                                    activation)
        cfg = EncoderConfig(enc_widths, proj_widths, activation,
                            int(data["init_seed"]))
        history = [float(v) for v in data["loss_history"]]
        raw = str(data["config_json"])
        run_config = json.loads(raw) if raw else None
    return TrainedModel(encoder, projector, cfg, history), run_config
