"""Minimal fully-connected network with hand-written backward pass.

Activation (relu or tanh) follows every layer except the last, so a
single-layer net is purely linear. Weights are drawn uniformly with
fan-in scaling, biases start at zero.
"""

import numpy as np

from .errors import ConfigError, DimensionError

_ACTIVATIONS = ("relu", "tanh")


def _act(name, x):
    if name == "relu":
        return np.maximum(x, 0.0)
    return np.tanh(x)


def _act_grad(name, pre, post):
    # derivative w.r.t. pre-activation, using whichever of pre/post is cheaper
    if name == "relu":
        return (pre > 0.0).astype(np.float64)
    return 1.0 - post * post


class MLP:
    """A stack of affine layers: weights[i] is (fan_in, fan_out)."""

    def __init__(self, widths, activation: str, rng: np.random.Generator):
        if len(widths) < 2:
            raise ConfigError(f"need at least input and output width, got {widths}")
        if any(w < 1 for w in widths):
            raise ConfigError(f"layer widths must be >= 1, got {widths}")
        if activation not in _ACTIVATIONS:
            raise ConfigError(f"activation must be one of {_ACTIVATIONS}")
        self.widths = tuple(int(w) for w in widths)
        self.activation = activation
        self.weights = []
        self.biases = []
        for fan_in, fan_out in zip(self.widths[:-1], self.widths[1:]):
            bound = 1.0 / np.sqrt(fan_in)
            self.weights.append(rng.uniform(-bound, bound, size=(fan_in, fan_out)))
            self.biases.append(np.zeros(fan_out))

    @classmethod
    def from_params(cls, weights, biases, activation: str) -> "MLP":
        net = cls.__new__(cls)
        net.weights = [np.array(w, dtype=np.float64) for w in weights]
        net.biases = [np.array(b, dtype=np.float64) for b in biases]
        net.widths = tuple([net.weights[0].shape[0]]
                           + [w.shape[1] for w in net.weights])
        if activation not in _ACTIVATIONS:
            raise ConfigError(f"activation must be one of {_ACTIVATIONS}")
        net.activation = activation
        return net

    @property
    def in_dim(self) -> int:
        return self.widths[0]

    @property
    def out_dim(self) -> int:
        return self.widths[-1]

    def _check_input(self, x: np.ndarray):
        if x.ndim != 2 or x.shape[1] != self.in_dim:
            raise DimensionError(
                f"expected (n, {self.in_dim}) input, got {x.shape}")

    def forward(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        self._check_input(x)
        last = len(self.weights) - 1
        for i, (w, b) in enumerate(zip(self.weights, self.biases)):
            x = x @ w + b
            if i != last:
                x = _act(self.activation, x)
        return x

    def forward_cached(self, x: np.ndarray):
        """Forward pass keeping per-layer inputs/pre-activations for backward."""
        x = np.asarray(x, dtype=np.float64)
        self._check_input(x)
        cache = []
        last = len(self.weights) - 1
        for i, (w, b) in enumerate(zip(self.weights, self.biases)):
            inp = x
            pre = inp @ w + b
            post = _act(self.activation, pre) if i != last else pre
            cache.append((inp, pre, post))
            x = post
        return x, cache

    def backward(self, cache, grad_out: np.ndarray):
        """Gradients of a scalar loss given d(loss)/d(output).

        Returns (grad_input, weight_grads, bias_grads).
        """
        grad_w = [None] * len(self.weights)
        grad_b = [None] * len(self.weights)
        g = np.asarray(grad_out, dtype=np.float64)
        last = len(self.weights) - 1
        for i in range(last, -1, -1):
            inp, pre, post = cache[i]
            if i != last:
                g = g * _act_grad(self.activation, pre, post)
            grad_w[i] = inp.T @ g
            grad_b[i] = g.sum(axis=0)
            g = g @ self.weights[i].T
        return g, grad_w, grad_b

    def params(self):
        return self.weights + self.biases

    def all_finite(self) -> bool:
        return all(np.isfinite(p).all() for p in self.params())
