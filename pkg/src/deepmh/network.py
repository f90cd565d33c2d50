"""Minimal dense feed-forward networks with reverse-mode differentiation.

The core object is an immutable :class:`Network` that supports forward
evaluation, gradients of a scalar loss with respect to the *input*
(weights held fixed), SGD training, and stochastic dropout inference.
:class:`FeedForwardRegressor` wraps the same machinery behind the
scikit-learn estimator API.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.exceptions import NotFittedError

from .exceptions import ModelFileError, TrainingDivergedError, ValidationError
from .validation import as_matrix, as_vector, check_int_at_least, check_positive

ACTIVATIONS = ("identity", "relu", "tanh")


def _activate(name: str, z: np.ndarray) -> np.ndarray:
    if name == "identity":
        return z
    if name == "relu":
        return np.maximum(z, 0.0)
    return np.tanh(z)


def _activate_grad(name: str, z: np.ndarray, a: np.ndarray) -> np.ndarray:
    # relu subgradient at 0 is defined as 0
    if name == "identity":
        return np.ones_like(z)
    if name == "relu":
        return (z > 0.0).astype(float)
    return 1.0 - a * a


@dataclass(frozen=True)
class DenseLayer:
    """One dense layer: ``activation(weights @ x + bias)``.

    ``weights`` has shape (out, in). ``dropout_rate`` is carried as
    configuration for stochastic inference and never applied by plain
    forward passes.
    """

    weights: np.ndarray
    bias: np.ndarray
    activation: str = "identity"
    dropout_rate: float = 0.0

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        b = np.asarray(self.bias, dtype=float)
        if w.ndim != 2:
            raise ValidationError(f"layer weights must be 2-D, got shape {w.shape}")
        if b.ndim != 1 or b.shape[0] != w.shape[0]:
            raise ValidationError(
                f"bias shape {b.shape} does not match weight rows {w.shape[0]}"
            )
        if not (np.all(np.isfinite(w)) and np.all(np.isfinite(b))):
            raise ValidationError("layer weights/bias contain non-finite values")
        if self.activation not in ACTIVATIONS:
            raise ValidationError(
                f"unknown activation {self.activation!r}; choose from {ACTIVATIONS}"
            )
        if not 0.0 <= float(self.dropout_rate) < 1.0:
            raise ValidationError(
                f"dropout_rate must lie in [0, 1), got {self.dropout_rate!r}"
            )
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "bias", b)

    @property
    def in_dim(self) -> int:
        return self.weights.shape[1]

    @property
    def out_dim(self) -> int:
        return self.weights.shape[0]


class Network:
    """Immutable stack of dense layers.

    Instances are safe to share across concurrent workers: no method
    mutates the layers, and training returns a new network.
    """

    def __init__(self, layers):
        layers = tuple(layers)
        if not layers:
            raise ValidationError("a network needs at least one layer")
        for prev, nxt in zip(layers, layers[1:]):
            if prev.out_dim != nxt.in_dim:
                raise ValidationError(
                    f"layer output width {prev.out_dim} does not feed "
                    f"layer input width {nxt.in_dim}"
                )
        self.layers = layers
        self.input_dim = layers[0].in_dim
        self.output_dim = layers[-1].out_dim

    def forward(self, x) -> np.ndarray:
        """Deterministic forward pass for a single input vector."""
        a = as_vector(x, self.input_dim, "x")
        for layer in self.layers:
            a = _activate(layer.activation, layer.weights @ a + layer.bias)
        return a

    def forward_batch(self, X) -> np.ndarray:
        """Deterministic forward pass for a (n, input_dim) batch."""
        A = as_matrix(X, self.input_dim, name="X")
        for layer in self.layers:
            A = _activate(layer.activation, A @ layer.weights.T + layer.bias)
        return A

    def _forward_cached(self, a: np.ndarray):
        """Forward pass keeping pre-activations; no input validation."""
        zs = []
        acts = [a]
        for layer in self.layers:
            z = layer.weights @ a + layer.bias
            a = _activate(layer.activation, z)
            zs.append(z)
            acts.append(a)
        return zs, acts

    def _backward_input(self, zs, acts, out_grad: np.ndarray) -> np.ndarray:
        """Pull a gradient at the output back to the input."""
        g = out_grad
        for i in range(len(self.layers) - 1, -1, -1):
            layer = self.layers[i]
            g = layer.weights.T @ (g * _activate_grad(layer.activation, zs[i], acts[i + 1]))
        return g

    def input_gradient(self, x, loss_grad) -> np.ndarray:
        """Gradient of ``loss(f(x))`` with respect to ``x``, weights fixed.

        ``loss_grad`` maps the network output to the loss gradient dL/dy
        evaluated there (e.g. ``lambda y: 2 * (y - target)`` for a squared
        L2 loss).
        """
        a = as_vector(x, self.input_dim, "x")
        zs, acts = self._forward_cached(a)
        g = np.asarray(loss_grad(acts[-1]), dtype=float)
        if g.shape != (self.output_dim,):
            raise ValidationError(
                f"loss gradient has shape {g.shape}, expected ({self.output_dim},)"
            )
        return self._backward_input(zs, acts, g)


def init_network(
    input_dim: int,
    hidden_layer_sizes,
    output_dim: int,
    activation: str = "tanh",
    seed: int = 0,
    dropout_rate: float = 0.0,
) -> Network:
    """Random network: ``activation`` on hidden layers, identity output."""
    check_int_at_least(input_dim, 1, "input_dim")
    check_int_at_least(output_dim, 1, "output_dim")
    rng = np.random.default_rng(seed)
    widths = [int(input_dim)] + [int(h) for h in hidden_layer_sizes] + [int(output_dim)]
    layers = []
    for i in range(len(widths) - 1):
        fan_in, fan_out = widths[i], widths[i + 1]
        w = rng.standard_normal((fan_out, fan_in)) / np.sqrt(fan_in)
        act = activation if i < len(widths) - 2 else "identity"
        layers.append(
            DenseLayer(w, np.zeros(fan_out), activation=act, dropout_rate=dropout_rate)
        )
    return Network(layers)


@dataclass(frozen=True)
class TrainConfig:
    """Plain-SGD training settings for the squared-L2 loss."""

    learning_rate: float
    epochs: int
    batch_size: int
    seed: int = 0
    loss: str = "squared_l2"

    def __post_init__(self):
        check_positive(self.learning_rate, "learning_rate")
        check_int_at_least(self.epochs, 0, "epochs")
        check_int_at_least(self.batch_size, 1, "batch_size")
        if self.loss != "squared_l2":
            raise ValidationError(f"unsupported loss {self.loss!r}")


def mean_squared_l2(net: Network, X: np.ndarray, Y: np.ndarray) -> float:
    """Mean over samples of the squared L2 residual ``||f(x) - y||^2``."""
    diff = net.forward_batch(X) - Y
    return float(np.mean(np.sum(diff * diff, axis=1)))


def train_sgd(net: Network, X, Y, cfg: TrainConfig):
    """Train with plain mini-batch SGD; returns ``(new_network, loss_curve)``.

    The loss curve starts with the pre-training loss, then one entry per
    epoch (mean training loss over the full set after that epoch). The
    input network is never mutated.
    """
    X = as_matrix(X, net.input_dim, name="X")
    Y = as_matrix(Y, net.output_dim, name="Y")
    if X.shape[0] != Y.shape[0]:
        raise ValidationError(
            f"X has {X.shape[0]} rows but Y has {Y.shape[0]}"
        )
    n = X.shape[0]
    if cfg.batch_size > n:
        raise ValidationError(
            f"batch_size {cfg.batch_size} exceeds dataset size {n}"
        )

    rng = np.random.default_rng(cfg.seed)
    weights = [layer.weights.copy() for layer in net.layers]
    biases = [layer.bias.copy() for layer in net.layers]
    acts = [layer.activation for layer in net.layers]
    lr = float(cfg.learning_rate)

    def rebuild() -> Network:
        return Network(
            replace(layer, weights=w, bias=b)
            for layer, w, b in zip(net.layers, weights, biases)
        )

    curve = [mean_squared_l2(rebuild(), X, Y)]
    for epoch in range(1, cfg.epochs + 1):
        order = rng.permutation(n)
        for start in range(0, n, cfg.batch_size):
            idx = order[start : start + cfg.batch_size]
            A = X[idx]
            cache = []
            for w, b, act in zip(weights, biases, acts):
                Z = A @ w.T + b
                A_next = _activate(act, Z)
                cache.append((A, Z, A_next))
                A = A_next
            # batch loss = mean_i ||f(x_i) - y_i||^2
            G = 2.0 * (A - Y[idx]) / len(idx)
            for i in range(len(weights) - 1, -1, -1):
                A_prev, Z, A_out = cache[i]
                delta = G * _activate_grad(acts[i], Z, A_out)
                G = delta @ weights[i]
                weights[i] -= lr * (delta.T @ A_prev)
                biases[i] -= lr * delta.sum(axis=0)
        trained = rebuild()
        loss = mean_squared_l2(trained, X, Y)
        if not np.isfinite(loss) or any(
            not np.all(np.isfinite(w)) for w in weights
        ):
            raise TrainingDivergedError(
                f"training loss became non-finite at epoch {epoch}"
            )
        curve.append(loss)
    return rebuild(), curve


def dropout_sample(net: Network, x, n: int, rate: float, seed: int = 0) -> np.ndarray:
    """``n`` stochastic forward passes with inverted-dropout masks.

    Independent Bernoulli keep-masks (scaled by 1/(1-rate)) are applied to
    every layer's output. ``rate=0`` reproduces ``n`` copies of the
    deterministic forward pass bit for bit.
    """
    check_int_at_least(n, 1, "n")
    rate = float(rate)
    if not 0.0 <= rate < 1.0:
        raise ValidationError(f"rate must lie in [0, 1), got {rate!r}")
    x = as_vector(x, net.input_dim, "x")
    if rate == 0.0:
        return np.tile(net.forward(x), (n, 1))
    rng = np.random.default_rng(seed)
    A = np.tile(x, (n, 1))
    for layer in net.layers:
        A = _activate(layer.activation, A @ layer.weights.T + layer.bias)
        keep = rng.random(A.shape) >= rate
        A = A * keep / (1.0 - rate)
    return A


# --------------------------------------------------------------------------
# Model file format (versioned plain text):
#
#   deepmh-model v1
#   dims: <in> <out>
#   layer <i> <activation> <out>x<in>
#   <out rows of in weights>
#   <one bias row of out values>
#   ... next layer ...
# --------------------------------------------------------------------------

MODEL_MAGIC = "deepmh-model v1"


def _fmt_row(values) -> str:
    return " ".join(repr(float(v)) for v in values)


def save_model(net: Network, path) -> None:
    """Write a network to the versioned text format (lossless float64)."""
    lines = [MODEL_MAGIC, f"dims: {net.input_dim} {net.output_dim}"]
    for i, layer in enumerate(net.layers):
        lines.append(f"layer {i} {layer.activation} {layer.out_dim}x{layer.in_dim}")
        for row in layer.weights:
            lines.append(_fmt_row(row))
        lines.append(_fmt_row(layer.bias))
    with open(path, "w", encoding="ascii") as fh:
        fh.write("\n".join(lines) + "\n")


def _parse_row(line: str, width: int, lineno: int, path) -> np.ndarray:
    parts = line.split()
    if len(parts) != width:
        raise ModelFileError(
            f"{path}:{lineno}: expected {width} values, found {len(parts)}"
        )
    try:
        return np.array([float(p) for p in parts])
    except ValueError as exc:
        raise ModelFileError(f"{path}:{lineno}: bad number ({exc})") from None


def load_model(path) -> Network:
    """Read a network saved by :func:`save_model`; raise on any damage."""
    with open(path, "r", encoding="ascii") as fh:
        lines = fh.read().splitlines()
    if not lines or lines[0] != MODEL_MAGIC:
        raise ModelFileError(f"{path}:1: missing '{MODEL_MAGIC}' header")
    if len(lines) < 2 or not lines[1].startswith("dims: "):
        raise ModelFileError(f"{path}:2: missing 'dims:' line")
    try:
        in_dim, out_dim = (int(p) for p in lines[1][len("dims: "):].split())
    except ValueError:
        raise ModelFileError(f"{path}:2: malformed dims line {lines[1]!r}") from None

    layers = []
    pos = 2
    index = 0
    while pos < len(lines):
        header = lines[pos]
        parts = header.split()
        if len(parts) != 4 or parts[0] != "layer":
            raise ModelFileError(f"{path}:{pos + 1}: expected layer header, got {header!r}")
        if parts[1] != str(index):
            raise ModelFileError(
                f"{path}:{pos + 1}: expected layer {index}, got {parts[1]!r}"
            )
        activation = parts[2]
        try:
            rows, cols = (int(v) for v in parts[3].split("x"))
        except ValueError:
            raise ModelFileError(
                f"{path}:{pos + 1}: malformed layer shape {parts[3]!r}"
            ) from None
        if pos + 1 + rows + 1 > len(lines):
            raise ModelFileError(
                f"{path}:{len(lines)}: file truncated inside layer {index}"
            )
        w = np.empty((rows, cols))
        for r in range(rows):
            w[r] = _parse_row(lines[pos + 1 + r], cols, pos + 2 + r, path)
        bias = _parse_row(lines[pos + 1 + rows], rows, pos + 2 + rows, path)
        try:
            layers.append(DenseLayer(w, bias, activation=activation))
        except ValidationError as exc:
            raise ModelFileError(f"{path}:{pos + 1}: {exc}") from None
        pos += rows + 2
        index += 1

    if not layers:
        raise ModelFileError(f"{path}: no layers found")
    net = Network(layers)
    if net.input_dim != in_dim or net.output_dim != out_dim:
        raise ModelFileError(
            f"{path}:2: declared dims {in_dim}x{out_dim} do not match layers "
            f"({net.input_dim}x{net.output_dim})"
        )
    return net


class FeedForwardRegressor(BaseEstimator, RegressorMixin):
    """Dense feed-forward regressor trained with plain SGD.

    Parameters
    ----------
    hidden_layer_sizes : tuple of int
        Widths of the hidden layers. The output layer is always linear.
    activation : {"tanh", "relu", "identity"}
        Hidden-layer activation.
    learning_rate : float
        Fixed SGD step size.
    epochs : int
        Number of passes over the training set.
    batch_size : int
        Mini-batch size; must not exceed the training-set size.
    seed : int
        Seeds both weight initialization and batch shuffling.

    Attributes
    ----------
    network_ : Network
        The trained immutable network.
    loss_curve_ : list of float
        Pre-training loss followed by one mean training loss per epoch.
    """

    def __init__(
        self,
        hidden_layer_sizes=(32,),
        activation="tanh",
        learning_rate=0.05,
        epochs=200,
        batch_size=32,
        seed=0,
    ):
        self.hidden_layer_sizes = hidden_layer_sizes
        self.activation = activation
        self.learning_rate = learning_rate
        self.epochs = epochs
        self.batch_size = batch_size
        self.seed = seed

    def fit(self, X, y):
        X = as_matrix(X, name="X")
        y = np.asarray(y, dtype=float)
        if y.ndim == 1:
            y = y[:, None]
        y = as_matrix(y, name="y")
        net = init_network(
            X.shape[1],
            self.hidden_layer_sizes,
            y.shape[1],
            activation=self.activation,
            seed=self.seed,
        )
        cfg = TrainConfig(
            learning_rate=self.learning_rate,
            epochs=self.epochs,
            batch_size=min(int(self.batch_size), X.shape[0]),
            seed=self.seed,
        )
        self.network_, self.loss_curve_ = train_sgd(net, X, y, cfg)
        self.n_features_in_ = X.shape[1]
        return self

    def predict(self, X):
        if not hasattr(self, "network_"):
            raise NotFittedError("fit must be called before predict")
        out = self.network_.forward_batch(X)
        return out[:, 0] if out.shape[1] == 1 else out


def as_network(model) -> Network:
    """Accept a :class:`Network` or a fitted estimator carrying one."""
    if isinstance(model, Network):
        return model
    net = getattr(model, "network_", None)
    if isinstance(net, Network):
        return net
    raise ValidationError(
        "expected a Network or a fitted FeedForwardRegressor, got "
        f"{type(model).__name__}"
    )
