"""Multi-layer perceptron regressor trained with full-batch Adam.

Weights for layer ``k`` have shape ``(fan_in, fan_out)`` so that entry
``[j, n]`` connects incoming neuron ``j`` to neuron ``n``. Hidden layers use
relu or sigmoid; the single output neuron is always linear.
"""

from __future__ import annotations

import json
import struct
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

ACTIVATIONS = ("relu", "sigmoid", "identity")
MODEL_MAGIC = b"EXPORTCAST-MLP"
MODEL_VERSION = 1


class TrainingDiverged(RuntimeError):
    def __init__(self, epoch: int, loss: float):
        super().__init__(f"training diverged at epoch {epoch} (loss={loss!r})")
        self.epoch = epoch


@dataclass(frozen=True)
class NetworkConfig:
    layer_sizes: tuple[int, ...] = (2, 16, 1)
    hidden_activation: str = "relu"
    epochs: int = 200
    learning_rate: float = 0.01
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "layer_sizes", tuple(int(n) for n in self.layer_sizes))
        sizes = self.layer_sizes
        if len(sizes) < 3:
            raise ValueError(f"need at least one hidden layer, got layer_sizes={list(sizes)}")
        if any(n < 1 for n in sizes):
            raise ValueError(f"all layer sizes must be >= 1, got {list(sizes)}")
        if sizes[-1] != 1:
            raise ValueError(f"final layer size must be 1, got {sizes[-1]}")
        if self.hidden_activation not in ACTIVATIONS:
            raise ValueError(f"unknown activation {self.hidden_activation!r}")
        if self.epochs < 1:
            raise ValueError(f"epochs must be >= 1, got {self.epochs}")
        if not self.learning_rate > 0:
            raise ValueError("learning_rate must be positive")
        for name in ("beta1", "beta2"):
            b = getattr(self, name)
            if not 0.0 <= b < 1.0:
                raise ValueError(f"{name} must lie in [0, 1), got {b}")
        if not self.epsilon > 0:
            raise ValueError("epsilon must be positive")

    @property
    def n_inputs(self) -> int:
        return self.layer_sizes[0]


@dataclass
class Network:
    weights: list[np.ndarray]
    biases: list[np.ndarray]
    activation: str = "relu"
    seed: int = 0

    @property
    def layer_sizes(self) -> tuple[int, ...]:
        return (self.weights[0].shape[0],) + tuple(w.shape[1] for w in self.weights)

    def params(self) -> list[np.ndarray]:
        """Parameters in storage order: per layer, weights then biases."""
        out = []
        for w, b in zip(self.weights, self.biases):
            out += [w, b]
        return out

    def copy(self) -> "Network":
        return Network([w.copy() for w in self.weights], [b.copy() for b in self.biases],
                       self.activation, self.seed)


@dataclass
class Gradients:
    weights: list[np.ndarray]
    biases: list[np.ndarray]

    def params(self) -> list[np.ndarray]:
        out = []
        for w, b in zip(self.weights, self.biases):
            out += [w, b]
        return out


@dataclass
class AdamState:
    m: list[np.ndarray]
    v: list[np.ndarray]
    t: int = 0

    @classmethod
    def zeros_like(cls, net: Network) -> "AdamState":
        return cls([np.zeros_like(p) for p in net.params()],
                   [np.zeros_like(p) for p in net.params()], 0)


@dataclass
class TrainReport:
    history: list[float]
    train_mse: float
    train_mae: float
    test_mse: float
    test_mae: float
    config: dict = field(default_factory=dict)
    seed: int = 0

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True, indent=1) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "TrainReport":
        return cls(**json.loads(text))


def init_network(cfg: NetworkConfig) -> tuple[Network, AdamState]:
    """He-normal weights from a seeded PCG64 stream, zero biases, zeroed Adam state."""
    rng = np.random.default_rng(cfg.seed)
    sizes = cfg.layer_sizes
    weights, biases = [], []
    for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
        weights.append(rng.standard_normal((fan_in, fan_out)) * np.sqrt(2.0 / fan_in))
        biases.append(np.zeros(fan_out))
    net = Network(weights, biases, cfg.hidden_activation, cfg.seed)
    return net, AdamState.zeros_like(net)


def _activate(z: np.ndarray, kind: str) -> np.ndarray:
    if kind == "relu":
        return np.maximum(z, 0.0)
    if kind == "sigmoid":
        return 1.0 / (1.0 + np.exp(-z))
    if kind == "identity":
        return z
    raise ValueError(f"unknown activation {kind!r}")


def _activate_grad(z: np.ndarray, a: np.ndarray, kind: str) -> np.ndarray:
    if kind == "relu":
        # subgradient at 0 is 0
        return (z > 0).astype(z.dtype)
    if kind == "sigmoid":
        return a * (1.0 - a)
    return np.ones_like(z)


@dataclass
class ForwardCache:
    activation: str
    pre: list[np.ndarray]   # i per layer, shape (batch, n_k)
    post: list[np.ndarray]  # o per layer incl. the input layer at index 0


def forward(net: Network, x, activation: str | None = None):
    """Evaluate the network.

    ``x`` is either one input vector of length ``n_0`` or a batch of shape
    ``(batch, n_0)``. Returns the output (a float for a single vector, an
    array of shape ``(batch,)`` otherwise) and the cache needed by
    :func:`backward`.
    """
    kind = activation or net.activation
    x = np.asarray(x, dtype=float)
    single = x.ndim == 1
    batch = np.atleast_2d(x)
    n0 = net.weights[0].shape[0]
    if batch.ndim != 2 or batch.shape[1] != n0:
        raise ValueError(f"expected input of length {n0}, got shape {x.shape}")

    pre, post = [], [batch]
    o = batch
    last = len(net.weights) - 1
    for k, (w, b) in enumerate(zip(net.weights, net.biases)):
        i = o @ w + b
        o = i if k == last else _activate(i, kind)
        pre.append(i)
        post.append(o)
    out = o[:, 0]
    cache = ForwardCache(kind, pre, post)
    return (float(out[0]) if single else out), cache


def backward(net: Network, cache: ForwardCache, target) -> Gradients:
    """Gradients of the mean over the batch of ``0.5 * (o - target)**2``."""
    out = cache.post[-1][:, 0]
    target = np.broadcast_to(np.asarray(target, dtype=float), out.shape)
    n = out.shape[0]
    delta = ((out - target) / n)[:, None]

    gw = [None] * len(net.weights)
    gb = [None] * len(net.biases)
    for k in range(len(net.weights) - 1, -1, -1):
        gw[k] = cache.post[k].T @ delta
        gb[k] = delta.sum(axis=0)
        if k > 0:
            delta = (delta @ net.weights[k].T) * _activate_grad(
                cache.pre[k - 1], cache.post[k], cache.activation)
    return Gradients(gw, gb)


def adam_step(net: Network, state: AdamState, grads: Gradients,
              cfg: NetworkConfig) -> tuple[Network, AdamState]:
    """One bias-corrected Adam update, applied in place."""
    state.t += 1
    b1, b2 = cfg.beta1, cfg.beta2
    bc1 = 1.0 - b1 ** state.t
    bc2 = 1.0 - b2 ** state.t
    for p, g, m, v in zip(net.params(), grads.params(), state.m, state.v):
        if p.shape != g.shape:
            raise ValueError(f"gradient shape {g.shape} does not match parameter {p.shape}")
        m *= b1
        m += (1.0 - b1) * g
        v *= b2
        v += (1.0 - b2) * (g * g)
        p -= cfg.learning_rate * (m / bc1) / (np.sqrt(v / bc2) + cfg.epsilon)
    return net, state


def predict(net: Network, x):
    out, _ = forward(net, x)
    return out


def _mse_mae(pred: np.ndarray, actual: np.ndarray) -> tuple[float, float]:
    r = pred - actual
    return float(np.mean(r * r)), float(np.mean(np.abs(r)))


def fit(net: Network, state: AdamState, X: np.ndarray, y: np.ndarray,
        cfg: NetworkConfig) -> list[float]:
    """Run ``cfg.epochs`` full-batch Adam steps on ``(X, y)``; returns MSE per epoch."""
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    history = []
    for epoch in range(1, cfg.epochs + 1):
        out, cache = forward(net, X)
        r = out - y
        loss = float(np.mean(r * r))
        if not np.isfinite(loss):
            raise TrainingDiverged(epoch, loss)
        history.append(loss)
        adam_step(net, state, backward(net, cache, y), cfg)
    if not all(np.all(np.isfinite(p)) for p in net.params()):
        raise TrainingDiverged(cfg.epochs, float("nan"))
    return history


def train(net: Network, state: AdamState, dataset, cfg: NetworkConfig
          ) -> tuple[Network, TrainReport]:
    """Train on ``dataset.train`` and score both splits after the last epoch.

    ``dataset`` is a :class:`exportcast.preprocess.Dataset`. Reported
    errors use the plain mean squared error, not the halved training loss.
    """
    X_tr, y_tr = dataset.train
    X_te, y_te = dataset.test
    history = fit(net, state, X_tr, y_tr, cfg)
    train_mse, train_mae = _mse_mae(predict(net, X_tr), y_tr)
    test_mse, test_mae = _mse_mae(predict(net, X_te), y_te)
    for value in (train_mse, test_mse):
        if not np.isfinite(value):
            raise TrainingDiverged(cfg.epochs, value)
    report = TrainReport(history, train_mse, train_mae, test_mse, test_mae,
                         config=asdict(cfg) | {"layer_sizes": list(cfg.layer_sizes)},
                         seed=cfg.seed)
    return net, report


# -- persistence -----------------------------------------------------------

def dumps_network(net: Network) -> bytes:
    header = json.dumps({"version": MODEL_VERSION,
                         "layer_sizes": list(net.layer_sizes),
                         "activation": net.activation,
                         "seed": int(net.seed)}, sort_keys=True).encode()
    body = b"".join(np.ascontiguousarray(p, dtype="<f8").tobytes() for p in net.params())
    return MODEL_MAGIC + b"\n" + struct.pack("<I", len(header)) + header + body


def loads_network(data: bytes) -> Network:
    magic, sep, rest = data.partition(b"\n")
    if magic != MODEL_MAGIC or not sep:
        raise ValueError("not an exportcast model file")
    (hlen,) = struct.unpack("<I", rest[:4])
    header = json.loads(rest[4:4 + hlen])
    if header.get("version") != MODEL_VERSION:
        raise ValueError(f"unsupported model format version {header.get('version')!r}")
    sizes = header["layer_sizes"]
    body = rest[4 + hlen:]
    expected = sum(a * b + b for a, b in zip(sizes[:-1], sizes[1:])) * 8
    if len(body) != expected:
        raise ValueError(f"model body has {len(body)} bytes, expected {expected}")
    flat = np.frombuffer(body, dtype="<f8").astype(float)
    weights, biases, pos = [], [], 0
    for a, b in zip(sizes[:-1], sizes[1:]):
        weights.append(flat[pos:pos + a * b].reshape(a, b).copy())
        pos += a * b
        biases.append(flat[pos:pos + b].copy())
        pos += b
    return Network(weights, biases, header["activation"], header["seed"])


def save_network(net: Network, path) -> None:
    Path(path).write_bytes(dumps_network(net))


def load_network(path) -> Network:
    return loads_network(Path(path).read_bytes())
