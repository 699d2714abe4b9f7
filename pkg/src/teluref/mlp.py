"""From-scratch dense binary classifier for mention pairs.

Architecture: input -> relu(w1 x + b1) -> relu(w2 h1 + b2) -> sigmoid(w_out h2),
with inverted dropout after each hidden layer during training, binary
cross-entropy loss, and Adam updates with bias correction. Everything runs
in float64 so analytic gradients can be held to finite-difference fidelity;
at this scale (226 x 512 x 128) that costs nothing.

Training is fully deterministic: one seeded generator drives shuffling and
dropout masks, so (seed, data, config) fixes the resulting model bytes.
"""

from __future__ import annotations

import json
import time
from dataclasses import asdict, dataclass, field

import numpy as np

from .base import ParamsMixin, check_labels, check_matrix
from .errors import TelurefError, ValidationError
from .sampling import PairDataset

_LOG_CLAMP = 1e-12


class NonFiniteInputError(ValidationError):
    pass


class NonFiniteGradientError(TelurefError):
    pass


class StaleCacheError(TelurefError):
    pass


class EmptyDatasetError(ValidationError):
    pass


class ModelFormatError(ValidationError):
    pass


class NotFittedError(TelurefError):
    pass


@dataclass(frozen=True)
class MlpConfig:
    input_dim: int = 226
    hidden1: int = 512
    hidden2: int = 128
    dropout_prob: float = 0.5
    batch_size: int = 128
    learning_rate: float = 0.001
    adam_beta1: float = 0.9
    adam_beta2: float = 0.999
    adam_epsilon: float = 1e-8
    epochs: int = 100
    seed: int = 0
    init: str = "he"  # "he" or "xavier"
    output_bias: bool = False
    early_stop_loss: float = 1e-4

    def __post_init__(self):
        if min(self.input_dim, self.hidden1, self.hidden2) < 1:
            raise ValidationError("all layer dims must be positive")
        if not 0.0 <= self.dropout_prob < 1.0:
            raise ValidationError(
                f"dropout_prob must be in [0, 1), got {self.dropout_prob}"
            )
        if self.init not in ("he", "xavier"):
            raise ValidationError(f"init must be 'he' or 'xavier', got {self.init!r}")
        if self.batch_size < 1 or self.epochs < 1:
            raise ValidationError("batch_size and epochs must be positive")


@dataclass
class MlpModel:
    config: MlpConfig
    w1: np.ndarray  # (hidden1, input_dim)
    b1: np.ndarray  # (hidden1,)
    w2: np.ndarray  # (hidden2, hidden1)
    b2: np.ndarray  # (hidden2,)
    w_out: np.ndarray  # (hidden2,)
    b_out: float = 0.0
    adam_m: dict = field(default_factory=dict)
    adam_v: dict = field(default_factory=dict)
    adam_t: int = 0

    def parameters(self) -> dict[str, np.ndarray]:
        params = {"w1": self.w1, "b1": self.b1, "w2": self.w2, "b2": self.b2,
                  "w_out": self.w_out}
        if self.config.output_bias:
            params["b_out"] = self.b_out
        return params


@dataclass
class TrainReport:
    epoch_losses: list[float] = field(default_factory=list)
    epoch_accuracies: list[float] = field(default_factory=list)
    epochs_run: int = 0
    wall_time_s: float = 0.0

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class ForwardCache:
    x: np.ndarray
    z1: np.ndarray
    h1d: np.ndarray
    z2: np.ndarray
    h2d: np.ndarray
    mask1: np.ndarray | None
    mask2: np.ndarray | None
    probs: np.ndarray
    step_token: int


def _uniform_bound(cfg: MlpConfig, fan_in: int, fan_out: int) -> float:
    if cfg.init == "he":
        return np.sqrt(6.0 / fan_in)
    return np.sqrt(6.0 / (fan_in + fan_out))


def init_model(cfg: MlpConfig) -> MlpModel:
    """Seeded uniform weight init (He by default for the relu layers),
    zero biases, zero Adam moments."""
    rng = np.random.default_rng(cfg.seed)
    def draw(shape, fan_in, fan_out):
        bound = _uniform_bound(cfg, fan_in, fan_out)
        return rng.uniform(-bound, bound, size=shape)

    model = MlpModel(
        config=cfg,
        w1=draw((cfg.hidden1, cfg.input_dim), cfg.input_dim, cfg.hidden1),
        b1=np.zeros(cfg.hidden1),
        w2=draw((cfg.hidden2, cfg.hidden1), cfg.hidden1, cfg.hidden2),
        b2=np.zeros(cfg.hidden2),
        w_out=draw(cfg.hidden2, cfg.hidden2, 1),
        b_out=0.0,
    )
    for name, p in model.parameters().items():
        model.adam_m[name] = np.zeros_like(p, dtype=np.float64)
        model.adam_v[name] = np.zeros_like(p, dtype=np.float64)
    return model


def _sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def forward(
    model: MlpModel,
    x,
    dropout_rng: np.random.Generator | None = None,
    dropout_prob: float | None = None,
) -> tuple[np.ndarray, ForwardCache]:
    """Run the network on a batch (or single vector).

    Eval mode (no rng) is deterministic and applies no dropout. Train mode
    applies inverted dropout after each hidden layer: surviving activations
    are scaled by 1/keep so eval needs no rescaling.
    """
    X = check_matrix(x, "x", n_cols=model.config.input_dim)
    if not np.isfinite(X).all():
        raise NonFiniteInputError("input contains NaN or infinity")
    if dropout_prob is None:
        dropout_prob = model.config.dropout_prob
    train_mode = dropout_rng is not None and dropout_prob > 0.0

    z1 = X @ model.w1.T + model.b1
    h1 = np.maximum(z1, 0.0)
    mask1 = mask2 = None
    if train_mode:
        keep = 1.0 - dropout_prob
        mask1 = (dropout_rng.random(h1.shape) < keep) / keep
        h1d = h1 * mask1
    else:
        h1d = h1

    z2 = h1d @ model.w2.T + model.b2
    h2 = np.maximum(z2, 0.0)
    if train_mode:
        keep = 1.0 - dropout_prob
        mask2 = (dropout_rng.random(h2.shape) < keep) / keep
        h2d = h2 * mask2
    else:
        h2d = h2

    logits = h2d @ model.w_out
    if model.config.output_bias:
        logits = logits + model.b_out
    probs = np.clip(_sigmoid(logits), _LOG_CLAMP, 1.0 - _LOG_CLAMP)
    cache = ForwardCache(
        x=X, z1=z1, h1d=h1d, z2=z2, h2d=h2d,
        mask1=mask1, mask2=mask2, probs=probs, step_token=model.adam_t,
    )
    return probs, cache


def bce_loss(predictions, labels) -> float:
    """Mean binary cross-entropy with log arguments clamped at 1e-12."""
    p = np.clip(np.asarray(predictions, dtype=np.float64), _LOG_CLAMP, 1.0 - _LOG_CLAMP)
    y = np.asarray(labels, dtype=np.float64)
    return float(np.mean(-(y * np.log(p) + (1.0 - y) * np.log(1.0 - p))))


def backward(model: MlpModel, cache: ForwardCache, labels) -> dict[str, np.ndarray]:
    """Gradients of the batch-mean BCE for every parameter tensor.

    The relu derivative is 0 at negative and exactly-zero pre-activations;
    dropout masks are reused from the forward cache.
    """
    if cache.step_token != model.adam_t:
        raise StaleCacheError(
            "forward cache predates an optimizer step; rerun forward"
        )
    y = np.asarray(labels, dtype=np.float64).reshape(-1)
    batch = cache.x.shape[0]
    delta = (cache.probs - y) / batch  # d(mean BCE)/d(logit)

    grads: dict[str, np.ndarray] = {"w_out": cache.h2d.T @ delta}
    if model.config.output_bias:
        grads["b_out"] = np.float64(delta.sum())

    dh2d = np.outer(delta, model.w_out)
    if cache.mask2 is not None:
        dh2d = dh2d * cache.mask2
    dz2 = dh2d * (cache.z2 > 0.0)
    grads["w2"] = dz2.T @ cache.h1d
    grads["b2"] = dz2.sum(axis=0)

    dh1d = dz2 @ model.w2
    if cache.mask1 is not None:
        dh1d = dh1d * cache.mask1
    dz1 = dh1d * (cache.z1 > 0.0)
    grads["w1"] = dz1.T @ cache.x
    grads["b1"] = dz1.sum(axis=0)
    return grads


def adam_step(model: MlpModel, grads: dict, cfg: MlpConfig) -> MlpModel:
    """Standard Adam with bias correction; increments the step counter once."""
    for g in grads.values():
        if not np.isfinite(g).all():
            raise NonFiniteGradientError("gradient contains NaN or infinity")
    model.adam_t += 1
    b1, b2 = cfg.adam_beta1, cfg.adam_beta2
    bias1 = 1.0 - b1 ** model.adam_t
    bias2 = 1.0 - b2 ** model.adam_t
    for name, g in grads.items():
        m = model.adam_m[name] = b1 * model.adam_m[name] + (1.0 - b1) * g
        v = model.adam_v[name] = b2 * model.adam_v[name] + (1.0 - b2) * (g * g)
        update = cfg.learning_rate * (m / bias1) / (np.sqrt(v / bias2) + cfg.adam_epsilon)
        if name == "b_out":
            model.b_out -= float(update)
        else:
            getattr(model, name).__isub__(update)
    return model


def train(model: MlpModel, dataset: PairDataset, cfg: MlpConfig) -> tuple[MlpModel, TrainReport]:
    """Seeded minibatch training: shuffle each epoch, forward/backward/Adam
    per batch, early stop once the epoch mean loss drops below the floor."""
    n = len(dataset)
    if n == 0:
        raise EmptyDatasetError("training dataset is empty")
    X = np.asarray(dataset.vectors, dtype=np.float64)
    y = dataset.labels.astype(np.float64)
    rng = np.random.default_rng(cfg.seed)
    report = TrainReport()
    started = time.perf_counter()

    for _ in range(cfg.epochs):
        perm = rng.permutation(n)
        loss_sum = 0.0
        correct = 0
        for start in range(0, n, cfg.batch_size):
            idx = perm[start:start + cfg.batch_size]
            probs, cache = forward(
                model, X[idx], dropout_rng=rng, dropout_prob=cfg.dropout_prob
            )
            loss_sum += bce_loss(probs, y[idx]) * len(idx)
            correct += int(((probs > 0.5) == (y[idx] > 0.5)).sum())
            grads = backward(model, cache, y[idx])
            adam_step(model, grads, cfg)
        report.epoch_losses.append(loss_sum / n)
        report.epoch_accuracies.append(correct / n)
        report.epochs_run += 1
        if report.epoch_losses[-1] < cfg.early_stop_loss:
            break

    report.wall_time_s = time.perf_counter() - started
    return model, report


def predict_proba_matrix(model: MlpModel, X) -> np.ndarray:
    """Eval-mode pair probabilities for a batch of pair vectors."""
    probs, _ = forward(model, X)
    return probs


def predict_pair(model: MlpModel, pair_vec) -> float:
    """Eval-mode probability that the pair is a true antecedent-anaphor pair."""
    return float(predict_proba_matrix(model, np.atleast_2d(pair_vec))[0])


# --- persistence -----------------------------------------------------------

_FORMAT_VERSION = 1


def model_to_dict(model: MlpModel, include_adam: bool = False) -> dict:
    cfg = model.config
    data = {
        "version": _FORMAT_VERSION,
        "config": asdict(cfg),
        "dims": [cfg.input_dim, cfg.hidden1, cfg.hidden2, 1],
        "w1": model.w1.tolist(),
        "b1": model.b1.tolist(),
        "w2": model.w2.tolist(),
        "b2": model.b2.tolist(),
        "w_out": model.w_out.tolist(),
    }
    if cfg.output_bias:
        data["b_out"] = float(model.b_out)
    if include_adam:
        data["adam"] = {
            "t": model.adam_t,
            "m": {k: np.asarray(v).tolist() for k, v in model.adam_m.items()},
            "v": {k: np.asarray(v).tolist() for k, v in model.adam_v.items()},
        }
    return data


def save_model(model: MlpModel, include_adam: bool = False) -> bytes:
    """Versioned JSON with full-precision decimal floats.

    Adam state is a checkpoint concern; inference files exclude it.
    """
    return (json.dumps(model_to_dict(model, include_adam), sort_keys=True) + "\n").encode("utf-8")


def load_model(data: bytes | str) -> MlpModel:
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    try:
        obj = json.loads(data)
    except json.JSONDecodeError as exc:
        raise ModelFormatError(f"invalid JSON: {exc}") from exc
    if not isinstance(obj, dict) or obj.get("version") != _FORMAT_VERSION:
        raise ModelFormatError(f"unsupported model version: {obj.get('version')!r}")
    try:
        cfg = MlpConfig(**obj["config"])
    except (KeyError, TypeError, ValidationError) as exc:
        raise ModelFormatError(f"bad config block: {exc}") from exc
    dims = obj.get("dims")
    if dims != [cfg.input_dim, cfg.hidden1, cfg.hidden2, 1]:
        raise ModelFormatError(f"dims {dims} disagree with config")

    def load_array(key, shape):
        try:
            arr = np.array(obj[key], dtype=np.float64)
        except (KeyError, ValueError) as exc:
            raise ModelFormatError(f"missing or invalid tensor {key!r}") from exc
        if arr.shape != shape:
            raise ModelFormatError(f"{key} has shape {arr.shape}, expected {shape}")
        return arr

    model = MlpModel(
        config=cfg,
        w1=load_array("w1", (cfg.hidden1, cfg.input_dim)),
        b1=load_array("b1", (cfg.hidden1,)),
        w2=load_array("w2", (cfg.hidden2, cfg.hidden1)),
        b2=load_array("b2", (cfg.hidden2,)),
        w_out=load_array("w_out", (cfg.hidden2,)),
        b_out=float(obj.get("b_out", 0.0)),
    )
    for name, p in model.parameters().items():
        model.adam_m[name] = np.zeros_like(p, dtype=np.float64)
        model.adam_v[name] = np.zeros_like(p, dtype=np.float64)
    adam = obj.get("adam")
    if adam is not None:
        model.adam_t = int(adam["t"])
        for name in model.parameters():
            model.adam_m[name] = np.array(adam["m"][name], dtype=np.float64)
            model.adam_v[name] = np.array(adam["v"][name], dtype=np.float64)
    return model


class MentionPairClassifier(ParamsMixin):
    """Estimator-style front end over the functional training core.

    fit consumes pair vectors X (n, d) and boolean labels y; predict_proba
    returns the two-column [P(false), P(true)] convention so the classifier
    drops into pipelines expecting the standard interface.
    """

    def __init__(
        self,
        hidden1: int = 512,
        hidden2: int = 128,
        dropout_prob: float = 0.5,
        batch_size: int = 128,
        learning_rate: float = 0.001,
        adam_beta1: float = 0.9,
        adam_beta2: float = 0.999,
        adam_epsilon: float = 1e-8,
        epochs: int = 100,
        seed: int = 0,
        init: str = "he",
        output_bias: bool = False,
        early_stop_loss: float = 1e-4,
        threshold: float = 0.5,
    ):
        self.hidden1 = hidden1
        self.hidden2 = hidden2
        self.dropout_prob = dropout_prob
        self.batch_size = batch_size
        self.learning_rate = learning_rate
        self.adam_beta1 = adam_beta1
        self.adam_beta2 = adam_beta2
        self.adam_epsilon = adam_epsilon
        self.epochs = epochs
        self.seed = seed
        self.init = init
        self.output_bias = output_bias
        self.early_stop_loss = early_stop_loss
        self.threshold = threshold

    def _config(self, input_dim: int) -> MlpConfig:
        return MlpConfig(
            input_dim=input_dim,
            hidden1=self.hidden1,
            hidden2=self.hidden2,
            dropout_prob=self.dropout_prob,
            batch_size=self.batch_size,
            learning_rate=self.learning_rate,
            adam_beta1=self.adam_beta1,
            adam_beta2=self.adam_beta2,
            adam_epsilon=self.adam_epsilon,
            epochs=self.epochs,
            seed=self.seed,
            init=self.init,
            output_bias=self.output_bias,
            early_stop_loss=self.early_stop_loss,
        )

    def fit(self, X, y):
        X = check_matrix(X, "X")
        y = check_labels(y, n=len(X))
        cfg = self._config(input_dim=X.shape[1])
        model = init_model(cfg)
        self.model_, self.report_ = train(
            model, PairDataset(vectors=X, labels=y), cfg
        )
        return self

    def _require_fitted(self) -> MlpModel:
        model = getattr(self, "model_", None)
        if model is None:
            raise NotFittedError("call fit (or load) before predicting")
        return model

    def predict_proba(self, X) -> np.ndarray:
        model = self._require_fitted()
        p = predict_proba_matrix(model, check_matrix(X, "X", model.config.input_dim))
        return np.column_stack([1.0 - p, p])

    def predict(self, X) -> np.ndarray:
        return self.predict_proba(X)[:, 1] > self.threshold

    def score(self, X, y) -> float:
        y = check_labels(y)
        return float((self.predict(X) == y).mean())

    def save(self, path) -> None:
        with open(path, "wb") as fh:
            fh.write(save_model(self._require_fitted()))

    @classmethod
    def load(cls, path) -> "MentionPairClassifier":
        with open(path, "rb") as fh:
            model = load_model(fh.read())
        cfg = model.config
        clf = cls(
            hidden1=cfg.hidden1, hidden2=cfg.hidden2, dropout_prob=cfg.dropout_prob,
            batch_size=cfg.batch_size, learning_rate=cfg.learning_rate,
            adam_beta1=cfg.adam_beta1, adam_beta2=cfg.adam_beta2,
            adam_epsilon=cfg.adam_epsilon, epochs=cfg.epochs, seed=cfg.seed,
            init=cfg.init, output_bias=cfg.output_bias,
            early_stop_loss=cfg.early_stop_loss,
        )
        clf.model_ = model
        return clf
