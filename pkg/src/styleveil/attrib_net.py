"""The lightweight internal authorship classifier.

A fully connected network over feature vectors, trained once on the
attacker split.  Also exposes the analytic input gradient of a class
logit, which drives integrated-gradients attribution.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np


class SingleAuthor(Exception):
    pass


class DimensionMismatch(Exception):
    pass


class InvalidClass(Exception):
    pass


@dataclass
class TrainConfig:
    hidden_dims: tuple[int, ...] = (512,)
    epochs: int = 50
    learning_rate: float = 1e-3
    batch_size: int = 32
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    val_fraction: float = 0.1
    seed: int = 0


@dataclass
class AttributionModel:
    weights: list[np.ndarray]
    biases: list[np.ndarray]
    author_labels: list[str]
    feature_space_checksum: str = ""
    training_meta: dict = field(default_factory=dict)

    @property
    def input_dim(self) -> int:
        return self.weights[0].shape[0]

    @property
    def layer_dims(self) -> list[int]:
        return [self.weights[0].shape[0]] + [w.shape[1] for w in self.weights]

    def _check(self, v: np.ndarray) -> np.ndarray:
        v = np.asarray(v, dtype=np.float64)
        if v.shape != (self.input_dim,):
            raise DimensionMismatch(f"expected dim {self.input_dim}, got {v.shape}")
        return v

    def logits(self, v: np.ndarray) -> np.ndarray:
        a = self._check(v)
        for i, (W, b) in enumerate(zip(self.weights, self.biases)):
            a = a @ W + b
            if i < len(self.weights) - 1:
                a = np.maximum(a, 0.0)
        return a

    def forward(self, v: np.ndarray) -> np.ndarray:
        """Softmax probability over authors."""
        z = self.logits(v)
        z = z - z.max()
        e = np.exp(z)
        return e / e.sum()

    def predict(self, v: np.ndarray) -> str:
        return self.author_labels[int(np.argmax(self.logits(v)))]

    def gradient(self, v: np.ndarray, class_index: int) -> np.ndarray:
        """d logit[class_index] / d input, via backprop through ReLU layers."""
        if not 0 <= class_index < len(self.author_labels):
            raise InvalidClass(f"class index {class_index} out of range")
        a = self._check(v)
        pre: list[np.ndarray] = []
        act = a
        for i, (W, b) in enumerate(zip(self.weights, self.biases)):
            z = act @ W + b
            pre.append(z)
            act = np.maximum(z, 0.0) if i < len(self.weights) - 1 else z
        grad = np.zeros(self.weights[-1].shape[1])
        grad[class_index] = 1.0
        for i in range(len(self.weights) - 1, -1, -1):
            grad = self.weights[i] @ grad
            if i > 0:
                grad = grad * (pre[i - 1] > 0.0)
        return grad

    def logits_batch(self, X: np.ndarray) -> np.ndarray:
        a = np.asarray(X, dtype=np.float64)
        for i, (W, b) in enumerate(zip(self.weights, self.biases)):
            a = a @ W + b
            if i < len(self.weights) - 1:
                a = np.maximum(a, 0.0)
        return a

    def gradient_batch(self, X: np.ndarray, class_index: int) -> np.ndarray:
        """Row-wise logit gradients for a batch of inputs (one class)."""
        if not 0 <= class_index < len(self.author_labels):
            raise InvalidClass(f"class index {class_index} out of range")
        X = np.asarray(X, dtype=np.float64)
        pre: list[np.ndarray] = []
        act = X
        for i, (W, b) in enumerate(zip(self.weights, self.biases)):
            z = act @ W + b
            pre.append(z)
            act = np.maximum(z, 0.0) if i < len(self.weights) - 1 else z
        grad = np.zeros((X.shape[0], self.weights[-1].shape[1]))
        grad[:, class_index] = 1.0
        for i in range(len(self.weights) - 1, -1, -1):
            grad = grad @ self.weights[i].T
            if i > 0:
                grad = grad * (pre[i - 1] > 0.0)
        return grad

    # -- serialization ------------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "format_version": 1,
            "layer_dims": self.layer_dims,
            "weights": [w.tolist() for w in self.weights],
            "biases": [b.tolist() for b in self.biases],
            "author_labels": self.author_labels,
            "feature_space_checksum": self.feature_space_checksum,
            "training_meta": self.training_meta,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "AttributionModel":
        return cls(
            weights=[np.asarray(w, dtype=np.float64) for w in d["weights"]],
            biases=[np.asarray(b, dtype=np.float64) for b in d["biases"]],
            author_labels=list(d["author_labels"]),
            feature_space_checksum=d.get("feature_space_checksum", ""),
            training_meta=d.get("training_meta", {}),
        )

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_dict()), encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> "AttributionModel":
        return cls.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


def _glorot(rng: np.random.RandomState, fan_in: int, fan_out: int) -> np.ndarray:
    limit = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-limit, limit, size=(fan_in, fan_out))


def train(samples: list[tuple[np.ndarray, str]], config: TrainConfig | None = None,
          feature_space_checksum: str = "") -> AttributionModel:
    """Train the classifier with minibatch Adam; deterministic given seed."""
    config = config or TrainConfig()
    if not samples:
        raise ValueError("no training samples")
    labels = sorted({a for _, a in samples})
    if len(labels) < 2:
        raise SingleAuthor("need at least two distinct authors")
    dim = np.asarray(samples[0][0]).shape[0]
    for v, _ in samples:
        if np.asarray(v).shape != (dim,):
            raise DimensionMismatch("inconsistent feature vector dimensions")

    label_idx = {a: i for i, a in enumerate(labels)}
    X = np.stack([np.asarray(v, dtype=np.float64) for v, _ in samples])
    y = np.array([label_idx[a] for _, a in samples])

    rng = np.random.RandomState(config.seed)
    perm = rng.permutation(len(X))
    X, y = X[perm], y[perm]
    n_val = int(round(config.val_fraction * len(X)))
    n_val = min(max(n_val, 0), len(X) - 1)
    X_val, y_val = X[:n_val], y[:n_val]
    X_tr, y_tr = X[n_val:], y[n_val:]

    dims = [dim, *config.hidden_dims, len(labels)]
    Ws = [_glorot(rng, dims[i], dims[i + 1]) for i in range(len(dims) - 1)]
    bs = [np.zeros(dims[i + 1]) for i in range(len(dims) - 1)]
    mW = [np.zeros_like(w) for w in Ws]
    vW = [np.zeros_like(w) for w in Ws]
    mb = [np.zeros_like(b) for b in bs]
    vb = [np.zeros_like(b) for b in bs]

    losses: list[float] = []
    step = 0
    for _ in range(config.epochs):
        order = rng.permutation(len(X_tr))
        epoch_loss = 0.0
        for start in range(0, len(X_tr), config.batch_size):
            idx = order[start:start + config.batch_size]
            xb, yb = X_tr[idx], y_tr[idx]
            # forward
            acts = [xb]
            pres = []
            a = xb
            for i in range(len(Ws)):
                z = a @ Ws[i] + bs[i]
                pres.append(z)
                a = np.maximum(z, 0.0) if i < len(Ws) - 1 else z
                acts.append(a)
            z = acts[-1] - acts[-1].max(axis=1, keepdims=True)
            e = np.exp(z)
            probs = e / e.sum(axis=1, keepdims=True)
            epoch_loss += -np.sum(np.log(probs[np.arange(len(yb)), yb] + 1e-12))
            # backward
            delta = probs.copy()
            delta[np.arange(len(yb)), yb] -= 1.0
            delta /= len(yb)
            step += 1
            for i in range(len(Ws) - 1, -1, -1):
                gW = acts[i].T @ delta
                gb = delta.sum(axis=0)
                if i > 0:
                    delta = (delta @ Ws[i].T) * (pres[i - 1] > 0.0)
                for buf_m, buf_v, param, g in ((mW, vW, Ws, gW), (mb, vb, bs, gb)):
                    buf_m[i] = config.beta1 * buf_m[i] + (1 - config.beta1) * g
                    buf_v[i] = config.beta2 * buf_v[i] + (1 - config.beta2) * g * g
                    mhat = buf_m[i] / (1 - config.beta1 ** step)
                    vhat = buf_v[i] / (1 - config.beta2 ** step)
                    param[i] = param[i] - config.learning_rate * mhat / (np.sqrt(vhat) + config.eps)
        losses.append(epoch_loss / max(len(X_tr), 1))

    model = AttributionModel(weights=Ws, biases=bs, author_labels=labels,
                             feature_space_checksum=feature_space_checksum)
    val_acc = None
    if len(X_val):
        preds = model.logits_batch(X_val).argmax(axis=1)
        val_acc = float(np.mean(preds == y_val))
    model.training_meta = {
        "seed": config.seed,
        "epochs": config.epochs,
        "learning_rate": config.learning_rate,
        "batch_size": config.batch_size,
        "final_losses": [round(l, 9) for l in losses[-5:]],
        "validation_accuracy": val_acc,
    }
    return model
