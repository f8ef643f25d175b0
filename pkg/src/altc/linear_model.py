"""One-vs-rest sigmoid logistic regression with class-weighted BCE.

Each of the K classes gets an independent binary head p_k = sigmoid(w_k.x
+ b_k); a single-label ground truth is one-hot encoded into the multilabel
loss, and prediction takes the argmax over the independent heads.  The
loss for one instance is

    L = - sum_k cw_k * ( y_k*log(p_k) + (1-y_k)*log(1-p_k) )

with probabilities clamped away from {0, 1} before the logs, plus an
optional L2 penalty (l2/2)*||W||^2 on the weights (never the biases).
Training is plain mini-batch gradient descent with a fixed learning rate;
heads start at zero (the per-head objective is convex), so two runs with
the same seed produce bitwise-identical parameters.
"""

from __future__ import annotations

import json
import subprocess
from dataclasses import dataclass, asdict
from typing import Protocol, runtime_checkable

import numpy as np
import scipy.sparse as sp

from .corpus import ClassDistribution
from .errors import (
    DimensionMismatchError,
    EmptyTrainingSetError,
    LengthMismatchError,
    NonFiniteLossError,
    ZeroClassCountError,
)
from .tfidf import SparseVector, stack

_P_LO = np.nextafter(0.0, 1.0)
_P_HI = np.nextafter(1.0, 0.0)


def sigmoid(z: np.ndarray) -> np.ndarray:
    """Numerically stable logistic function, clipped to the open (0, 1)."""
    z = np.asarray(z, dtype=np.float64)
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    # float64 saturates for |z| > ~36; keep the contract p in (0, 1)
    return np.clip(out, _P_LO, _P_HI)


@dataclass(frozen=True)
class ClassWeights:
    """Positive per-class loss multipliers."""

    w: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.w, dtype=np.float64)
        object.__setattr__(self, "w", w)
        if w.ndim != 1 or len(w) < 2:
            raise ValueError("class weights must be a 1-D vector of length >= 2")
        if not np.all(np.isfinite(w)) or np.any(w <= 0):
            raise ValueError("class weights must be positive and finite")

    @classmethod
    def uniform(cls, k: int) -> "ClassWeights":
        return cls(w=np.ones(k))


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 0.1
    epochs: int = 50
    batch_size: int = 64
    l2_penalty: float = 1e-4
    seed: int = 0
    prob_clamp: float = 1e-7
    early_stop_patience: int = 5

    def __post_init__(self):
        # 0 is allowed as a no-op diagnostic (one pass records the loss
        # without touching the parameters).
        if self.learning_rate < 0:
            raise ValueError("learning_rate must be non-negative")
        if self.epochs <= 0 or self.batch_size <= 0:
            raise ValueError("epochs and batch_size must be positive")
        if self.l2_penalty < 0:
            raise ValueError("l2_penalty must be non-negative")
        if not 0.0 < self.prob_clamp < 0.5:
            raise ValueError("prob_clamp must be in (0, 0.5)")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "TrainConfig":
        return cls(**d)


@dataclass
class OvrLinearModel:
    """K independent sigmoid heads over a V-dimensional feature space."""

    weights: np.ndarray  # (K, V)
    biases: np.ndarray   # (K,)

    def __post_init__(self):
        self.weights = np.asarray(self.weights, dtype=np.float64)
        self.biases = np.asarray(self.biases, dtype=np.float64)
        if self.weights.ndim != 2 or self.biases.shape != (self.weights.shape[0],):
            raise ValueError("weights must be (K, V) and biases (K,)")
        if not (np.all(np.isfinite(self.weights)) and np.all(np.isfinite(self.biases))):
            raise ValueError("model parameters must be finite")

    @classmethod
    def zeros(cls, num_classes: int, feature_dim: int) -> "OvrLinearModel":
        return cls(weights=np.zeros((num_classes, feature_dim)),
                   biases=np.zeros(num_classes))

    @property
    def num_classes(self) -> int:
        return self.weights.shape[0]

    @property
    def feature_dim(self) -> int:
        return self.weights.shape[1]

    def copy(self) -> "OvrLinearModel":
        return OvrLinearModel(weights=self.weights.copy(), biases=self.biases.copy())

    def predict_proba(self, x: SparseVector) -> np.ndarray:
        return predict_proba(self, x)


@runtime_checkable
class ProbabilitySource(Protocol):
    """Anything that maps a featurized document to K class probabilities.

    The OvR model implements this directly; adapters for external
    predictors (e.g. a fine-tuned transformer running as a separate
    process) implement the same surface.
    """

    def predict_proba(self, x: SparseVector) -> np.ndarray: ...


def compute_class_weights(dist: ClassDistribution) -> ClassWeights:
    """Balanced inverse-frequency weights: w_k = total / (K * count_k)."""
    counts = np.asarray(dist.counts, dtype=np.float64)
    for k, c in enumerate(counts):
        if c == 0:
            raise ZeroClassCountError(k)
    k = len(counts)
    return ClassWeights(w=dist.total / (k * counts))


def predict_proba(model: OvrLinearModel, x: SparseVector) -> np.ndarray:
    """Per-head probabilities sigmoid(w_k.x + b_k); independent, so the
    entries need not sum to one."""
    if x.dim != model.feature_dim:
        raise DimensionMismatchError(model.feature_dim, x.dim)
    z = model.weights[:, x.indices] @ x.values + model.biases
    return sigmoid(z)


def predict_proba_matrix(model: OvrLinearModel, x: sp.csr_matrix) -> np.ndarray:
    """Batch variant of :func:`predict_proba` over CSR rows -> (n, K)."""
    if x.shape[1] != model.feature_dim:
        raise DimensionMismatchError(model.feature_dim, x.shape[1])
    z = x @ model.weights.T + model.biases
    return sigmoid(z)


def predict_label(model: OvrLinearModel, x: SparseVector) -> int:
    """Argmax over heads; exact ties go to the lowest class index."""
    return int(np.argmax(predict_proba(model, x)))


def weighted_bce_loss(
    p: np.ndarray,
    y: np.ndarray,
    cw: ClassWeights,
    eps: float = 1e-7,
) -> float:
    """Class-weighted binary cross-entropy of one prediction.

    Probabilities are clamped into [eps, 1-eps] before the logarithms, so
    the value is finite (and >= 0) for any p in [0, 1].
    """
    p = np.asarray(p, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if p.shape != y.shape or p.shape != cw.w.shape:
        raise LengthMismatchError(
            f"p {p.shape}, y {y.shape}, class weights {cw.w.shape} must agree")
    pc = np.clip(p, eps, 1.0 - eps)
    terms = cw.w * (y * np.log(pc) + (1.0 - y) * np.log(1.0 - pc))
    return float(-np.sum(terms))


def regularized_instance_loss(
    model: OvrLinearModel,
    x: SparseVector,
    y: np.ndarray,
    cw: ClassWeights,
    l2: float,
    eps: float = 1e-7,
) -> float:
    """Full single-instance objective: weighted BCE + (l2/2)*||W||^2."""
    loss = weighted_bce_loss(predict_proba(model, x), y, cw, eps)
    if l2 > 0:
        loss += 0.5 * l2 * float(np.sum(model.weights ** 2))
    return loss


def loss_gradient(
    model: OvrLinearModel,
    x: SparseVector,
    y: np.ndarray,
    cw: ClassWeights,
    l2: float = 0.0,
) -> tuple[np.ndarray, np.ndarray]:
    """Analytic gradient of :func:`regularized_instance_loss`.

    dL/dz_k = cw_k * (p_k - y_k), so the weight gradient is that scalar
    times x (dense (K, V), supported on x's indices) plus l2 * w_k, and the
    bias gradient is the scalar itself.
    """
    p = predict_proba(model, x)
    y = np.asarray(y, dtype=np.float64)
    if y.shape != p.shape:
        raise LengthMismatchError(f"y {y.shape} must have length {p.shape[0]}")
    delta = cw.w * (p - y)  # (K,)
    grad_w = np.zeros_like(model.weights)
    grad_w[:, x.indices] = np.outer(delta, x.values)
    if l2 > 0:
        grad_w += l2 * model.weights
    return grad_w, delta


def _one_hot(labels: np.ndarray, k: int) -> np.ndarray:
    out = np.zeros((len(labels), k))
    out[np.arange(len(labels)), labels] = 1.0
    return out


def fit(
    train: list[tuple[SparseVector, int]],
    cfg: TrainConfig,
    cw: ClassWeights,
    init: OvrLinearModel | None = None,
    *,
    val: list[tuple[SparseVector, int]] | None = None,
) -> tuple[OvrLinearModel, list[float]]:
    """Mini-batch gradient descent on the class-weighted BCE objective.

    Starts from zeros unless ``init`` provides a warm start.  Shuffling is
    seeded from ``cfg.seed``, so identical inputs give identical models.
    Returns the trained model and the mean objective per epoch (recorded
    before each batch update).  When ``val`` is given, training stops
    early after ``cfg.early_stop_patience`` epochs without improvement of
    the held-out loss.
    """
    if not train:
        raise EmptyTrainingSetError("fit() needs at least one instance")
    k = len(cw.w)
    x_all = stack([x for x, _ in train])
    labels = np.array([label for _, label in train], dtype=np.int64)
    if labels.min() < 0 or labels.max() >= k:
        raise ValueError(f"labels must be in [0, {k})")
    y_all = _one_hot(labels, k)
    n, dim = x_all.shape

    if init is not None:
        if init.feature_dim != dim or init.num_classes != k:
            raise DimensionMismatchError(dim, init.feature_dim)
        model = init.copy()
    else:
        model = OvrLinearModel.zeros(k, dim)

    x_val = y_val = None
    if val:
        x_val = stack([x for x, _ in val])
        y_val = _one_hot(np.array([label for _, label in val]), k)

    rng = np.random.default_rng(cfg.seed)
    eps, l2, lr = cfg.prob_clamp, cfg.l2_penalty, cfg.learning_rate
    history: list[float] = []
    best_val = np.inf
    stale = 0

    for _ in range(cfg.epochs):
        perm = rng.permutation(n)
        epoch_loss = 0.0
        for start in range(0, n, cfg.batch_size):
            rows = perm[start:start + cfg.batch_size]
            xb, yb = x_all[rows], y_all[rows]
            p = predict_proba_matrix(model, xb)
            pc = np.clip(p, eps, 1.0 - eps)
            bce = -np.sum(cw.w * (yb * np.log(pc) + (1.0 - yb) * np.log(1.0 - pc)),
                          axis=1)
            reg = 0.5 * l2 * float(np.sum(model.weights ** 2))
            epoch_loss += float(np.sum(bce)) + reg * len(rows)

            delta = cw.w * (p - yb)                      # (b, K)
            grad_w = (delta.T @ xb) / len(rows)          # dense (K, V)
            grad_w = np.asarray(grad_w) + l2 * model.weights
            grad_b = delta.mean(axis=0)
            model.weights -= lr * grad_w
            model.biases -= lr * grad_b

        epoch_loss /= n
        if not np.isfinite(epoch_loss):
            raise NonFiniteLossError(
                f"epoch loss {epoch_loss}; try a smaller learning rate")
        history.append(epoch_loss)

        if x_val is not None:
            pv = np.clip(predict_proba_matrix(model, x_val), eps, 1.0 - eps)
            val_loss = float(np.mean(-np.sum(
                cw.w * (y_val * np.log(pv) + (1.0 - y_val) * np.log(1.0 - pv)),
                axis=1)))
            if val_loss < best_val - 1e-12:
                best_val = val_loss
                stale = 0
            else:
                stale += 1
                if stale >= cfg.early_stop_patience:
                    break

    return model, history


class LineProtocolProbabilitySource:
    """Adapter for an external predictor speaking one JSON object per line.

    The child process receives ``{"id": ..., "text": ...}`` on stdin and
    must answer ``{"id": ..., "probs": [...]}`` on stdout, one line per
    request, in order.  This is the plug-in point for probability sources
    that are out of scope for this package (e.g. transformer models).
    """

    def __init__(self, command: list[str], num_classes: int):
        self.num_classes = num_classes
        self._proc = subprocess.Popen(
            command, stdin=subprocess.PIPE, stdout=subprocess.PIPE,
            text=True, encoding="utf-8", bufsize=1)

    def predict_proba_text(self, doc_id: str, text: str) -> np.ndarray:
        req = json.dumps({"id": doc_id, "text": text}, ensure_ascii=False)
        assert self._proc.stdin is not None and self._proc.stdout is not None
        self._proc.stdin.write(req + "\n")
        self._proc.stdin.flush()
        line = self._proc.stdout.readline()
        if not line:
            raise RuntimeError("external probability source closed its stdout")
        resp = json.loads(line)
        if resp.get("id") != doc_id:
            raise RuntimeError(
                f"out-of-order response: sent {doc_id!r}, got {resp.get('id')!r}")
        probs = np.asarray(resp["probs"], dtype=np.float64)
        if probs.shape != (self.num_classes,):
            raise LengthMismatchError(
                f"expected {self.num_classes} probabilities, got {probs.shape}")
        if np.any(probs < 0) or np.any(probs > 1):
            raise ValueError("probabilities must lie in [0, 1]")
        return probs

    def close(self) -> None:
        if self._proc.stdin:
            self._proc.stdin.close()
        self._proc.terminate()
        self._proc.wait(timeout=5)

    def __enter__(self) -> "LineProtocolProbabilitySource":
        return self

    def __exit__(self, *exc) -> None:
        self.close()
