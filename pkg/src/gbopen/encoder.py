"""Trainable dense encoder and the nearest-sub-centroid training loop.

The encoder is a single rectified affine map z = max(0, W x + b). It is
optimized by plain mini-batch gradient descent on the nearest-sub-centroid
loss: per sample, the distance to each class is the minimum distance to that
class's sub-centroids, the class posterior is a softmax over negated
distances, and the loss is the mean negative log probability of the true
class. Sub-centroids come from a fresh clustering of the current encoder
outputs once per epoch and are held constant within the epoch, so gradients
flow through the chosen metric and the rectifier mask but not into the
centroids themselves.
"""
from __future__ import annotations

import json
import warnings
import zlib
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .boundary import BoundaryModel
from .cluster import ClusterResult, cluster_adaptive
from .data import EUCLIDEAN, HyperParams, pairwise_distances


@dataclass
class DenseEncoder:
    """Affine map plus rectifier: forward(x) = max(0, W x + b)."""

    w: np.ndarray  # (d, d_in)
    b: np.ndarray  # (d,)

    def __post_init__(self):
        self.w = np.asarray(self.w, dtype=np.float64)
        self.b = np.asarray(self.b, dtype=np.float64)
        if self.w.ndim != 2 or self.b.shape != (self.w.shape[0],):
            raise ValueError("weight must be (d, d_in) with a matching bias vector")
        if not (np.all(np.isfinite(self.w)) and np.all(np.isfinite(self.b))):
            raise ValueError("encoder parameters must be finite")

    @property
    def d_in(self) -> int:
        return self.w.shape[1]

    @property
    def d(self) -> int:
        return self.w.shape[0]

    @classmethod
    def init(cls, d_in: int, d: int, rng: np.random.Generator) -> "DenseEncoder":
        # uniform +-1/sqrt(d_in), zero bias
        bound = 1.0 / np.sqrt(d_in)
        return cls(w=rng.uniform(-bound, bound, size=(d, d_in)), b=np.zeros(d))

    def preactivation(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        single = X.ndim == 1
        X2 = np.atleast_2d(X)
        if X2.shape[1] != self.d_in:
            raise ValueError(f"input dimension {X2.shape[1]} does not match encoder d_in={self.d_in}")
        A = X2 @ self.w.T + self.b
        return A[0] if single else A

    def forward(self, X: np.ndarray) -> np.ndarray:
        return np.maximum(self.preactivation(X), 0.0)

    def save(self, path: str | Path, seed: int = 0, epoch: int = 0) -> None:
        obj = {"d_in": self.d_in, "d": self.d, "w": self.w.tolist(),
               "b": self.b.tolist(), "seed": seed, "epoch": epoch}
        Path(path).write_text(json.dumps(obj) + "\n")

    @classmethod
    def load(cls, path: str | Path) -> "DenseEncoder":
        obj = json.loads(Path(path).read_text())
        enc = cls(w=np.array(obj["w"]), b=np.array(obj["b"]))
        if enc.d_in != obj["d_in"] or enc.d != obj["d"]:
            raise ValueError("checkpoint dimensions are inconsistent")
        return enc


def class_distance(z: np.ndarray, centroids: np.ndarray, metric: str) -> float:
    """Distance from one vector to a class: the min over its sub-centroids."""
    centroids = np.atleast_2d(np.asarray(centroids, dtype=np.float64))
    if centroids.shape[0] == 0:
        raise ValueError("class has no sub-centroids")
    return float(pairwise_distances(np.atleast_2d(z), centroids, metric).min())


def class_distances(Z: np.ndarray, model: BoundaryModel) -> tuple[np.ndarray, np.ndarray]:
    """Per-class min distances for a batch.

    Returns (D, S): D[i, c-1] is the distance from Z[i] to class c, and
    S[i, c-1] the flat row index of the winning sub-centroid (ties toward
    the lowest sub-centroid index).
    """
    Z = np.atleast_2d(np.asarray(Z, dtype=np.float64))
    d = pairwise_distances(Z, model.centroids, model.metric)
    n = Z.shape[0]
    D = np.empty((n, model.n_known))
    S = np.empty((n, model.n_known), dtype=np.intp)
    for c in range(1, model.n_known + 1):
        cols = np.flatnonzero(model.classes == c)
        if cols.size == 0:
            raise ValueError(f"class {c} has no sub-centroids")
        sub = d[:, cols]
        j = np.argmin(sub, axis=1)
        D[:, c - 1] = sub[np.arange(n), j]
        S[:, c - 1] = cols[j]
    return D, S


def _posterior(D: np.ndarray) -> np.ndarray:
    """Softmax over negated class distances, stabilized by max subtraction."""
    if not np.all(np.isfinite(D)):
        raise ValueError("non-finite class distance")
    neg = -D
    m = neg.max(axis=1, keepdims=True)
    e = np.exp(neg - m)
    return e / e.sum(axis=1, keepdims=True)


def loss_gb(Z: np.ndarray, y: np.ndarray, model: BoundaryModel) -> tuple[float, np.ndarray]:
    """Mean negative log posterior of the true class for a batch.

    Returns (loss, p) with p[i] the posterior probability of y[i] given Z[i].
    """
    Z = np.atleast_2d(np.asarray(Z, dtype=np.float64))
    y = np.asarray(y, dtype=np.int64)
    if Z.shape[0] == 0:
        raise ValueError("empty batch")
    if y.min() < 1 or y.max() > model.n_known:
        raise ValueError(f"batch labels outside 1..{model.n_known}")
    D, _ = class_distances(Z, model)
    neg = -D
    m = neg.max(axis=1)
    lse = m + np.log(np.exp(neg - m[:, None]).sum(axis=1))
    d_true = D[np.arange(Z.shape[0]), y - 1]
    losses = d_true + lse
    p_true = np.exp(-d_true - lse)
    return float(losses.mean()), p_true


def _distance_grad(Z: np.ndarray, O: np.ndarray, metric: str) -> np.ndarray:
    """Gradient of distance(z, o) with respect to z, rowwise for (B, D) pairs.

    Euclidean uses the subgradient 0 at z == o. Cosine requires nonzero rows.
    """
    if metric == EUCLIDEAN:
        diff = Z - O
        nrm = np.linalg.norm(diff, axis=1)
        safe = np.where(nrm > 0, nrm, 1.0)
        return np.where((nrm > 0)[:, None], diff / safe[:, None], 0.0)
    zn = np.linalg.norm(Z, axis=1)
    on = np.linalg.norm(O, axis=1)
    if np.any(zn * on == 0):  # covers underflowing norm products too
        raise ValueError("zero vector under cosine_distance")
    s = np.einsum("ij,ij->i", Z, O) / (zn * on)
    return (s / zn ** 2)[:, None] * Z - O / (zn * on)[:, None]


def grad_loss(X: np.ndarray, y: np.ndarray, encoder: DenseEncoder,
              model: BoundaryModel) -> tuple[float, np.ndarray, np.ndarray]:
    """Analytic gradients of the batch loss with respect to (W, b).

    The gradient routes through the argmin sub-centroid of each class (ties
    toward the lower index), the metric's derivative, and the rectifier
    mask; sub-centroids are constants. Returns (loss, dW, db).
    """
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    y = np.asarray(y, dtype=np.int64)
    n = X.shape[0]
    if n == 0:
        raise ValueError("empty batch")
    A = encoder.preactivation(X)
    Z = np.maximum(A, 0.0)
    D, S = class_distances(Z, model)
    P = _posterior(D)
    neg = -D
    m = neg.max(axis=1)
    lse = m + np.log(np.exp(neg - m[:, None]).sum(axis=1))
    loss = float((D[np.arange(n), y - 1] + lse).mean())

    coef = -P  # dL_i/dd_c = [c == y_i] - p_c
    coef[np.arange(n), y - 1] += 1.0
    dZ = np.zeros_like(Z)
    for c in range(model.n_known):
        O_sel = model.centroids[S[:, c]]
        dZ += coef[:, c, None] * _distance_grad(Z, O_sel, model.metric)
    dA = dZ * (A > 0)
    return loss, dA.T @ X / n, dA.sum(axis=0) / n


def sub_centroid_bank(result: ClusterResult, Z: np.ndarray, y: np.ndarray,
                      n_known: int, metric: str) -> BoundaryModel:
    """Sub-centroids for the loss, from the quality-filtered balls.

    A known class with no filtered ball falls back to its unfiltered balls;
    a class that is no ball's majority label at all falls back to its class
    mean. Both fallbacks warn.
    """
    by_class: dict[int, list] = {c: [] for c in range(1, n_known + 1)}
    for b in result.filtered:
        by_class[b.label].append(b)
    y = np.asarray(y)
    Z = np.asarray(Z, dtype=np.float64)
    cents, radii, classes = [], [], []
    for c in range(1, n_known + 1):
        balls = by_class[c]
        if not balls:
            balls = [b for b in result.balls if b.label == c]
            if balls:
                warnings.warn(f"class {c} lost all balls to the quality filter; "
                              "using its unfiltered balls for the loss", stacklevel=2)
        if balls:
            for b in balls:
                cents.append(b.centroid)
                radii.append(b.radius)
                classes.append(c)
        else:
            members = Z[y == c]
            if members.shape[0] == 0:
                raise ValueError(f"class {c} has no training samples")
            warnings.warn(f"class {c} is no ball's majority label; using its class "
                          "mean as a single sub-centroid", stacklevel=2)
            centroid = members.mean(axis=0)
            cents.append(centroid)
            radii.append(float(pairwise_distances(members, centroid[None, :], metric).mean()))
            classes.append(c)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")  # zero-boundary warning cannot fire here
        return BoundaryModel(metric=metric, n_known=n_known, centroids=np.array(cents),
                             radii=np.array(radii), classes=np.array(classes))


@dataclass
class TrainState:
    """Result of a training run: the encoder, the final clustering of its
    outputs, and per-epoch bookkeeping."""

    encoder: DenseEncoder
    clusters: ClusterResult
    epoch: int
    loss_history: list[float] = field(default_factory=list)
    epoch_stats: list[dict] = field(default_factory=list)


def _rng(seed: int, *key: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([seed, *key]))


def _crc(arr: np.ndarray) -> int:
    return zlib.crc32(np.ascontiguousarray(arr).tobytes())


def _n_known(y: np.ndarray) -> int:
    y = np.asarray(y)
    if y.min() < 1:
        raise ValueError("labels must be >= 1")
    return int(y.max())


def train_hrl(X: np.ndarray, y: np.ndarray, hp: HyperParams,
              n_known: int | None = None) -> TrainState:
    """Alternating training: cluster current encodings, then one epoch of
    mini-batch gradient descent against the fresh sub-centroids.

    Deterministic given hp.seed: the parameter init, each epoch's clustering
    draws, and each epoch's shuffle use independent streams derived from it.
    The returned clustering is recomputed after the final update.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    if n_known is None:
        n_known = _n_known(y)
    enc = DenseEncoder.init(X.shape[1], hp.d, _rng(hp.seed, 0))
    loss_history: list[float] = []
    epoch_stats: list[dict] = []
    for e in range(hp.epochs):
        Z = enc.forward(X)
        result = cluster_adaptive(Z, y, hp, rng=_rng(hp.seed, 1, e))
        bank = sub_centroid_bank(result, Z, y, n_known, hp.metric)
        perm = _rng(hp.seed, 2, e).permutation(X.shape[0])
        batch_losses = []
        for lo in range(0, X.shape[0], hp.batch_size):
            idx = perm[lo:lo + hp.batch_size]
            loss, dw, db = grad_loss(X[idx], y[idx], enc, bank)
            enc.w -= hp.learning_rate * dw
            enc.b -= hp.learning_rate * db
            batch_losses.append(loss)
        loss_history.append(float(np.mean(batch_losses)))
        epoch_stats.append({"epoch": e, "loss": loss_history[-1], "z_crc": _crc(Z),
                            "m": result.m, "n_filtered": len(result.filtered)})
    Z = enc.forward(X)
    final = cluster_adaptive(Z, y, hp, rng=_rng(hp.seed, 1, hp.epochs))
    return TrainState(encoder=enc, clusters=final, epoch=hp.epochs,
                      loss_history=loss_history, epoch_stats=epoch_stats)


def ce_loss_grads(X: np.ndarray, y: np.ndarray, encoder: DenseEncoder,
                  head_w: np.ndarray, head_b: np.ndarray,
                  ) -> tuple[float, np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Softmax cross-entropy loss and gradients for encoder plus linear head.

    Returns (loss, dW, db, dV, dc) where V / c are the head parameters.
    """
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    y = np.asarray(y, dtype=np.int64)
    n = X.shape[0]
    A = encoder.preactivation(X)
    Z = np.maximum(A, 0.0)
    logits = Z @ head_w.T + head_b
    m = logits.max(axis=1, keepdims=True)
    e = np.exp(logits - m)
    P = e / e.sum(axis=1, keepdims=True)
    lse = m[:, 0] + np.log(e.sum(axis=1))
    loss = float((lse - logits[np.arange(n), y - 1]).mean())
    delta = P.copy()
    delta[np.arange(n), y - 1] -= 1.0
    dV = delta.T @ Z / n
    dc = delta.sum(axis=0) / n
    dZ = delta @ head_w
    dA = dZ * (A > 0)
    return loss, dA.T @ X / n, dA.sum(axis=0) / n, dV, dc


def train_ce_baseline(X: np.ndarray, y: np.ndarray, hp: HyperParams,
                      n_known: int | None = None) -> TrainState:
    """Representation-learning ablation: the same encoder trained through a
    K-way softmax cross-entropy head. The head is discarded; the returned
    clustering is computed on the final encodings exactly as in train_hrl.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    if n_known is None:
        n_known = _n_known(y)
    enc = DenseEncoder.init(X.shape[1], hp.d, _rng(hp.seed, 0))
    head_rng = _rng(hp.seed, 3)
    bound = 1.0 / np.sqrt(hp.d)
    head_w = head_rng.uniform(-bound, bound, size=(n_known, hp.d))
    head_b = np.zeros(n_known)
    loss_history: list[float] = []
    epoch_stats: list[dict] = []
    for e in range(hp.epochs):
        perm = _rng(hp.seed, 2, e).permutation(X.shape[0])
        batch_losses = []
        for lo in range(0, X.shape[0], hp.batch_size):
            idx = perm[lo:lo + hp.batch_size]
            loss, dw, db, dv, dc = ce_loss_grads(X[idx], y[idx], enc, head_w, head_b)
            enc.w -= hp.learning_rate * dw
            enc.b -= hp.learning_rate * db
            head_w -= hp.learning_rate * dv
            head_b -= hp.learning_rate * dc
            batch_losses.append(loss)
        loss_history.append(float(np.mean(batch_losses)))
        epoch_stats.append({"epoch": e, "loss": loss_history[-1]})
    Z = enc.forward(X)
    final = cluster_adaptive(Z, y, hp, rng=_rng(hp.seed, 1, hp.epochs))
    return TrainState(encoder=enc, clusters=final, epoch=hp.epochs,
                      loss_history=loss_history, epoch_stats=epoch_stats)
