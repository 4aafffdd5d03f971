"""Multi-granularity decision boundaries and open-set inference.

Each quality-filtered ball contributes one (sub-centroid, radius) pair to
its class. A query inside at least one ball is assigned the class of the
nearest satisfying sub-centroid; a query strictly outside every ball is
rejected as unknown (label K + 1). The closed-set rule ignores radii and
simply takes the class of the globally nearest sub-centroid.
"""
from __future__ import annotations

import json
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .cluster import ClusterResult
from .data import _check_metric, pairwise_distances


@dataclass
class BoundaryModel:
    """Per-class lists of (sub-centroid, radius) pairs, flattened for speed.

    Rows are sorted by (class label, sub-centroid index), so a first-match
    argmin resolves distance ties toward the lower class and lower index.
    """

    metric: str
    n_known: int
    centroids: np.ndarray  # (M, D)
    radii: np.ndarray      # (M,)
    classes: np.ndarray    # (M,) class label per row
    source_stats: list[dict] | None = None  # per-row {n, purity} of the source ball

    def __post_init__(self):
        _check_metric(self.metric)
        self.centroids = np.asarray(self.centroids, dtype=np.float64)
        self.radii = np.asarray(self.radii, dtype=np.float64)
        self.classes = np.asarray(self.classes, dtype=np.int64)
        if self.centroids.ndim != 2 or self.centroids.shape[0] == 0:
            raise ValueError("boundary model needs at least one sub-centroid")
        if self.radii.shape != (self.centroids.shape[0],) or np.any(self.radii < 0):
            raise ValueError("radii must be one non-negative value per sub-centroid")
        if self.classes.shape != (self.centroids.shape[0],):
            raise ValueError("classes must be one label per sub-centroid")
        order = np.lexsort((np.arange(self.classes.size), self.classes))
        if not np.all(order == np.arange(self.classes.size)):
            self.centroids = self.centroids[order]
            self.radii = self.radii[order]
            self.classes = self.classes[order]
            if self.source_stats is not None:
                self.source_stats = [self.source_stats[i] for i in order]
        covered = set(int(c) for c in self.classes)
        missing = [c for c in range(1, self.n_known + 1) if c not in covered]
        if missing:
            warnings.warn(f"classes {missing} have no boundaries and are unreachable "
                          "at inference", stacklevel=2)

    @property
    def n_boundaries(self) -> int:
        return int(self.centroids.shape[0])

    @property
    def unknown_label(self) -> int:
        return self.n_known + 1

    def per_class(self) -> dict[int, list[tuple[np.ndarray, float]]]:
        out: dict[int, list[tuple[np.ndarray, float]]] = {}
        for i, c in enumerate(self.classes):
            out.setdefault(int(c), []).append((self.centroids[i], float(self.radii[i])))
        return out

    def to_json(self) -> dict:
        per_class: dict[str, list] = {str(c): [] for c in sorted(set(int(c) for c in self.classes))}
        for i, c in enumerate(self.classes):
            entry = {"centroid": [float(v) for v in self.centroids[i]],
                     "radius": float(self.radii[i])}
            if self.source_stats is not None:
                entry["source_ball_stats"] = self.source_stats[i]
            per_class[str(int(c))].append(entry)
        return {"metric": self.metric, "k": self.n_known, "classes": per_class}

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_json(), indent=2) + "\n")

    @classmethod
    def from_json(cls, obj: dict) -> "BoundaryModel":
        cents, radii, classes, stats = [], [], [], []
        for c_str, entries in sorted(obj["classes"].items(), key=lambda kv: int(kv[0])):
            for e in entries:
                cents.append(e["centroid"])
                radii.append(e["radius"])
                classes.append(int(c_str))
                stats.append(e.get("source_ball_stats", {}))
        return cls(metric=obj["metric"], n_known=int(obj["k"]),
                   centroids=np.array(cents), radii=np.array(radii),
                   classes=np.array(classes), source_stats=stats)

    @classmethod
    def load(cls, path: str | Path) -> "BoundaryModel":
        return cls.from_json(json.loads(Path(path).read_text()))


def build_boundaries(result: ClusterResult, X: np.ndarray, metric: str,
                     n_known: int | None = None) -> BoundaryModel:
    """Turn the quality-filtered balls of a clustering run into boundaries.

    ``X`` must be the encoded sample array the balls were clustered over;
    radii are recomputed from the members under ``metric``.
    """
    if not result.filtered:
        raise ValueError("no quality-filtered balls to build boundaries from")
    if n_known is None:
        n_known = max(b.label for b in result.balls)
    X = np.asarray(X, dtype=np.float64)
    cents, radii, classes, stats = [], [], [], []
    for b in sorted(result.filtered, key=lambda b: b.label):
        cents.append(b.centroid)
        radii.append(float(pairwise_distances(X[b.member_indices], b.centroid[None, :],
                                              metric).mean()))
        classes.append(b.label)
        stats.append({"n": b.count, "purity": b.purity})
    return BoundaryModel(metric=metric, n_known=n_known, centroids=np.array(cents),
                         radii=np.array(radii), classes=np.array(classes),
                         source_stats=stats)


def build_single_boundary_baseline(X: np.ndarray, y: np.ndarray,
                                   metric: str, n_known: int | None = None) -> BoundaryModel:
    """One boundary per class: the whole class treated as a single ball."""
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y)
    labels = np.unique(y)
    if labels.size == 0:
        raise ValueError("empty training data")
    if n_known is None:
        n_known = int(labels.max())
    cents, radii, classes, stats = [], [], [], []
    for c in labels:
        pts = X[y == c]
        centroid = pts.mean(axis=0)
        cents.append(centroid)
        radii.append(float(pairwise_distances(pts, centroid[None, :], metric).mean()))
        classes.append(int(c))
        stats.append({"n": int(pts.shape[0]), "purity": 1.0})
    return BoundaryModel(metric=metric, n_known=n_known, centroids=np.array(cents),
                         radii=np.array(radii), classes=np.array(classes),
                         source_stats=stats)


def classify_closed(Z: np.ndarray, model: BoundaryModel) -> np.ndarray:
    """Closed-set rule: the class of the globally nearest sub-centroid.

    Accepts one vector or a batch; returns int labels in 1..K.
    """
    Z = np.atleast_2d(np.asarray(Z, dtype=np.float64))
    d = pairwise_distances(Z, model.centroids, model.metric)
    return model.classes[np.argmin(d, axis=1)].copy()


def classify_open(Z: np.ndarray, model: BoundaryModel,
                  return_distances: bool = False):
    """Open-set rule over the multi-granularity boundaries.

    A query strictly farther than every radius is unknown (K + 1). Otherwise
    it takes the class of the nearest sub-centroid among those whose
    boundary it falls inside (distance <= radius counts as inside).

    With ``return_distances`` also returns the distance to the winning
    sub-centroid (for unknowns: the minimum distance overall).
    """
    Z = np.atleast_2d(np.asarray(Z, dtype=np.float64))
    d = pairwise_distances(Z, model.centroids, model.metric)
    if not np.all(np.isfinite(d)):
        raise ValueError("non-finite distance encountered")
    inside = d <= model.radii[None, :]
    gated = np.where(inside, d, np.inf)
    win = np.argmin(gated, axis=1)
    any_inside = inside.any(axis=1)
    labels = np.where(any_inside, model.classes[win], model.unknown_label)
    if return_distances:
        dist = np.where(any_inside, gated[np.arange(Z.shape[0]), win], d.min(axis=1))
        return labels, dist
    return labels
