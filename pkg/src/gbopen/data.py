"""Core types shared across the library: labeled vector datasets, granular
balls, hyperparameters, and the two distance metrics every other module is
built on.

Label conventions: known classes are dense integers ``1..K``; the open /
unknown class is always ``K + 1``. Training data must carry known labels
only; test data may additionally carry ``K + 1``.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, replace
from typing import Iterator, NamedTuple

import numpy as np

COSINE = "cosine_distance"
EUCLIDEAN = "euclidean"
METRICS = (COSINE, EUCLIDEAN)

STAGE_RAW = "raw"
STAGE_ENCODED = "encoded"
STAGES = (STAGE_RAW, STAGE_ENCODED)


def _check_metric(metric: str) -> None:
    if metric not in METRICS:
        raise ValueError(f"unknown metric {metric!r}; expected one of {METRICS}")


def distance(a: np.ndarray, b: np.ndarray, metric: str = COSINE) -> float:
    """Distance between two vectors.

    ``cosine_distance`` is 1 minus the cosine of the angle between the
    vectors, in [0, 2]; ``euclidean`` is the L2 norm of the difference.
    Both are symmetric and zero for identical inputs.

    Raises ValueError on dimension mismatch, and for an all-zero vector
    under ``cosine_distance`` (the angle is undefined, which signals a
    degenerate embedding upstream).
    """
    _check_metric(metric)
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape or a.ndim != 1:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    if metric == EUCLIDEAN:
        return float(np.linalg.norm(a - b))
    na = np.linalg.norm(a)
    nb = np.linalg.norm(b)
    # the product guard also catches norms small enough to underflow
    if na * nb == 0.0:
        raise ValueError("zero vector under cosine_distance")
    d = 1.0 - float(a @ b) / (na * nb)
    # rounding can land one ulp outside [0, 2], e.g. for a point and itself
    return float(min(max(d, 0.0), 2.0))


def pairwise_distances(A: np.ndarray, B: np.ndarray, metric: str = COSINE,
                       chunk: int = 512) -> np.ndarray:
    """Distance matrix between the rows of ``A`` (n, d) and ``B`` (m, d).

    Euclidean distances are computed from explicit differences (chunked over
    the rows of ``A`` to bound memory) rather than the Gram-matrix shortcut,
    so entries match ``distance`` to rounding.
    """
    _check_metric(metric)
    A = np.atleast_2d(np.asarray(A, dtype=np.float64))
    B = np.atleast_2d(np.asarray(B, dtype=np.float64))
    if A.shape[1] != B.shape[1]:
        raise ValueError(f"dimension mismatch: {A.shape[1]} vs {B.shape[1]}")
    if metric == COSINE:
        na = np.linalg.norm(A, axis=1)
        nb = np.linalg.norm(B, axis=1)
        denom = np.outer(na, nb)
        if np.any(denom == 0.0):  # exact zeros and underflowed norm products
            raise ValueError("zero vector under cosine_distance")
        return np.clip(1.0 - (A @ B.T) / denom, 0.0, 2.0)
    out = np.empty((A.shape[0], B.shape[0]), dtype=np.float64)
    for lo in range(0, A.shape[0], chunk):
        hi = min(lo + chunk, A.shape[0])
        diff = A[lo:hi, None, :] - B[None, :, :]
        out[lo:hi] = np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))
    return out


class LabeledVector(NamedTuple):
    """One sample: a feature vector and its integer class label (>= 1)."""

    features: np.ndarray
    label: int


@dataclass(frozen=True, eq=False)
class Dataset:
    """A fixed-dimension collection of labeled feature vectors.

    ``features`` is an (N, D) float32 array (the on-disk payload type, so
    file round-trips are bit-exact), ``labels`` an (N,) int array. ``n_known``
    is K, the number of known classes; ``stage`` records whether vectors are
    raw inputs or encoder outputs.
    """

    features: np.ndarray
    labels: np.ndarray
    n_known: int
    stage: str = STAGE_RAW

    def __post_init__(self):
        feats = np.ascontiguousarray(np.asarray(self.features, dtype=np.float32))
        labs = np.asarray(self.labels, dtype=np.int32)
        if feats.ndim != 2:
            raise ValueError(f"features must be 2-D, got shape {feats.shape}")
        if labs.shape != (feats.shape[0],):
            raise ValueError(f"labels shape {labs.shape} does not match {feats.shape[0]} samples")
        if not np.all(np.isfinite(feats)):
            raise ValueError("features must be finite")
        if labs.size and labs.min() < 1:
            raise ValueError("labels must be >= 1")
        if self.stage not in STAGES:
            raise ValueError(f"unknown stage {self.stage!r}")
        if self.n_known < 1:
            raise ValueError("n_known must be >= 1")
        if labs.size and labs.max() > self.n_known + 1:
            raise ValueError(
                f"label {labs.max()} out of range for K={self.n_known} (unknown={self.n_known + 1})")
        object.__setattr__(self, "features", feats)
        object.__setattr__(self, "labels", labs)

    @property
    def n_samples(self) -> int:
        return self.features.shape[0]

    @property
    def dim(self) -> int:
        return self.features.shape[1]

    @property
    def known_labels(self) -> tuple[int, ...]:
        return tuple(range(1, self.n_known + 1))

    @property
    def unknown_label(self) -> int:
        return self.n_known + 1

    def __len__(self) -> int:
        return self.n_samples

    def __getitem__(self, i: int) -> LabeledVector:
        return LabeledVector(self.features[i], int(self.labels[i]))

    def __iter__(self) -> Iterator[LabeledVector]:
        for i in range(self.n_samples):
            yield self[i]

    def require_known_only(self) -> None:
        """Raise unless every label is a known class (training contract)."""
        if self.labels.size and self.labels.max() > self.n_known:
            raise ValueError("training data must contain known-class labels only")

    def subset(self, indices: np.ndarray) -> "Dataset":
        return Dataset(self.features[indices], self.labels[indices],
                       n_known=self.n_known, stage=self.stage)

    def with_stage(self, features: np.ndarray, stage: str) -> "Dataset":
        return Dataset(features, self.labels, n_known=self.n_known, stage=stage)


@dataclass(frozen=True, eq=False)
class GranularBall:
    """A cluster summarized by its centroid, mean-distance radius, majority
    label, and purity.

    ``member_indices`` index into the array the ball was built from. The
    centroid is the arithmetic mean of the member vectors; the radius is the
    mean member-to-centroid distance under the configured metric; the label
    is the majority class (ties broken toward the smallest label id); purity
    is the fraction of members carrying that label.
    """

    member_indices: np.ndarray
    centroid: np.ndarray
    radius: float
    label: int
    purity: float

    @property
    def count(self) -> int:
        return int(self.member_indices.size)


@dataclass
class HyperParams:
    """Knobs for clustering, quality filtering, and encoder training.

    ``p_l`` / ``n_l`` control when a ball keeps splitting (split while purity
    < p_l and count > n_l); ``p_t`` / ``n_t`` select the high-quality balls
    kept for representation (purity >= p_t and count strictly > n_t).
    ``n_l=None`` resolves per dataset to max(4, ceil(N / (50 K))).
    """

    p_l: float = 0.9
    n_l: int | None = None
    p_t: float = 1.0
    n_t: int = 3
    metric: str = COSINE
    seed: int = 0
    d: int = 64
    epochs: int = 10
    batch_size: int = 128
    learning_rate: float = 2e-5

    def __post_init__(self):
        if not (0.0 < self.p_l <= 1.0):
            raise ValueError("p_l must be in (0, 1]")
        if not (0.0 < self.p_t <= 1.0):
            raise ValueError("p_t must be in (0, 1]")
        if self.n_l is not None and self.n_l < 1:
            raise ValueError("n_l must be positive")
        if self.n_t < 1:
            raise ValueError("n_t must be positive")
        _check_metric(self.metric)
        if self.d < 1 or self.batch_size < 1 or self.epochs < 0:
            raise ValueError("d and batch_size must be positive, epochs non-negative")
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be positive")
        if self.p_t < self.p_l:
            warnings.warn(f"p_t={self.p_t} below p_l={self.p_l}; quality filter is weaker "
                          "than the split condition", stacklevel=2)

    def resolve_n_l(self, n_samples: int, n_classes: int) -> int:
        if self.n_l is not None:
            return self.n_l
        return max(4, math.ceil(n_samples / (50 * max(n_classes, 1))))

    def with_overrides(self, **kwargs) -> "HyperParams":
        return replace(self, **kwargs)

    def to_json(self) -> dict:
        return {k: getattr(self, k) for k in self.__dataclass_fields__}

    @classmethod
    def from_json(cls, obj: dict) -> "HyperParams":
        known = {k: v for k, v in obj.items() if k in cls.__dataclass_fields__}
        return cls(**known)
