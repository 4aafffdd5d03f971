"""Adaptive granular-ball clustering.

The whole training set starts as a single ball. Any ball that is still
impure (purity < p_l) and still large (count > n_l) is split into one new
ball per distinct member label: a random member of each label seeds the new
ball as a pseudo-centroid, and the remaining members join the nearest
pseudo-centroid by Euclidean distance. Splitting repeats until every ball is
pure enough or small enough, then a quality filter keeps the balls with
purity >= p_t and count > n_t.
"""
from __future__ import annotations

import json
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .data import GranularBall, HyperParams, pairwise_distances


def make_ball(X: np.ndarray, y: np.ndarray, member_indices: np.ndarray,
              metric: str) -> GranularBall:
    """Build a ball over ``member_indices`` (indices into X / y).

    Centroid is the member mean; radius the mean member-to-centroid distance
    under ``metric``; label the majority class with ties broken toward the
    smallest label id.
    """
    idx = np.asarray(member_indices, dtype=np.intp)
    if idx.size == 0:
        raise ValueError("cannot build a ball from an empty member set")
    pts = np.asarray(X, dtype=np.float64)[idx]
    centroid = pts.mean(axis=0)
    values, counts = np.unique(np.asarray(y)[idx], return_counts=True)
    best = int(np.argmax(counts))  # first max -> smallest label id on ties
    radius = float(pairwise_distances(pts, centroid[None, :], metric).mean())
    return GranularBall(member_indices=idx, centroid=centroid, radius=radius,
                        label=int(values[best]), purity=float(counts[best] / idx.size))


def should_split(ball: GranularBall, p_l: float, n_l: int) -> bool:
    """True iff the ball is both impure (purity < p_l) and large (count > n_l)."""
    return ball.purity < p_l and ball.count > n_l


def split_ball(X: np.ndarray, y: np.ndarray, ball: GranularBall,
               rng: np.random.Generator, metric: str) -> list[GranularBall]:
    """Split a mixed ball into one ball per distinct member label.

    One member per label is drawn as a pseudo-centroid; every other member
    goes to the nearest pseudo-centroid by Euclidean distance (distance ties
    broken toward the lowest pseudo-centroid label). Each pseudo-centroid
    stays in its own ball, so every product is non-empty and strictly smaller
    than the input.
    """
    idx = ball.member_indices
    labels = np.asarray(y)[idx]
    distinct = np.unique(labels)  # ascending: argmin ties resolve to lowest label
    if distinct.size < 2:
        raise ValueError("cannot split a single-label ball")
    pseudo = np.array([rng.choice(idx[labels == lab]) for lab in distinct])
    pts = np.asarray(X, dtype=np.float64)[idx]
    d = pairwise_distances(pts, np.asarray(X, dtype=np.float64)[pseudo], "euclidean")
    assign = np.argmin(d, axis=1)
    for j, p in enumerate(pseudo):
        assign[np.flatnonzero(idx == p)[0]] = j
    return [make_ball(X, y, idx[assign == j], metric) for j in range(distinct.size)]


def filter_quality(balls: list[GranularBall], p_t: float, n_t: int,
                   known_labels: list[int] | None = None,
                   ) -> tuple[list[GranularBall], dict[int, int]]:
    """Keep balls with purity >= p_t and count strictly greater than n_t.

    Returns the kept balls and a per-class count over them. Classes that
    lose every ball are reported with a warning and a zero count; they can
    never be predicted downstream.
    """
    kept = [b for b in balls if b.purity >= p_t and b.count > n_t]
    if known_labels is None:
        known_labels = sorted({b.label for b in balls})
    counts = {int(c): 0 for c in known_labels}
    for b in kept:
        if b.label in counts:
            counts[b.label] += 1
        else:
            counts[b.label] = 1
    empty = [c for c, n in counts.items() if n == 0]
    if empty:
        warnings.warn(f"quality filter left classes {empty} with no balls "
                      f"(p_t={p_t}, n_t={n_t})", stacklevel=2)
    return kept, counts


@dataclass
class ClusterResult:
    """Outcome of one adaptive clustering run.

    ``balls`` partition the input samples and all satisfy the stop condition;
    ``filtered`` is the quality-filtered subset; ``per_class_counts`` counts
    filtered balls per class.
    """

    balls: list[GranularBall]
    filtered: list[GranularBall]
    per_class_counts: dict[int, int]

    @property
    def m(self) -> int:
        return len(self.balls)

    def to_report(self) -> dict:
        return {
            "summary": {
                "m": self.m,
                "n_filtered": len(self.filtered),
                "per_class_counts": {str(c): n for c, n in sorted(self.per_class_counts.items())},
            },
            "balls": [
                {
                    "n": b.count,
                    "centroid": [float(v) for v in b.centroid],
                    "radius": b.radius,
                    "label": b.label,
                    "purity": b.purity,
                    "filtered": b in self.filtered,
                }
                for b in self.balls
            ],
        }

    def save_report(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_report(), indent=2) + "\n")


def cluster_adaptive(X: np.ndarray, y: np.ndarray, hp: HyperParams,
                     rng: np.random.Generator | None = None) -> ClusterResult:
    """Run the full split-until-stable loop and quality filter.

    Deterministic given ``hp.seed`` (or the supplied generator): balls are
    processed in stable order, so pseudo-centroid draws replay identically.
    Every sample index ends up in exactly one ball, and each terminal ball
    satisfies purity >= p_l or count <= n_l.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y)
    if X.ndim != 2 or X.shape[0] == 0:
        raise ValueError("clustering needs a non-empty 2-D sample array")
    if y.shape != (X.shape[0],):
        raise ValueError("labels must be one per sample")
    if rng is None:
        rng = np.random.default_rng(hp.seed)
    known = [int(c) for c in np.unique(y)]
    n_l = hp.resolve_n_l(X.shape[0], len(known))

    terminal: list[GranularBall] = []
    work = [make_ball(X, y, np.arange(X.shape[0]), hp.metric)]
    splits = 0
    cap = X.shape[0]  # each split strictly shrinks its products
    while work:
        next_work: list[GranularBall] = []
        for ball in work:
            if not should_split(ball, hp.p_l, n_l):
                terminal.append(ball)
                continue
            products = split_ball(X, y, ball, rng, hp.metric)
            if len(products) == 1:  # unreachable guard: treat as terminal
                terminal.append(ball)
                continue
            splits += 1
            if splits > cap:
                raise RuntimeError(f"split cap of {cap} exceeded; clustering is not converging")
            next_work.extend(products)
        work = next_work

    filtered, counts = filter_quality(terminal, hp.p_t, hp.n_t, known_labels=known)
    return ClusterResult(balls=terminal, filtered=filtered, per_class_counts=counts)
