"""Synthetic dataset generators for open intent experiments.

Each family lays out K known classes in the plane together with open-intent
probes of two kinds: inter-open points fall in the gaps between classes,
intra-open points fall inside a class's hull or hole. Open points carry the
label K+1. Geometry is generated in 2-D; higher target dimensions apply a
seeded random rotation, which preserves Euclidean distances exactly.
"""
from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .data import STAGE_RAW, Dataset

RING = "ring"
GAUSSIAN_MIXTURE = "gaussian_mixture"
CRESCENT = "crescent"
FAMILIES = (RING, GAUSSIAN_MIXTURE, CRESCENT)


@dataclass
class SynthSpec:
    """Recipe for one synthetic pool.

    n_per_class counts known-class points; the open counts are totals. Ring
    geometry: class c occupies the annulus [inner + (c-1)*stride,
    inner + (c-1)*stride + width] around the origin, so the hole at the
    origin and the gaps between annuli are free for open probes.
    """

    family: str = RING
    n_known: int = 3
    n_per_class: int = 400
    n_open_inter: int = 200
    n_open_intra: int = 200
    dim: int = 2
    noise: float = 0.35        # blob std (gaussian_mixture / crescent jitter)
    blobs_per_class: int = 2   # gaussian_mixture only
    inner: float = 2.0         # ring only
    width: float = 1.0
    stride: float = 3.0
    hole_radius: float = 1.0   # intra-open disk radius (ring)

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown synthetic family {self.family!r}; expected one of {FAMILIES}")
        if self.n_known < 1:
            raise ValueError("n_known must be >= 1")
        if self.family == CRESCENT and self.n_known != 2:
            raise ValueError("crescent family is two-class; set n_known=2")
        if self.n_per_class < 1:
            raise ValueError("n_per_class must be >= 1")
        if self.n_open_inter < 0 or self.n_open_intra < 0:
            raise ValueError("open counts must be >= 0")
        if self.dim < 2:
            raise ValueError("dim must be >= 2")

    def to_json(self) -> dict:
        return {k: getattr(self, k) for k in self.__dataclass_fields__}

    @classmethod
    def from_json(cls, obj: dict) -> "SynthSpec":
        return cls(**obj)

    def with_overrides(self, **kwargs) -> "SynthSpec":
        return replace(self, **kwargs)


def _disk(rng: np.random.Generator, n: int, radius: float, center=(0.0, 0.0)) -> np.ndarray:
    r = radius * np.sqrt(rng.uniform(size=n))
    t = rng.uniform(0, 2 * np.pi, size=n)
    return np.column_stack([r * np.cos(t), r * np.sin(t)]) + np.asarray(center)


def _annulus(rng: np.random.Generator, n: int, r_lo: float, r_hi: float) -> np.ndarray:
    r = rng.uniform(r_lo, r_hi, size=n)
    t = rng.uniform(0, 2 * np.pi, size=n)
    return np.column_stack([r * np.cos(t), r * np.sin(t)])


def _split_counts(total: int, parts: int) -> list[int]:
    base, extra = divmod(total, parts)
    return [base + (i < extra) for i in range(parts)]


def _ring(spec: SynthSpec, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    pts, labs = [], []
    for c in range(1, spec.n_known + 1):
        lo = spec.inner + (c - 1) * spec.stride
        pts.append(_annulus(rng, spec.n_per_class, lo, lo + spec.width))
        labs.append(np.full(spec.n_per_class, c))
    if spec.n_open_intra:
        pts.append(_disk(rng, spec.n_open_intra, spec.hole_radius))
        labs.append(np.full(spec.n_open_intra, spec.n_known + 1))
    if spec.n_open_inter:
        # gap annuli midway between consecutive rings; a lone ring gets an
        # outer halo instead
        gaps = []
        for c in range(1, spec.n_known):
            hi_prev = spec.inner + (c - 1) * spec.stride + spec.width
            lo_next = spec.inner + c * spec.stride
            gaps.append(((hi_prev + lo_next) / 2 - 0.2, (hi_prev + lo_next) / 2 + 0.2))
        if not gaps:
            out = spec.inner + spec.width + spec.stride / 2
            gaps.append((out - 0.2, out + 0.2))
        for n_g, (lo, hi) in zip(_split_counts(spec.n_open_inter, len(gaps)), gaps):
            if n_g:
                pts.append(_annulus(rng, n_g, lo, hi))
                labs.append(np.full(n_g, spec.n_known + 1))
    return np.vstack(pts), np.concatenate(labs)


def _gaussian_mixture(spec: SynthSpec, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    n_modes = spec.n_known * spec.blobs_per_class
    angles = 2 * np.pi * np.arange(n_modes) / n_modes
    big_r = 6.0
    centers = big_r * np.column_stack([np.cos(angles), np.sin(angles)])
    pts, labs = [], []
    for c in range(1, spec.n_known + 1):
        # interleave modes around the circle so every class is multi-modal
        mode_ids = [m for m in range(n_modes) if m % spec.n_known == c - 1]
        for n_m, m in zip(_split_counts(spec.n_per_class, len(mode_ids)), mode_ids):
            pts.append(rng.normal(centers[m], spec.noise, size=(n_m, 2)))
            labs.append(np.full(n_m, c))
    if spec.n_open_intra:
        # centroid of every interleaved class sits at the origin
        pts.append(rng.normal(0.0, spec.noise, size=(spec.n_open_intra, 2)))
        labs.append(np.full(spec.n_open_intra, spec.n_known + 1))
    if spec.n_open_inter:
        mids = angles + np.pi / n_modes
        mid_centers = big_r * np.column_stack([np.cos(mids), np.sin(mids)])
        for n_g, ctr in zip(_split_counts(spec.n_open_inter, n_modes), mid_centers):
            if n_g:
                pts.append(rng.normal(ctr, spec.noise / 2, size=(n_g, 2)))
                labs.append(np.full(n_g, spec.n_known + 1))
    return np.vstack(pts), np.concatenate(labs)


def _crescent(spec: SynthSpec, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    scale = 3.0
    t1 = rng.uniform(0, np.pi, size=spec.n_per_class)
    t2 = rng.uniform(0, np.pi, size=spec.n_per_class)
    m1 = scale * np.column_stack([np.cos(t1), np.sin(t1)])
    m2 = np.column_stack([scale - scale * np.cos(t2), scale / 2 - scale * np.sin(t2)])
    pts = [m1 + rng.normal(0, spec.noise / 2, m1.shape),
           m2 + rng.normal(0, spec.noise / 2, m2.shape)]
    labs = [np.full(spec.n_per_class, 1), np.full(spec.n_per_class, 2)]
    if spec.n_open_intra:
        # pocket under the first arc, inside its hull but off the curve
        pts.append(rng.normal((0.0, 2 * scale / np.pi), 0.25, size=(spec.n_open_intra, 2)))
        labs.append(np.full(spec.n_open_intra, 3))
    if spec.n_open_inter:
        pts.append(rng.normal((scale / 2, scale / 4), 0.3, size=(spec.n_open_inter, 2)))
        labs.append(np.full(spec.n_open_inter, 3))
    return np.vstack(pts), np.concatenate(labs)


_BUILDERS = {RING: _ring, GAUSSIAN_MIXTURE: _gaussian_mixture, CRESCENT: _crescent}


def gen_synthetic(spec: SynthSpec, seed: int) -> Dataset:
    """Generate one labeled pool: known classes 1..K plus open points K+1.

    Deterministic per (spec, seed). dim > 2 rotates the planar layout by a
    seeded random orthogonal matrix, so all pairwise Euclidean distances
    carry over unchanged.
    """
    rng = np.random.default_rng(np.random.SeedSequence([int(seed), 11]))
    X2, y = _BUILDERS[spec.family](spec, rng)
    if spec.dim == 2:
        X = X2
    else:
        lifted = np.zeros((X2.shape[0], spec.dim))
        lifted[:, :2] = X2
        q, r = np.linalg.qr(rng.standard_normal((spec.dim, spec.dim)))
        q *= np.sign(np.diag(r))  # fix signs so the rotation is seed-stable
        X = lifted @ q.T
    order = rng.permutation(X.shape[0])
    return Dataset(features=X[order], labels=y[order].astype(np.int64),
                   n_known=spec.n_known, stage=STAGE_RAW)
