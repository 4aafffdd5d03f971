"""
Adaptive granular-ball clustering on a toy 2-D dataset
======================================================

Walks through the splitting loop at small scale: two overlapping blobs,
a purity threshold, and the quality filter that decides which balls are
allowed to become decision boundaries later.

Run with:  python3 demos/01_clustering_basics.py
"""
import numpy as np

from gbopen import HyperParams, cluster_adaptive, filter_quality

rng = np.random.default_rng(7)

###############################################################################
# Build two blobs that overlap in the middle
# ------------------------------------------
# Class 1 sits at (-1, 0), class 2 at (+1, 0). With this spread the region
# around x = 0 is contested, so a single ball per class cannot be pure.

n = 150
X = np.concatenate([
    rng.normal(loc=(-1.0, 0.0), scale=0.55, size=(n, 2)),
    rng.normal(loc=(+1.0, 0.0), scale=0.55, size=(n, 2)),
]).astype(np.float32)
y = np.concatenate([np.full(n, 1), np.full(n, 2)])

hp = HyperParams(metric="euclidean", p_l=0.95, p_t=0.95, n_t=3, seed=7)
n_l = hp.resolve_n_l(2 * n, 2)
print(f"{2 * n} points, 2 classes, purity threshold p_l = {hp.p_l}")
print(f"minimum ball size n_l resolves to {n_l}")

###############################################################################
# Cluster
# -------
# A ball splits while it is impure AND still large. Splitting seeds one
# pseudo-centroid per label present in the ball and reassigns members to
# the nearest one, so mixed regions shatter into small one-sided pieces.

result = cluster_adaptive(X, y, hp)
print(f"\nadaptive clustering produced {result.m} balls")

header = f"{'label':>5} {'count':>6} {'purity':>7} {'radius':>7}  centroid"
print(header)
print("-" * len(header))
for b in sorted(result.balls, key=lambda b: (-b.count, b.label)):
    cx, cy = b.centroid
    print(f"{b.label:>5} {b.count:>6} {b.purity:>7.3f} {b.radius:>7.3f}  ({cx:+.2f}, {cy:+.2f})")

# every terminal ball satisfies the stop condition
assert all(b.purity >= hp.p_l or b.count <= n_l for b in result.balls)

###############################################################################
# The quality filter
# ------------------
# Boundaries should come only from balls we trust: pure enough (p_t) and
# more populated than a floor (n_t, strictly). cluster_adaptive already
# applied the filter at hp's thresholds; the contested middle produced
# tiny fragments that were dropped.

print(f"\nquality filter (purity >= {hp.p_t}, count > {hp.n_t}):"
      f" kept {len(result.filtered)} of {result.m}")
for label in sorted(result.per_class_counts):
    print(f"  class {label}: {result.per_class_counts[label]} boundary-grade balls")

print("\nballs near the contested strip (|x| < 0.4):")
for b in result.balls:
    if abs(b.centroid[0]) < 0.4:
        tag = "kept" if any(k is b for k in result.filtered) else "dropped"
        print(f"  label {b.label}, count {b.count}, purity {b.purity:.2f} -> {tag}")

###############################################################################
# Tightening the floor
# --------------------
# Re-filtering the same terminal balls with a higher n_t keeps only the
# bulky cores. This is the knob the sensitivity sweep turns.

for n_t in (3, 9, 19):
    kept, _ = filter_quality(result.balls, p_t=hp.p_t, n_t=n_t)
    sizes = sorted((b.count for b in kept), reverse=True)
    print(f"n_t = {n_t:>2}: {len(kept):>2} balls, sizes {sizes}")
