"""Adaptive granular-ball clustering: hand examples plus the structural
invariants that must hold on any input (termination, stop condition on
every terminal ball, and the member sets forming a partition)."""
import warnings

import numpy as np
import pytest

from gbopen import (
    COSINE,
    EUCLIDEAN,
    HyperParams,
    cluster_adaptive,
    filter_quality,
    make_ball,
    should_split,
    split_ball,
)


def two_blob_data():
    """Four points per class, classes separated on the x axis."""
    X = np.array([[0.0, 0], [0.1, 0], [0, 0.1], [0.1, 0.1],
                  [5.0, 0], [5.1, 0], [5, 0.1], [5.1, 0.1]])
    y = np.array([1, 1, 1, 1, 2, 2, 2, 2])
    return X, y


class TestMakeBall:
    def test_hand_example(self):
        """Centroid (0.05, 0.05); all four distances are sqrt(2)*0.05."""
        X, y = two_blob_data()
        b = make_ball(X, y, np.arange(4), EUCLIDEAN)
        np.testing.assert_allclose(b.centroid, [0.05, 0.05])
        np.testing.assert_allclose(b.radius, np.sqrt(2) * 0.05, rtol=1e-12)
        assert b.label == 1 and b.purity == 1.0 and b.count == 4

    def test_majority_label_and_purity(self):
        X = np.zeros((5, 2))
        X[:, 0] = np.arange(5)
        b = make_ball(X, np.array([2, 2, 2, 1, 1]), np.arange(5), EUCLIDEAN)
        assert b.label == 2
        assert b.purity == pytest.approx(3 / 5)

    def test_majority_tie_takes_smaller_label(self):
        X = np.zeros((4, 2))
        b = make_ball(X, np.array([3, 1, 3, 1]), np.arange(4), EUCLIDEAN)
        assert b.label == 1

    def test_radius_is_mean_not_max(self):
        X = np.array([[0.0], [0.0], [0.0], [4.0]])
        b = make_ball(X, np.ones(4, dtype=int), np.arange(4), EUCLIDEAN)
        # centroid 1.0, distances [1, 1, 1, 3], mean 1.5
        assert b.radius == pytest.approx(1.5)

    def test_empty_member_set_rejected(self):
        with pytest.raises(ValueError, match="empty"):
            make_ball(np.zeros((3, 2)), np.ones(3, dtype=int), np.array([], dtype=int), EUCLIDEAN)


class TestShouldSplit:
    def test_split_requires_impure_and_large(self):
        X, y = two_blob_data()
        mixed = make_ball(X, y, np.arange(8), EUCLIDEAN)  # purity 0.5
        assert should_split(mixed, p_l=0.9, n_l=4)
        assert not should_split(mixed, p_l=0.5, n_l=4)   # pure enough
        assert not should_split(mixed, p_l=0.9, n_l=8)   # small enough
        pure = make_ball(X, y, np.arange(4), EUCLIDEAN)
        assert not should_split(pure, p_l=1.0, n_l=1)


class TestSplitBall:
    def test_partition_and_shrinkage(self, rng):
        X, y = two_blob_data()
        ball = make_ball(X, y, np.arange(8), EUCLIDEAN)
        parts = split_ball(X, y, ball, rng, EUCLIDEAN)
        assert len(parts) == 2
        merged = np.sort(np.concatenate([p.member_indices for p in parts]))
        np.testing.assert_array_equal(merged, np.arange(8))
        assert all(p.count < ball.count for p in parts)

    def test_well_separated_split_is_clean(self, rng):
        X, y = two_blob_data()
        ball = make_ball(X, y, np.arange(8), EUCLIDEAN)
        parts = split_ball(X, y, ball, rng, EUCLIDEAN)
        assert sorted(p.label for p in parts) == [1, 2]
        assert all(p.purity == 1.0 for p in parts)

    def test_single_label_ball_rejected(self, rng):
        X, y = two_blob_data()
        ball = make_ball(X, y, np.arange(4), EUCLIDEAN)
        with pytest.raises(ValueError, match="single-label"):
            split_ball(X, y, ball, rng, EUCLIDEAN)

    def test_assignment_always_euclidean(self, rng):
        """Pseudo-centroid assignment ignores the reporting metric, so member
        sets agree between cosine and euclidean runs with the same draws."""
        X = rng.normal(size=(30, 3)) + 2.0
        y = np.array([1, 2, 3] * 10)
        ball = make_ball(X, y, np.arange(30), EUCLIDEAN)
        parts_e = split_ball(X, y, ball, np.random.default_rng(7), EUCLIDEAN)
        parts_c = split_ball(X, y, ball, np.random.default_rng(7), COSINE)
        for pe, pc in zip(parts_e, parts_c):
            np.testing.assert_array_equal(pe.member_indices, pc.member_indices)


class TestClusterAdaptive:
    def test_two_blobs_terminate_pure(self):
        X, y = two_blob_data()
        hp = HyperParams(metric=EUCLIDEAN, p_l=1.0, n_l=2, p_t=1.0, n_t=1, seed=0)
        res = cluster_adaptive(X, y, hp)
        assert res.m == 2
        assert all(b.purity == 1.0 for b in res.balls)
        assert res.per_class_counts == {1: 1, 2: 1}

    def test_invariants_on_random_data(self):
        """Termination, stop condition, and exact partition over many draws."""
        for seed in range(15):
            g = np.random.default_rng(seed)
            n = int(g.integers(20, 400))
            k = int(g.integers(2, 6))
            X = g.normal(size=(n, int(g.integers(2, 8))))
            y = g.integers(1, k + 1, size=n)
            hp = HyperParams(metric=EUCLIDEAN, p_l=0.9, p_t=0.9, n_t=1, seed=seed)
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")  # random labels may lose classes to the filter
                res = cluster_adaptive(X, y, hp)
            n_l = hp.resolve_n_l(n, len(np.unique(y)))
            for b in res.balls:
                assert b.purity >= hp.p_l or b.count <= n_l
            merged = np.sort(np.concatenate([b.member_indices for b in res.balls]))
            np.testing.assert_array_equal(merged, np.arange(n))

    def test_interleaved_rings_need_many_balls(self):
        """Two interleaved rings cannot be covered by one ball per class, so
        the splitter must keep refining well past the first pass."""
        g = np.random.default_rng(3)
        t = g.uniform(0, 2 * np.pi, size=400)
        r = np.where(np.arange(400) % 2 == 0, 1.0, 2.0)
        X = np.c_[r * np.cos(t), r * np.sin(t)] + g.normal(scale=0.05, size=(400, 2))
        y = (np.arange(400) % 2) + 1
        hp = HyperParams(metric=EUCLIDEAN, p_l=1.0, n_l=10, p_t=1.0, n_t=2, seed=0)
        res = cluster_adaptive(X, y, hp)
        assert res.m > 4
        assert len(res.filtered) > 2

    def test_deterministic_given_seed(self, rng):
        X = rng.normal(size=(120, 4))
        y = rng.integers(1, 4, size=120)
        hp = HyperParams(metric=EUCLIDEAN, seed=5, p_t=0.9, n_t=1)
        r1 = cluster_adaptive(X, y, hp)
        r2 = cluster_adaptive(X, y, hp)
        assert r1.m == r2.m
        for b1, b2 in zip(r1.balls, r2.balls):
            np.testing.assert_array_equal(b1.member_indices, b2.member_indices)

    def test_explicit_generator_overrides_seed(self, rng):
        X = rng.normal(size=(60, 3))
        y = rng.integers(1, 3, size=60)
        hp = HyperParams(metric=EUCLIDEAN, seed=0, p_t=0.9, n_t=1)
        r1 = cluster_adaptive(X, y, hp, rng=np.random.default_rng(11))
        r2 = cluster_adaptive(X, y, hp, rng=np.random.default_rng(11))
        assert [b.count for b in r1.balls] == [b.count for b in r2.balls]

    def test_single_class_never_splits(self, rng):
        X = rng.normal(size=(50, 2))
        res = cluster_adaptive(X, np.ones(50, dtype=int), HyperParams(metric=EUCLIDEAN))
        assert res.m == 1 and res.balls[0].purity == 1.0

    def test_input_validation(self):
        hp = HyperParams(metric=EUCLIDEAN)
        with pytest.raises(ValueError, match="non-empty"):
            cluster_adaptive(np.zeros((0, 2)), np.array([], dtype=int), hp)
        with pytest.raises(ValueError, match="one per sample"):
            cluster_adaptive(np.zeros((4, 2)), np.array([1, 2]), hp)

    def test_report_round_trip(self, tmp_path, rng):
        X = rng.normal(size=(40, 3))
        y = rng.integers(1, 3, size=40)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            res = cluster_adaptive(X, y, HyperParams(metric=EUCLIDEAN, p_l=0.8, p_t=0.8, n_t=1))
        p = tmp_path / "clusters.json"
        res.save_report(p)
        import json
        obj = json.loads(p.read_text())
        assert obj["summary"]["m"] == res.m
        assert len(obj["balls"]) == res.m
        assert sum(b["n"] for b in obj["balls"]) == 40


class TestFilterQuality:
    def _balls(self, rng):
        X = rng.normal(size=(40, 2))
        y = rng.integers(1, 4, size=40)
        return cluster_adaptive(X, y, HyperParams(metric=EUCLIDEAN, p_l=0.5, p_t=0.5, n_t=1)).balls

    def test_count_threshold_is_strict(self):
        X = np.zeros((3, 2))
        b = make_ball(X, np.ones(3, dtype=int), np.arange(3), EUCLIDEAN)
        with pytest.warns(UserWarning, match="no balls"):
            kept, _ = filter_quality([b], p_t=1.0, n_t=3)
        assert kept == []          # count 3 is not > 3
        kept, _ = filter_quality([b], p_t=1.0, n_t=2)
        assert kept == [b]

    def test_purity_threshold_is_inclusive(self):
        X = np.zeros((4, 2))
        b = make_ball(X, np.array([1, 1, 1, 2]), np.arange(4), EUCLIDEAN)
        kept, _ = filter_quality([b], p_t=0.75, n_t=1)
        assert kept == [b]
        with pytest.warns(UserWarning, match="no balls"):
            kept, _ = filter_quality([b], p_t=0.76, n_t=1)
        assert kept == []

    def test_emptied_class_warns(self, rng):
        balls = self._balls(rng)
        with pytest.warns(UserWarning, match="no balls"):
            filter_quality(balls, p_t=1.0, n_t=10 ** 6, known_labels=[1, 2, 3])

    def test_per_class_counts(self, rng):
        balls = self._balls(rng)
        kept, counts = filter_quality(balls, p_t=0.5, n_t=1, known_labels=[1, 2, 3])
        assert sum(counts.values()) == len(kept)
        assert set(counts) == {1, 2, 3}
