"""Synthetic pool generators: determinism, counts, and the geometric
properties each family promises (ring margins, interleaved mixtures, the
crescent pocket)."""
import numpy as np
import pytest

from gbopen import Dataset, SynthSpec, gen_synthetic, save_embeddings
from gbopen.synth import CRESCENT, FAMILIES, GAUSSIAN_MIXTURE, RING


class TestSpecValidation:
    def test_families(self):
        assert set(FAMILIES) == {"ring", "gaussian_mixture", "crescent"}

    def test_unknown_family(self):
        with pytest.raises(ValueError, match="unknown synthetic family"):
            SynthSpec(family="spiral")

    def test_crescent_requires_two_classes(self):
        with pytest.raises(ValueError, match="two-class"):
            SynthSpec(family=CRESCENT, n_known=3)
        SynthSpec(family=CRESCENT, n_known=2)

    def test_dim_floor(self):
        with pytest.raises(ValueError, match="dim"):
            SynthSpec(dim=1)

    def test_json_round_trip(self):
        spec = SynthSpec(family=RING, n_known=4, stride=2.0, dim=16)
        assert SynthSpec.from_json(spec.to_json()) == spec


class TestCountsAndLabels:
    @pytest.mark.parametrize("family,k", [(RING, 3), (GAUSSIAN_MIXTURE, 4), (CRESCENT, 2)])
    def test_pool_composition(self, family, k):
        spec = SynthSpec(family=family, n_known=k, n_per_class=50,
                         n_open_inter=30, n_open_intra=20)
        ds = gen_synthetic(spec, seed=0)
        assert ds.n_samples == k * 50 + 50
        assert ds.n_known == k
        for c in range(1, k + 1):
            assert int((ds.labels == c).sum()) == 50
        assert int((ds.labels == k + 1).sum()) == 50

    def test_no_open_points(self):
        spec = SynthSpec(family=RING, n_open_inter=0, n_open_intra=0, n_per_class=40)
        ds = gen_synthetic(spec, seed=1)
        assert ds.labels.max() == spec.n_known

    def test_samples_are_shuffled(self):
        ds = gen_synthetic(SynthSpec(family=RING, n_per_class=100), seed=0)
        # a sorted pool would put all of class 1 first
        assert len(set(ds.labels[:20].tolist())) > 1


class TestDeterminism:
    def test_same_seed_same_bytes(self, tmp_path):
        spec = SynthSpec(family=GAUSSIAN_MIXTURE, n_per_class=80, dim=8)
        a, b = tmp_path / "a.gbem", tmp_path / "b.gbem"
        save_embeddings(gen_synthetic(spec, seed=5), a)
        save_embeddings(gen_synthetic(spec, seed=5), b)
        assert a.read_bytes() == b.read_bytes()

    def test_different_seeds_differ(self):
        spec = SynthSpec(family=RING, n_per_class=50)
        d0 = gen_synthetic(spec, seed=0)
        d1 = gen_synthetic(spec, seed=1)
        assert not np.array_equal(d0.features, d1.features)


class TestRingGeometry:
    def test_annulus_radii(self):
        spec = SynthSpec(family=RING, n_known=3, n_per_class=200, inner=2.0,
                         width=1.0, stride=3.0, n_open_inter=0, n_open_intra=0)
        ds = gen_synthetic(spec, seed=0)
        r = np.linalg.norm(ds.features.astype(np.float64), axis=1)
        for c in (1, 2, 3):
            lo = 2.0 + (c - 1) * 3.0
            rc = r[ds.labels == c]
            assert rc.min() >= lo - 1e-5 and rc.max() <= lo + 1.0 + 1e-5

    def test_intra_open_fills_the_hole(self):
        spec = SynthSpec(family=RING, n_known=3, n_per_class=100,
                         n_open_intra=150, n_open_inter=0, hole_radius=1.0)
        ds = gen_synthetic(spec, seed=2)
        r = np.linalg.norm(ds.features.astype(np.float64), axis=1)
        opens = r[ds.labels == 4]
        assert opens.max() <= 1.0 + 1e-5
        assert r[ds.labels != 4].min() >= 2.0 - 1e-5  # hole is known-free

    def test_inter_open_sits_between_rings(self):
        spec = SynthSpec(family=RING, n_known=2, n_per_class=100, inner=2.0,
                         width=1.0, stride=3.0, n_open_intra=0, n_open_inter=100)
        ds = gen_synthetic(spec, seed=3)
        r = np.linalg.norm(ds.features.astype(np.float64), axis=1)
        opens = r[ds.labels == 3]
        # gap between ring 1 (ends 3.0) and ring 2 (starts 5.0), probes at 4 +- 0.2
        assert opens.min() >= 3.8 - 1e-5 and opens.max() <= 4.2 + 1e-5

    def test_lone_ring_gets_outer_halo(self):
        spec = SynthSpec(family=RING, n_known=1, n_per_class=50,
                         n_open_intra=0, n_open_inter=50)
        ds = gen_synthetic(spec, seed=4)
        r = np.linalg.norm(ds.features.astype(np.float64), axis=1)
        assert r[ds.labels == 2].min() > r[ds.labels == 1].max()


class TestGaussianMixtureGeometry:
    def test_classes_are_multimodal(self):
        spec = SynthSpec(family=GAUSSIAN_MIXTURE, n_known=3, n_per_class=120,
                         blobs_per_class=2, noise=0.3, n_open_inter=0, n_open_intra=0)
        ds = gen_synthetic(spec, seed=0)
        X = ds.features.astype(np.float64)
        for c in (1, 2, 3):
            pts = X[ds.labels == c]
            # two far-apart modes leave a large spread around the class mean
            spread = np.linalg.norm(pts - pts.mean(axis=0), axis=1)
            assert spread.max() > 4.0

    def test_intra_open_at_origin(self):
        spec = SynthSpec(family=GAUSSIAN_MIXTURE, n_known=2, n_per_class=60,
                         noise=0.3, n_open_intra=80, n_open_inter=0)
        ds = gen_synthetic(spec, seed=1)
        X = ds.features.astype(np.float64)
        opens = X[ds.labels == 3]
        assert np.linalg.norm(opens.mean(axis=0)) < 0.25
        assert np.linalg.norm(X[ds.labels != 3], axis=1).min() > 3.0


class TestCrescentGeometry:
    def test_pocket_inside_first_arc_hull(self):
        spec = SynthSpec(family=CRESCENT, n_known=2, n_per_class=150,
                         n_open_intra=60, n_open_inter=0, noise=0.35)
        ds = gen_synthetic(spec, seed=0)
        X = ds.features.astype(np.float64)
        pocket = X[ds.labels == 3]
        arc = X[ds.labels == 1]
        # pocket centroid is strictly inside the arc's bounding box but off
        # the curve itself (min distance to arc points stays positive)
        ctr = pocket.mean(axis=0)
        assert arc[:, 0].min() < ctr[0] < arc[:, 0].max()
        assert arc[:, 1].min() < ctr[1] < arc[:, 1].max()
        d_min = np.linalg.norm(arc - ctr, axis=1).min()
        assert d_min > 0.3


class TestDimensionLift:
    def test_lift_is_isometric(self):
        """dim > 2 embeds the plane by a rotation, which preserves every
        pairwise distance. Sample order differs between the two pools (the
        extra rotation draw shifts the shuffle), so compare the sorted
        within-class distance multisets instead of row-aligned pairs."""
        base = SynthSpec(family=RING, n_known=2, n_per_class=40,
                         n_open_inter=10, n_open_intra=10)
        flat = gen_synthetic(base, seed=7)
        lifted = gen_synthetic(base.with_overrides(dim=16), seed=7)
        np.testing.assert_array_equal(np.sort(flat.labels), np.sort(lifted.labels))
        import scipy.spatial.distance as sd
        for c in (1, 2, 3):
            A = flat.features[flat.labels == c].astype(np.float64)
            B = lifted.features[lifted.labels == c].astype(np.float64)
            np.testing.assert_allclose(np.sort(sd.pdist(A)), np.sort(sd.pdist(B)),
                                       atol=1e-4)

    def test_lift_uses_all_coordinates(self):
        ds = gen_synthetic(SynthSpec(family=RING, dim=8, n_per_class=30), seed=0)
        assert np.all(np.abs(ds.features).max(axis=0) > 1e-3)

    def test_stage_and_type(self):
        ds = gen_synthetic(SynthSpec(family=RING, n_per_class=20), seed=0)
        assert isinstance(ds, Dataset)
        assert ds.stage == "raw"
        assert ds.features.dtype == np.float32
