"""Density clustering: core distances, MST, condensed tree, extraction."""

import math

import numpy as np
import pytest

from oracles import mst_weight_exhaustive
from trendpulse.cluster import (
    ClusterParams,
    MstEdge,
    build_mst,
    cluster_distance_matrix,
    cluster_stabilities,
    condense_tree,
    core_distances,
    dump_condensed_tree,
    hdbscan_labels,
    mutual_reachability,
)


def line_distances(points) -> np.ndarray:
    pts = np.asarray(points, dtype=np.float64)
    return np.abs(pts[:, None] - pts[None, :])


# two tight triples and one far outlier; every quantity below is hand-traced
SEVEN = [0.0, 0.1, 0.2, 10.0, 10.1, 10.2, 50.0]
SEVEN_PARAMS = ClusterParams(min_cluster_size=3, min_samples=2)


class TestCoreDistances:
    def test_seven_point_fixture(self):
        core = core_distances(line_distances(SEVEN), 2)
        assert np.allclose(core, [0.2, 0.1, 0.2, 0.2, 0.1, 0.2, 39.9])

    def test_self_excluded(self):
        # nearest OTHER point of a duplicate pair is at distance 0
        core = core_distances(line_distances([0.0, 0.0, 5.0]), 1)
        assert np.allclose(core, [0.0, 0.0, 5.0])

    def test_too_few_neighbors_infinite(self):
        core = core_distances(line_distances([0.0, 1.0, 2.0]), 5)
        assert np.all(np.isinf(core))

    def test_min_samples_validated(self):
        with pytest.raises(ValueError):
            core_distances(line_distances([0.0, 1.0]), 0)


class TestMutualReachability:
    def test_zero_cores_give_raw_distance(self):
        dist = line_distances([0.0, 3.0])
        reach = mutual_reachability(dist, np.zeros(2))
        assert reach[0, 1] == 3.0

    def test_core_dominates(self):
        dist = line_distances([0.0, 3.0])
        reach = mutual_reachability(dist, np.array([7.0, 1.0]))
        assert reach[0, 1] == 7.0

    def test_symmetric_zero_diagonal(self):
        rng = np.random.default_rng(0)
        pts = rng.normal(size=(20, 3))
        dist = np.linalg.norm(pts[:, None] - pts[None, :], axis=2)
        reach = mutual_reachability(dist, core_distances(dist, 4))
        assert np.allclose(reach, reach.T)
        assert np.all(np.diag(reach) == 0.0)
        assert np.all(reach >= dist - 1e-12)


class TestMst:
    def test_seven_point_edges(self):
        reach = mutual_reachability(line_distances(SEVEN), core_distances(line_distances(SEVEN), 2))
        edges = build_mst(reach)
        assert {(e.a, e.b) for e in edges} == {(0, 1), (0, 2), (3, 4), (3, 5), (2, 3), (4, 6)}
        weights = {(e.a, e.b): e.weight for e in edges}
        assert weights[(2, 3)] == pytest.approx(9.8)
        assert weights[(4, 6)] == pytest.approx(39.9)

    def test_two_points(self):
        edges = build_mst(line_distances([0.0, 4.0]))
        assert edges == [MstEdge(0, 1, 4.0)]

    def test_single_point_rejected(self):
        with pytest.raises(ValueError):
            build_mst(np.zeros((1, 1)))

    def test_tie_break_is_lexicographic(self):
        # equilateral triangle: all weights equal; scan order keeps (0,1), (0,2)
        dist = np.ones((3, 3)) - np.eye(3)
        edges = build_mst(dist)
        assert [(e.a, e.b) for e in edges] == [(0, 1), (0, 2)]

    def test_edges_sorted_and_oriented(self):
        rng = np.random.default_rng(1)
        pts = rng.random((30, 2))
        dist = np.linalg.norm(pts[:, None] - pts[None, :], axis=2)
        edges = build_mst(dist)
        assert len(edges) == 29
        assert all(e.a < e.b for e in edges)
        weights = [e.weight for e in edges]
        assert weights == sorted(weights)

    def test_weight_matches_exhaustive_oracle(self):
        rng = np.random.default_rng(42)
        for _ in range(25):
            n = int(rng.integers(2, 8))
            pts = rng.random((n, 2))
            dist = np.linalg.norm(pts[:, None] - pts[None, :], axis=2)
            mine = sum(e.weight for e in build_mst(dist))
            assert mine == pytest.approx(mst_weight_exhaustive(dist), abs=1e-9)

    def test_oracle_agrees_under_ties(self):
        # duplicated points create many equal-weight spanning trees
        dist = line_distances([0.0, 1.0, 1.0, 2.0, 2.0])
        mine = sum(e.weight for e in build_mst(dist))
        assert mine == pytest.approx(mst_weight_exhaustive(dist), abs=1e-12)


class TestCondensedTree:
    def tree(self):
        dist = line_distances(SEVEN)
        reach = mutual_reachability(dist, core_distances(dist, 2))
        return condense_tree(build_mst(reach), 7, 3)

    def test_structure(self):
        tree = self.tree()
        assert tree.cluster_ids == (0, 1, 2)
        assert tree.parent == {0: None, 1: 0, 2: 0}
        assert tree.cluster_size == {0: 7, 1: 3, 2: 3}
        assert tree.birth[0] == 0.0
        assert tree.birth[1] == pytest.approx(1.0 / 9.8)
        assert tree.birth[2] == pytest.approx(1.0 / 9.8)

    def test_outlier_departs_root_first(self):
        tree = self.tree()
        point_rows = [r for r in tree.rows if not r.child_is_cluster and r.parent == 0]
        assert [(r.child, r.lam) for r in point_rows] == [(6, pytest.approx(1.0 / 39.9))]

    def test_triples_depart_children_at_lambda_five(self):
        # which triple gets which child id depends on float rounding of the
        # tie at weight 0.2, so assert the partition rather than the order
        tree = self.tree()
        departures = {}
        for cid in (1, 2):
            rows = [r for r in tree.rows if not r.child_is_cluster and r.parent == cid]
            departures[cid] = frozenset(int(r.child) for r in rows)
            assert all(r.lam == pytest.approx(5.0, rel=1e-9) for r in rows)
        assert set(departures.values()) == {frozenset({0, 1, 2}), frozenset({3, 4, 5})}

    def test_stability_values(self):
        # S(child) = 3 * (5 - 1/9.8), recomputed from the definition
        stability = cluster_stabilities(self.tree())
        expected_child = 3 * (5.0 - 1.0 / 9.8)
        assert stability[1] == pytest.approx(expected_child, abs=1e-9)
        assert stability[2] == pytest.approx(expected_child, abs=1e-9)

    def test_no_infinite_birth_and_no_nan_stability(self):
        # exact duplicates force zero-weight merges
        dist = line_distances([0.0, 0.0, 0.0, 0.0, 5.0, 5.0, 5.0, 5.0])
        result = cluster_distance_matrix(dist, ClusterParams(min_cluster_size=2, min_samples=1))
        assert all(math.isfinite(b) for b in result.tree.birth.values())
        assert not any(math.isnan(s) for s in cluster_stabilities(result.tree).values())

    def test_min_cluster_size_validated(self):
        with pytest.raises(ValueError):
            condense_tree([], 5, 1)

    def test_dump_fixture(self):
        text = dump_condensed_tree(self.tree())
        assert text == (
            "cluster 0 parent=- lambda_birth=0.000000 size=7\n"
            "  cluster 1 parent=0 lambda_birth=0.102041 size=3\n"
            "  cluster 2 parent=0 lambda_birth=0.102041 size=3\n"
        )


class TestExtraction:
    def test_seven_point_labels(self):
        labels = hdbscan_labels(line_distances(SEVEN), SEVEN_PARAMS)
        assert labels.tolist() == [0, 0, 0, 1, 1, 1, -1]

    def test_renumbering_by_size_then_min_index(self):
        # bigger cluster gets label 0 even though it comes second spatially
        points = [0.0, 0.1, 0.2, 10.0, 10.1, 10.2, 10.3, 10.4]
        labels = hdbscan_labels(line_distances(points), ClusterParams(3, 2))
        assert labels.tolist() == [1, 1, 1, 0, 0, 0, 0, 0]

    def test_fewer_points_than_min_cluster_size_all_noise(self):
        labels = hdbscan_labels(line_distances([0.0, 0.1]), ClusterParams(5, 1))
        assert labels.tolist() == [-1, -1]

    def test_single_point_noise(self):
        labels = hdbscan_labels(np.zeros((1, 1)), ClusterParams(2, 1))
        assert labels.tolist() == [-1]

    def test_all_identical_points_all_noise(self):
        labels = hdbscan_labels(line_distances([1.0] * 10), ClusterParams(3, 2))
        assert labels.tolist() == [-1] * 10

    def test_duplicates_inside_cluster_stay_in_it(self):
        points = [0.0, 0.0, 0.0, 0.1, 0.2, 9.0, 9.1, 9.2, 9.3]
        labels = hdbscan_labels(line_distances(points), ClusterParams(3, 2))
        assert labels[0] == labels[1] == labels[2] == labels[3] == labels[4]
        assert labels[5] == labels[6] == labels[7] == labels[8]
        assert labels[0] != labels[5]
        assert -1 not in labels[:5]

    def test_deterministic(self):
        rng = np.random.default_rng(2)
        pts = rng.normal(size=(60, 2))
        dist = np.linalg.norm(pts[:, None] - pts[None, :], axis=2)
        first = hdbscan_labels(dist, ClusterParams(5))
        second = hdbscan_labels(dist, ClusterParams(5))
        assert np.array_equal(first, second)

    def test_permutation_invariance_as_partition(self):
        rng = np.random.default_rng(9)
        blob1 = rng.normal((0, 0), 0.05, size=(20, 2))
        blob2 = rng.normal((3, 3), 0.05, size=(20, 2))
        pts = np.vstack([blob1, blob2])
        perm = rng.permutation(len(pts))
        params = ClusterParams(5)

        def partition(points):
            dist = np.linalg.norm(points[:, None] - points[None, :], axis=2)
            labels = hdbscan_labels(dist, params)
            groups: dict[int, set] = {}
            for idx, label in enumerate(labels):
                groups.setdefault(int(label), set()).add(tuple(points[idx]))
            return {frozenset(group) for group in groups.values()}

        assert partition(pts) == partition(pts[perm])

    def test_params_validation(self):
        with pytest.raises(ValueError):
            ClusterParams(min_cluster_size=1)
        with pytest.raises(ValueError):
            ClusterParams(min_cluster_size=5, min_samples=0)
        assert ClusterParams(7).effective_min_samples == 7
        assert ClusterParams(7, 3).effective_min_samples == 3
