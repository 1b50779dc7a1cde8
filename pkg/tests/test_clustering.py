from __future__ import annotations

import numpy as np
import pytest

from egosum.clustering import (
    CoarseLabels,
    birch_coarse,
    birch_threshold_for,
    hierarchical_merge,
    sigmoid_target,
)
from egosum.errors import ParameterError
from egosum.reduction import ReducedEmbedding

from oracles import best_two_partition_oracle, ward_trace_oracle


def reduced(x) -> ReducedEmbedding:
    return ReducedEmbedding(vectors=np.asarray(x, dtype=np.float64), method="pca")


def coarse_from(centroid_list, sizes) -> CoarseLabels:
    labels = []
    for cid, n in enumerate(sizes):
        labels.extend([cid] * n)
    return CoarseLabels(
        labels=np.array(labels),
        n_coarse=len(sizes),
        centroids=np.asarray(centroid_list, dtype=np.float64),
    )


# --- birch --------------------------------------------------------------------


def test_single_frame_single_cluster():
    out = birch_coarse(reduced([[1.0, 2.0]]), threshold=0.5)
    assert out.n_coarse == 1
    assert out.labels.tolist() == [0]


def test_two_planted_blobs_separate(rng):
    blob_a = rng.standard_normal((5, 2)) * 0.5
    blob_b = rng.standard_normal((5, 2)) * 0.5 + 100.0
    pts = np.vstack([blob_a, blob_b])
    out = birch_coarse(reduced(pts), threshold=5.0)
    assert out.n_coarse == 2
    assert out.labels.tolist() == [0] * 5 + [1] * 5
    # oracle: every frame is closer to its own blob's centroid
    for i, lab in enumerate(out.labels):
        dists = np.linalg.norm(out.centroids - pts[i], axis=1)
        assert int(np.argmin(dists)) == lab


def test_identical_points_single_cluster():
    pts = np.tile([3.0, -1.0], (12, 1))
    out = birch_coarse(reduced(pts), threshold=0.01)
    assert out.n_coarse == 1


def test_labels_first_appearance_order(rng):
    # interleave two far blobs so first-appearance ordering is exercised
    pts = np.array([[100.0], [0.0], [101.0], [1.0], [100.5]])
    out = birch_coarse(reduced(pts), threshold=5.0)
    assert out.labels.tolist() == [0, 1, 0, 1, 0]


def test_every_coarse_id_used(rng):
    pts = rng.standard_normal((60, 3)) * 4.0
    out = birch_coarse(reduced(pts), threshold=1.0, branching_factor=4)
    used = set(out.labels.tolist())
    assert used == set(range(out.n_coarse))
    assert out.centroids.shape == (out.n_coarse, 3)


def test_birch_parameter_errors():
    with pytest.raises(ParameterError):
        birch_coarse(reduced([[0.0]]), threshold=0.0)
    with pytest.raises(ParameterError):
        birch_coarse(reduced([[0.0]]), threshold=1.0, branching_factor=1)


def test_adaptive_threshold_scales_with_data(rng):
    pts = rng.standard_normal((50, 2))
    t1 = birch_threshold_for(pts, seed=1)
    t2 = birch_threshold_for(pts * 10.0, seed=1)
    assert t2 == pytest.approx(10.0 * t1, rel=1e-9)
    assert birch_threshold_for(np.zeros((5, 2))) > 0


# --- sigmoid target -------------------------------------------------------------


def test_sigmoid_clamps_to_n_coarse():
    assert sigmoid_target(1) == 1


def test_sigmoid_saturates_at_n_max():
    assert sigmoid_target(1000, n_max=10, steepness_a=0.5, midpoint_b=10.0) == 10


def test_sigmoid_default_midpoint_value():
    assert sigmoid_target(10, n_max=10, steepness_a=0.5, midpoint_b=10.0) == 5


def test_sigmoid_monotone_non_decreasing():
    values = [sigmoid_target(n) for n in range(1, 60)]
    assert all(b >= a for a, b in zip(values, values[1:]))


# --- hierarchical merge ----------------------------------------------------------


def test_merge_identity_at_full_target():
    coarse = coarse_from([[0.0], [5.0], [9.0]], [2, 3, 1])
    fine = hierarchical_merge(coarse, 3)
    assert fine.merge_tree == ()
    assert fine.n_fine == 3
    assert fine.labels.tolist() == coarse.labels.tolist()


def test_merge_two_pairs_example():
    coarse = coarse_from([[0.0], [1.0], [10.0], [11.0]], [1, 1, 1, 1])
    fine = hierarchical_merge(coarse, 2)
    assert fine.labels.tolist() == [0, 0, 1, 1]
    # exhaustive 2-partition oracle agrees
    partition, _ = best_two_partition_oracle(coarse.centroids, [1, 1, 1, 1])
    assert partition == [[0, 1], [2, 3]]


def test_merge_to_single_cluster():
    coarse = coarse_from([[0.0], [4.0], [9.0], [20.0]], [1, 2, 1, 1])
    fine = hierarchical_merge(coarse, 1)
    assert set(fine.labels.tolist()) == {0}
    assert len(fine.merge_tree) == 3


def test_merge_tree_linkage_non_decreasing(rng):
    for _ in range(30):
        k = int(rng.integers(2, 9))
        centroids = rng.standard_normal((k, 2)) * 3
        sizes = rng.integers(1, 5, size=k).tolist()
        coarse = coarse_from(centroids, sizes)
        fine = hierarchical_merge(coarse, 1)
        dists = [d for _, _, d in fine.merge_tree]
        assert all(b >= a - 1e-12 for a, b in zip(dists, dists[1:]))


def test_merge_matches_brute_force_trace(rng):
    for _ in range(40):
        k = int(rng.integers(2, 9))
        centroids = rng.standard_normal((k, 2)) * 2
        sizes = rng.integers(1, 6, size=k).tolist()
        target = int(rng.integers(1, k + 1))
        coarse = coarse_from(centroids, sizes)
        fine = hierarchical_merge(coarse, target)
        merges, partition = ward_trace_oracle(centroids, sizes, target)
        assert [(a, b) for a, b, _ in fine.merge_tree] == [(a, b) for a, b, _ in merges]
        # library linkage distance is sqrt(2 * merge cost)
        for (_, _, lib_d), (_, _, cost) in zip(fine.merge_tree, merges):
            assert lib_d == pytest.approx(np.sqrt(2 * cost), rel=1e-9, abs=1e-12)
        # identical final grouping of the original coarse ids
        groups: dict[int, list[int]] = {}
        for cid in range(k):
            frame = next(i for i, lab in enumerate(coarse.labels) if lab == cid)
            groups.setdefault(int(fine.labels[frame]), []).append(cid)
        assert sorted(groups.values()) == partition


def test_refinement_is_coarsening(rng):
    for _ in range(50):
        n = int(rng.integers(2, 40))
        pts = rng.standard_normal((n, 2)) * rng.uniform(0.5, 4.0)
        coarse = birch_coarse(reduced(pts), threshold=float(rng.uniform(0.3, 3.0)))
        target = int(rng.integers(1, coarse.n_coarse + 1))
        fine = hierarchical_merge(coarse, target)
        pairs = {}
        for c, f in zip(coarse.labels.tolist(), fine.labels.tolist()):
            assert pairs.setdefault(c, f) == f  # same coarse -> same fine
        assert fine.n_fine == target


def test_merge_target_out_of_range():
    coarse = coarse_from([[0.0], [1.0]], [1, 1])
    with pytest.raises(ParameterError):
        hierarchical_merge(coarse, 3)
    with pytest.raises(ParameterError):
        hierarchical_merge(coarse, 0)
