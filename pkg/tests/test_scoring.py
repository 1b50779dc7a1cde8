from __future__ import annotations

import numpy as np
import pytest

from egosum.errors import ParameterError
from egosum.partitioning import PartitionSet, Section
from egosum.reduction import ReducedEmbedding
from egosum.scoring import (
    ImportanceCurve,
    KeyframeSet,
    baseline_scores,
    bias_scores,
    interpolate,
    select_keyframes,
)


def reduced(x) -> ReducedEmbedding:
    return ReducedEmbedding(vectors=np.asarray(x, dtype=np.float64), method="pca")


def parts_from_lengths(lengths) -> PartitionSet:
    sections, pos = [], 0
    for i, n in enumerate(lengths):
        sections.append(Section(pos, pos + n, i))
        pos += n
    return PartitionSet(sections=tuple(sections))


def keys_at(indices, t=None) -> KeyframeSet:
    return KeyframeSet(by_partition=tuple(indices), indices=tuple(sorted(indices)))


# --- interpolation ---------------------------------------------------------------


def test_cosine_midpoint_is_exact_average():
    assert interpolate(0.2, 0.8, 0.5, "cosine") == pytest.approx(0.5, abs=1e-12)
    assert interpolate(1.0, 0.0, 0.5, "cosine") == pytest.approx(0.5, abs=1e-12)


def test_interpolation_stays_within_endpoint_range(rng):
    for _ in range(200):
        v_a, v_b = rng.uniform(0, 1, size=2)
        mu = float(rng.uniform(0, 1))
        for mode in ("linear", "cosine"):
            v = interpolate(v_a, v_b, mu, mode)
            assert min(v_a, v_b) - 1e-12 <= v <= max(v_a, v_b) + 1e-12


def test_interpolate_unknown_mode():
    with pytest.raises(ParameterError):
        interpolate(0, 1, 0.5, "cubic")


# --- keyframes --------------------------------------------------------------------


def test_singleton_partition_keyframe_is_forced():
    parts = parts_from_lengths([1])
    keys = select_keyframes(parts, reduced([[7.0]]))
    assert keys.by_partition == (0,)


def test_keyframe_is_centroid_nearest_member():
    parts = parts_from_lengths([3])
    keys = select_keyframes(parts, reduced([[0.0], [1.0], [2.0]]))
    assert keys.by_partition == (1,)  # centroid 1.0


def test_keyframe_tie_takes_earlier_index():
    parts = parts_from_lengths([2])
    keys = select_keyframes(parts, reduced([[5.0], [5.0]]))
    assert keys.by_partition == (0,)


def test_one_keyframe_per_partition_inside_bounds(rng):
    for _ in range(50):
        lengths = rng.integers(1, 7, size=int(rng.integers(1, 6))).tolist()
        parts = parts_from_lengths(lengths)
        x = rng.standard_normal((sum(lengths), 3))
        keys = select_keyframes(parts, reduced(x))
        assert len(keys.by_partition) == parts.n
        for sec, k in zip(parts.sections, keys.by_partition):
            assert sec.start <= k < sec.end
        assert keys.indices == tuple(sorted(keys.by_partition))


# --- baseline ---------------------------------------------------------------------


def test_baseline_direct_proportional():
    curve = baseline_scores(parts_from_lengths([10, 5]))
    assert curve.scores[:10].tolist() == [1.0] * 10
    assert curve.scores[10:].tolist() == [0.5] * 5


def test_baseline_single_partition_all_ones():
    curve = baseline_scores(parts_from_lengths([7]))
    assert curve.scores.tolist() == [1.0] * 7


def test_baseline_equal_lengths_uniform():
    curve = baseline_scores(parts_from_lengths([4, 4, 4]))
    assert curve.scores.tolist() == [1.0] * 12


def test_baseline_inverse_mode():
    curve = baseline_scores(parts_from_lengths([10, 5]), proportionality="inverse")
    # raw: 1 - 10/11 and 1 - 5/11, normalized so the max is 1.0
    assert curve.scores[10] == pytest.approx(1.0)
    assert curve.scores[0] == pytest.approx((1 / 11) / (6 / 11))
    assert curve.scores.max() == pytest.approx(1.0)


# --- biasing ----------------------------------------------------------------------


def test_boost_linear_midpoint_contract_example():
    base = ImportanceCurve(scores=np.full(5, 0.5))
    out = bias_scores(base, keys_at([0, 4]), mode="boost", strength=0.5, interp="linear")
    np.testing.assert_allclose(out.scores, [1.0, 0.875, 0.75, 0.875, 1.0], atol=1e-12)


def test_dampen_zero_strength_is_identity():
    base = baseline_scores(parts_from_lengths([6, 3]))
    out = bias_scores(base, keys_at([2, 7]), mode="dampen", strength=0.0, interp="cosine")
    np.testing.assert_allclose(out.scores, base.scores, atol=1e-12)


def test_dampen_farthest_point_scaled():
    base = ImportanceCurve(scores=np.full(9, 1.0))
    out = bias_scores(base, keys_at([0]), mode="dampen", strength=0.4, interp="linear")
    assert out.scores[0] == pytest.approx(1.0)
    assert out.scores[-1] == pytest.approx(0.6)  # farthest frame: base * (1 - strength)


def test_empty_keys_returns_base_unchanged():
    base = ImportanceCurve(scores=np.linspace(0.1, 1.0, 5))
    out = bias_scores(base, KeyframeSet(by_partition=(), indices=()), "boost", 0.5, "cosine")
    assert out is base


def test_boost_keyframes_achieve_max(rng):
    for _ in range(100):
        t = int(rng.integers(2, 40))
        lengths = []
        remaining = t
        while remaining > 0:
            n = int(rng.integers(1, remaining + 1))
            lengths.append(n)
            remaining -= n
        parts = parts_from_lengths(lengths)
        base = baseline_scores(parts)
        keys = select_keyframes(parts, reduced(rng.standard_normal((t, 2))))
        out = bias_scores(base, keys, "boost", float(rng.uniform(0, 1)),
                          str(rng.choice(["cosine", "linear"])))
        peak = out.scores.max()
        assert peak == pytest.approx(1.0)
        for k in keys.indices:
            assert out.scores[k] == pytest.approx(peak)


def test_boost_strength_monotone_gap(rng):
    base = ImportanceCurve(scores=np.full(11, 0.3))
    keys = keys_at([0, 10])
    gaps = []
    for strength in np.linspace(0, 1, 6):
        out = bias_scores(base, keys, "boost", float(strength), "cosine")
        gaps.append(out.scores[0] - out.scores.min())
    assert all(b >= a - 1e-12 for a, b in zip(gaps, gaps[1:]))


def test_curve_continuity_bounded_by_segment_range(rng):
    base = ImportanceCurve(scores=np.full(13, 0.4))
    keys = keys_at([3, 9])
    for mode in ("cosine", "linear"):
        out = bias_scores(base, keys, "boost", 0.8, mode)
        anchors = [0, 3, 9, 12]
        for a, b in zip(anchors, anchors[1:]):
            seg = out.scores[a:b + 1]
            rng_span = seg.max() - seg.min()
            assert np.abs(np.diff(seg)).max() <= rng_span + 1e-12


def test_bias_parameter_errors():
    base = ImportanceCurve(scores=np.full(3, 0.5))
    with pytest.raises(ParameterError):
        bias_scores(base, keys_at([1]), "boost", 1.5, "cosine")
    with pytest.raises(ParameterError):
        bias_scores(base, keys_at([1]), "explode", 0.5, "cosine")
    with pytest.raises(ParameterError):
        bias_scores(base, keys_at([1]), "boost", 0.5, "bezier")
