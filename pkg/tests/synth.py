"""Planted-segment fixture generator for end-to-end recovery tests."""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from egosum.config import PipelineConfig
from egosum.embedio import EmbeddingSequence, VideoMeta


def planted_three_segment_seq(
    seed: int,
    t: int = 240,
    dim: int = 16,
    separation: float = 20.0,
    noise_sigma: float = 1.0,
) -> tuple[EmbeddingSequence, list[int]]:
    """Three contiguous segments with cluster means ``separation`` apart
    (in units of the per-dimension noise sigma).  Returns the sequence
    and the planted internal boundaries."""
    rng = np.random.default_rng(seed)
    b1 = int(rng.integers(t // 4, t // 4 + 40))
    b2 = int(rng.integers(t // 2 + 10, t // 2 + 50))
    means = np.zeros((3, dim))
    means[1, 0] = separation * noise_sigma
    means[2, 1] = separation * noise_sigma
    labels = np.zeros(t, dtype=int)
    labels[b1:b2] = 1
    labels[b2:] = 2
    vectors = means[labels] + noise_sigma * rng.standard_normal((t, dim))
    meta = VideoMeta(
        video_id=f"planted-{seed}",
        native_fps=Fraction(4),
        frame_count=t,
        extractor_name="synthetic",
        embedding_dim=dim,
    )
    indices = np.arange(t, dtype=np.uint64)
    timestamps = indices.astype(np.float64) / 4.0
    seq = EmbeddingSequence.create(meta, indices, timestamps, vectors.astype(np.float32))
    return seq, [b1, b2]


def recovery_config() -> PipelineConfig:
    """Pipeline settings for the planted-3-segment recovery suite: a
    merge target that lands on 3 clusters and an absolute BIRCH
    threshold sized between the noise radius and the planted separation."""
    return PipelineConfig(
        reduce_dim=16,
        birch_threshold=5.0,
        nmax=3,
        sigmoid_a=2.0,
        sigmoid_b=2.0,
    )
