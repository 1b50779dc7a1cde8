from __future__ import annotations

import sys
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))  # for oracles / synth helpers

from egosum.embedio import EmbeddingSequence, VideoMeta

CONFORMANCE_DIR = Path(__file__).parent.parent / "conformance"
DATA_DIR = Path(__file__).parent / "data"


def make_seq(
    vectors,
    fps: Fraction = Fraction(4),
    video_id: str = "test-video",
    extractor: str = "unit-test",
) -> EmbeddingSequence:
    """Sequence whose sampled frames are 0..T-1 at the given fps."""
    vectors = np.asarray(vectors, dtype=np.float32)
    if vectors.ndim == 1:
        vectors = vectors[:, None]
    t, d = vectors.shape
    fps = Fraction(fps)
    meta = VideoMeta(
        video_id=video_id,
        native_fps=fps,
        frame_count=t,
        extractor_name=extractor,
        embedding_dim=d,
    )
    indices = np.arange(t, dtype=np.uint64)
    timestamps = indices.astype(np.float64) * fps.denominator / fps.numerator
    return EmbeddingSequence.create(meta, indices, timestamps, vectors)


def random_seq(rng: np.random.Generator, t: int, d: int) -> EmbeddingSequence:
    """Randomized but always-valid sequence for round-trip tests."""
    num = int(rng.integers(1, 120))
    den = int(rng.integers(1, 8))
    fps = Fraction(num, den)
    if t > 0:
        frame_count = int(rng.integers(t, 4 * t + 2))
        indices = np.sort(rng.choice(frame_count, size=t, replace=False)).astype(np.uint64)
    else:
        frame_count = int(rng.integers(0, 10))
        indices = np.zeros(0, dtype=np.uint64)
    timestamps = indices.astype(np.float64) * fps.denominator / fps.numerator
    vectors = rng.standard_normal((t, d)).astype(np.float32)
    meta = VideoMeta(
        video_id=f"vid-{rng.integers(1e6)}",
        native_fps=fps,
        frame_count=frame_count,
        extractor_name="rng",
        embedding_dim=d,
    )
    return EmbeddingSequence.create(meta, indices, timestamps, vectors)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240811)
