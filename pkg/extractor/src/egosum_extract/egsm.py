"""EGSM writer implementing the published interchange format.

Little-endian throughout.  Layout: magic "EGSM", version u16 (1),
reserved u16 (0), length-prefixed UTF-8 video id and extractor name,
fps numerator/denominator u32, frame_count u64, sample count u64,
embedding dim u32, 20 zero bytes of padding (the fixed-width header
region totals 64 bytes), then u64 sample indices, f64 timestamps, and
row-major f32 vectors.
"""

from __future__ import annotations

import struct
from fractions import Fraction
from pathlib import Path

import numpy as np

MAGIC = b"EGSM"
VERSION = 1
HEADER_PADDING = b"\x00" * 20


def write_egsm(
    path: str | Path,
    video_id: str,
    extractor_name: str,
    fps: Fraction,
    frame_count: int,
    sample_indices: list[int],
    vectors: np.ndarray,
) -> int:
    """Write one embedding sequence; returns bytes written."""
    vectors = np.ascontiguousarray(vectors, dtype="<f4")
    t = len(sample_indices)
    if vectors.shape[0] != t:
        raise ValueError("one vector per sampled frame is required")
    if t and not all(b > a for a, b in zip(sample_indices, sample_indices[1:])):
        raise ValueError("sample indices must be strictly increasing")
    if t and sample_indices[-1] >= frame_count:
        raise ValueError("sample indices must be < frame_count")
    if not np.all(np.isfinite(vectors)):
        raise ValueError("vectors must be finite")

    dim = int(vectors.shape[1])
    indices = np.asarray(sample_indices, dtype="<u8")
    timestamps = indices.astype(np.float64) * fps.denominator / fps.numerator

    vid = video_id.encode("utf-8")
    ext = extractor_name.encode("utf-8")
    blob = bytearray()
    blob += MAGIC
    blob += struct.pack("<HH", VERSION, 0)
    blob += struct.pack("<I", len(vid)) + vid
    blob += struct.pack("<I", len(ext)) + ext
    blob += struct.pack("<IIQQI", fps.numerator, fps.denominator, frame_count, t, dim)
    blob += HEADER_PADDING
    blob += indices.tobytes()
    blob += np.asarray(timestamps, dtype="<f8").tobytes()
    blob += vectors.tobytes()

    Path(path).write_bytes(bytes(blob))
    return len(blob)
