"""EGSM embedding-sequence file format and its in-memory types.

EGSM is the portable binary interchange format between the frame-embedding
extractor (producer) and the summarization pipeline (consumer).  All
integers are little-endian; vectors are IEEE-754 binary32.

Layout::

    magic "EGSM"            4 bytes
    format_version          u16  (currently 1)
    reserved                u16  (must be 0)
    video_id_len            u32, followed by that many UTF-8 bytes
    extractor_name_len      u32, followed by that many UTF-8 bytes
    native_fps_num          u32
    native_fps_den          u32
    frame_count             u64
    sample_count            u64  (rows of the payload)
    embedding_dim           u32
    padding                 20 zero bytes (fixed header totals 64 bytes)
    sample_indices          sample_count x u64
    timestamps_s            sample_count x f64
    vectors                 sample_count * embedding_dim x f32, row-major
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass, field
from fractions import Fraction
from typing import BinaryIO

import numpy as np

from .errors import CorruptionError, FormatError, ValidationError

MAGIC = b"EGSM"
FORMAT_VERSION = 1
_HEADER_PAD = 20  # brings the fixed-width header fields to 64 bytes
FIXED_HEADER_BYTES = 64

_TIMESTAMP_TOL_S = 1e-6


@dataclass(frozen=True)
class VideoMeta:
    """Provenance of an embedding sequence: source video and extractor."""

    video_id: str
    native_fps: Fraction
    frame_count: int
    extractor_name: str
    embedding_dim: int

    @property
    def duration_s(self) -> float:
        """Video length in seconds, derived as frame_count / native_fps."""
        return self.frame_count / float(self.native_fps)

    def validate(self) -> None:
        if not isinstance(self.native_fps, Fraction):
            raise ValidationError("native_fps must be a Fraction")
        if self.native_fps <= 0:
            raise ValidationError("native_fps must be > 0")
        if self.frame_count < 0:
            raise ValidationError("frame_count must be >= 0")
        if self.embedding_dim < 1:
            raise ValidationError("embedding_dim must be >= 1")
        if not (0 <= self.native_fps.numerator <= 0xFFFFFFFF):
            raise ValidationError("native_fps numerator exceeds u32 range")
        if not (0 < self.native_fps.denominator <= 0xFFFFFFFF):
            raise ValidationError("native_fps denominator exceeds u32 range")


@dataclass(frozen=True)
class EmbeddingSequence:
    """Ordered per-sampled-frame feature vectors with timing metadata."""

    meta: VideoMeta
    sample_indices: np.ndarray  # (T,) uint64, strictly increasing
    timestamps_s: np.ndarray    # (T,) float64
    vectors: np.ndarray         # (T, D) float32

    @staticmethod
    def create(
        meta: VideoMeta,
        sample_indices,
        timestamps_s,
        vectors,
    ) -> "EmbeddingSequence":
        """Build a sequence, coercing array dtypes and validating invariants."""
        idx = np.ascontiguousarray(np.asarray(sample_indices, dtype=np.uint64))
        ts = np.ascontiguousarray(np.asarray(timestamps_s, dtype=np.float64))
        vec = np.ascontiguousarray(np.asarray(vectors, dtype=np.float32))
        if vec.ndim == 1 and vec.size == 0:
            vec = vec.reshape(0, meta.embedding_dim)
        for arr in (idx, ts, vec):
            arr.setflags(write=False)
        seq = EmbeddingSequence(meta, idx, ts, vec)
        seq.validate()
        return seq

    def __len__(self) -> int:
        return int(self.sample_indices.shape[0])

    def validate(self) -> None:
        """Check every invariant; raises ValidationError naming the first failure."""
        self.meta.validate()
        t = self.sample_indices.shape[0]
        if self.timestamps_s.shape[0] != t:
            raise ValidationError("timestamps_s length must equal sample_indices length")
        if self.vectors.ndim != 2 or self.vectors.shape[0] != t:
            raise ValidationError("vectors row count must equal sample_indices length")
        if self.vectors.shape[1] != self.meta.embedding_dim:
            raise ValidationError("vectors column count must equal embedding_dim")
        if t > 0:
            idx = self.sample_indices.astype(np.int64)
            if np.any(np.diff(idx) <= 0):
                raise ValidationError("sample_indices must be strictly increasing")
            if int(idx[-1]) >= self.meta.frame_count:
                raise ValidationError("sample_indices must all be < frame_count")
            fps = self.meta.native_fps
            expected = idx.astype(np.float64) * fps.denominator / fps.numerator
            if not np.all(np.isfinite(self.timestamps_s)):
                raise ValidationError("timestamps_s must be finite")
            if np.max(np.abs(self.timestamps_s - expected)) > _TIMESTAMP_TOL_S:
                raise ValidationError(
                    "timestamps_s must equal sample_indices / native_fps within 1e-6 s"
                )
        if not np.all(np.isfinite(self.vectors)):
            raise ValidationError("vectors must not contain NaN or infinity")
        duration = self.meta.duration_s
        exact = self.meta.frame_count / float(self.meta.native_fps)
        if exact != 0 and not math.isclose(duration, exact, rel_tol=1e-9):
            raise ValidationError("duration_s must equal frame_count / native_fps")

    def equals_bitexact(self, other: "EmbeddingSequence") -> bool:
        return (
            self.meta == other.meta
            and self.sample_indices.tobytes() == other.sample_indices.tobytes()
            and self.timestamps_s.tobytes() == other.timestamps_s.tobytes()
            and self.vectors.tobytes() == other.vectors.tobytes()
        )


def write_embeddings(seq: EmbeddingSequence, sink: BinaryIO) -> int:
    """Serialize ``seq`` to ``sink`` in the EGSM format; returns bytes written."""
    seq.validate()
    vid = seq.meta.video_id.encode("utf-8")
    ext = seq.meta.extractor_name.encode("utf-8")
    t = len(seq)
    buf = bytearray()
    buf += MAGIC
    buf += struct.pack("<HH", FORMAT_VERSION, 0)
    buf += struct.pack("<I", len(vid)) + vid
    buf += struct.pack("<I", len(ext)) + ext
    buf += struct.pack(
        "<IIQQI",
        seq.meta.native_fps.numerator,
        seq.meta.native_fps.denominator,
        seq.meta.frame_count,
        t,
        seq.meta.embedding_dim,
    )
    buf += b"\x00" * _HEADER_PAD
    buf += np.ascontiguousarray(seq.sample_indices, dtype="<u8").tobytes()
    buf += np.ascontiguousarray(seq.timestamps_s, dtype="<f8").tobytes()
    buf += np.ascontiguousarray(seq.vectors, dtype="<f4").tobytes()
    sink.write(bytes(buf))
    return len(buf)


def _read_exact(source: BinaryIO, n: int, what: str) -> bytes:
    data = source.read(n)
    if data is None:
        data = b""
    if len(data) != n:
        raise CorruptionError(
            f"truncated while reading {what}: expected {n} bytes, got {len(data)}"
        )
    return data


def read_embeddings(source: BinaryIO) -> EmbeddingSequence:
    """Parse an EGSM stream, validating every invariant before returning."""
    magic = _read_exact(source, 4, "magic")
    if magic != MAGIC:
        raise FormatError(f"bad magic {magic!r}; not an EGSM file")
    version, reserved = struct.unpack("<HH", _read_exact(source, 4, "version"))
    if version != FORMAT_VERSION:
        raise FormatError(f"unsupported format version {version}")
    if reserved != 0:
        raise FormatError("reserved header field must be 0")

    (vid_len,) = struct.unpack("<I", _read_exact(source, 4, "video_id length"))
    vid_raw = _read_exact(source, vid_len, "video_id")
    (ext_len,) = struct.unpack("<I", _read_exact(source, 4, "extractor_name length"))
    ext_raw = _read_exact(source, ext_len, "extractor_name")
    try:
        video_id = vid_raw.decode("utf-8")
        extractor_name = ext_raw.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise ValidationError(f"string field is not valid UTF-8: {exc}") from exc

    fps_num, fps_den, frame_count, t, dim = struct.unpack(
        "<IIQQI", _read_exact(source, 28, "numeric header fields")
    )
    pad = _read_exact(source, _HEADER_PAD, "header padding")
    if pad != b"\x00" * _HEADER_PAD:
        raise FormatError("header padding must be zero bytes")
    if fps_num == 0 or fps_den == 0:
        raise ValidationError("native_fps must be > 0")
    if dim < 1:
        raise ValidationError("embedding_dim must be >= 1")

    idx_bytes = _read_exact(source, t * 8, "sample_indices payload")
    ts_bytes = _read_exact(source, t * 8, "timestamps_s payload")
    vec_bytes = _read_exact(source, t * dim * 4, "vectors payload")
    trailing = source.read(1)
    if trailing:
        raise FormatError("unexpected trailing data after payload")

    meta = VideoMeta(
        video_id=video_id,
        native_fps=Fraction(fps_num, fps_den),
        frame_count=frame_count,
        extractor_name=extractor_name,
        embedding_dim=dim,
    )
    indices = np.frombuffer(idx_bytes, dtype="<u8").copy()
    timestamps = np.frombuffer(ts_bytes, dtype="<f8").copy()
    vectors = np.frombuffer(vec_bytes, dtype="<f4").copy().reshape(t, dim)
    return EmbeddingSequence.create(meta, indices, timestamps, vectors)
