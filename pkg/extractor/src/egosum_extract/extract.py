"""Extraction job: decode, sample, encode, write EGSM."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .egsm import write_egsm
from .encoders import make_encoder
from .plan import select_frame_indices
from .video import iter_frames, probe


@dataclass(frozen=True)
class ExtractorJob:
    video_path: str
    output_path: str
    encoder: str = "dino-b16"         # clip-base-16 | dino-b16 | stub
    target_rate: int = 4
    device: str = "cpu"
    stub_encoder: bool = False
    stub_dim: int = 32
    seed: int = 0
    deterministic: bool = True


@dataclass(frozen=True)
class ExtractionReport:
    output_path: str
    video_id: str
    extractor_name: str
    sample_count: int
    embedding_dim: int
    bytes_written: int


def extract(job: ExtractorJob) -> ExtractionReport:
    fps, frame_count = probe(job.video_path)
    indices = select_frame_indices(fps, frame_count, job.target_rate)
    encoder = make_encoder(
        job.encoder, stub=job.stub_encoder, stub_dim=job.stub_dim,
        seed=job.seed, device=job.device, deterministic=job.deterministic,
    )

    vectors = []
    for index, frame in iter_frames(job.video_path, indices):
        vectors.append(encoder.encode(frame, index))
    matrix = (
        np.vstack(vectors) if vectors else np.zeros((0, encoder.dim), dtype=np.float32)
    )

    video_id = Path(job.video_path).stem
    written = write_egsm(
        job.output_path,
        video_id=video_id,
        extractor_name=encoder.name,
        fps=fps,
        frame_count=frame_count,
        sample_indices=indices,
        vectors=matrix,
    )
    return ExtractionReport(
        output_path=str(job.output_path),
        video_id=video_id,
        extractor_name=encoder.name,
        sample_count=len(indices),
        embedding_dim=int(matrix.shape[1]),
        bytes_written=written,
    )
