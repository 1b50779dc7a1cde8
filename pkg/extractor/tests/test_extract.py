from __future__ import annotations

from fractions import Fraction

import numpy as np
import pytest

from egosum_extract.cli import main
from egosum_extract.encoders import EncoderEnvironmentError, StubEncoder, TransformerEncoder
from egosum_extract.extract import ExtractorJob, extract
from egosum_extract.plan import select_frame_indices
from egosum_extract.video import DecodeError, probe

# the summarizer package is the consumer; its reader is the output contract
from egosum.embedio import read_embeddings


def stub_job(video, out, **kwargs) -> ExtractorJob:
    base = dict(video_path=str(video), output_path=str(out),
                encoder="stub", stub_encoder=True)
    base.update(kwargs)
    return ExtractorJob(**base)


def test_probe_reads_fps_and_count(synthetic_video):
    fps, count = probe(synthetic_video)
    assert fps == Fraction(30)
    assert count == 60


def test_extract_stub_matches_plan_and_validates(synthetic_video, tmp_path):
    out = tmp_path / "clip.egsm"
    report = extract(stub_job(synthetic_video, out))
    expected = select_frame_indices(Fraction(30), 60, 4)
    assert expected == [3, 11, 18, 26, 33, 41, 48, 56]
    assert report.sample_count == len(expected)

    with open(out, "rb") as fh:
        seq = read_embeddings(fh)  # validates every sequence invariant
    assert seq.sample_indices.tolist() == expected
    assert seq.meta.frame_count == 60
    assert seq.meta.native_fps == Fraction(30)
    assert seq.meta.embedding_dim == 32
    assert seq.meta.video_id == "clip"
    assert seq.meta.extractor_name == "stub-sha256-d32"


def test_extract_is_deterministic(synthetic_video, tmp_path):
    outs = []
    for sub in ("a", "b"):
        out = tmp_path / sub / "clip.egsm"
        out.parent.mkdir()
        extract(stub_job(synthetic_video, out, seed=7))
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]  # same source and seed: byte-identical files


def test_stub_embeddings_depend_on_seed_and_index():
    enc = StubEncoder(dim=16, seed=1)
    other_seed = StubEncoder(dim=16, seed=2)
    frame = np.zeros((4, 4, 3), dtype=np.uint8)
    v1, v2 = enc.encode(frame, 0), enc.encode(frame, 1)
    assert not np.array_equal(v1, v2)
    assert not np.array_equal(v1, other_seed.encode(frame, 0))
    assert np.array_equal(v1, StubEncoder(dim=16, seed=1).encode(frame, 0))


def test_rate_flag_changes_sampling(synthetic_video, tmp_path):
    out = tmp_path / "r2.egsm"
    extract(stub_job(synthetic_video, out, target_rate=2))
    with open(out, "rb") as fh:
        seq = read_embeddings(fh)
    assert seq.sample_indices.tolist() == select_frame_indices(Fraction(30), 60, 2)
    assert len(seq) == 4


def test_undecodable_video_raises(tmp_path):
    bogus = tmp_path / "not_video.avi"
    bogus.write_bytes(b"this is not a video")
    with pytest.raises(DecodeError):
        extract(stub_job(bogus, tmp_path / "x.egsm"))


def test_cli_end_to_end(synthetic_video, tmp_path, capsys):
    out = tmp_path / "cli.egsm"
    code = main([str(synthetic_video), "-o", str(out), "--encoder", "stub",
                 "--stub-encoder", "--rate", "4"])
    assert code == 0
    assert "sample_count" in capsys.readouterr().out
    with open(out, "rb") as fh:
        assert len(read_embeddings(fh)) == 8


def test_cli_reports_decode_errors(tmp_path, capsys):
    bogus = tmp_path / "broken.avi"
    bogus.write_bytes(b"nope")
    code = main([str(bogus), "-o", str(tmp_path / "x.egsm"), "--stub-encoder"])
    assert code == 1
    assert "DecodeError" in capsys.readouterr().err


@pytest.mark.parametrize("encoder,expected_dim", [
    ("dino-b16", 768),
    ("clip-base-16", 512),
])
def test_real_encoder_dimension_matches_model(encoder, expected_dim, synthetic_video, tmp_path):
    """Optional: requires downloaded model weights; skipped when absent."""
    pytest.importorskip("torch")
    pytest.importorskip("transformers")
    try:
        enc = TransformerEncoder(encoder)
    except EncoderEnvironmentError as exc:
        pytest.skip(f"weights unavailable: {exc}")
    assert enc.dim == expected_dim
    out = tmp_path / "real.egsm"
    extract(ExtractorJob(video_path=str(synthetic_video), output_path=str(out),
                         encoder=encoder, target_rate=1))
    with open(out, "rb") as fh:
        seq = read_embeddings(fh)
    assert seq.meta.embedding_dim == expected_dim
