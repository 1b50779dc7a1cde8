"""`egosum-extract` command line."""

from __future__ import annotations

import argparse
import json
import sys

from .encoders import EncoderEnvironmentError
from .extract import ExtractorJob, extract
from .video import DecodeError


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="egosum-extract",
        description="Decode a video, sample frames, and write an EGSM embedding file",
    )
    parser.add_argument("video")
    parser.add_argument("-o", "--output", required=True, help="EGSM output path")
    parser.add_argument("--encoder", default="dino-b16",
                        choices=["clip-base-16", "dino-b16", "stub"])
    parser.add_argument("--rate", type=int, default=4, help="samples per second")
    parser.add_argument("--device", default="cpu")
    parser.add_argument("--stub-encoder", action="store_true",
                        help="use deterministic pseudo-embeddings (no model weights)")
    parser.add_argument("--stub-dim", type=int, default=32)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--deterministic", action="store_true", default=True)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    job = ExtractorJob(
        video_path=args.video,
        output_path=args.output,
        encoder=args.encoder,
        target_rate=args.rate,
        device=args.device,
        stub_encoder=args.stub_encoder,
        stub_dim=args.stub_dim,
        seed=args.seed,
        deterministic=args.deterministic,
    )
    try:
        report = extract(job)
    except DecodeError as exc:
        print(json.dumps({"error": "DecodeError", "message": str(exc)}), file=sys.stderr)
        return 1
    except EncoderEnvironmentError as exc:
        print(json.dumps({"error": "EncoderEnvironmentError", "message": str(exc)}),
              file=sys.stderr)
        return 1
    print(json.dumps({
        "output": report.output_path,
        "video_id": report.video_id,
        "extractor_name": report.extractor_name,
        "sample_count": report.sample_count,
        "embedding_dim": report.embedding_dim,
        "bytes_written": report.bytes_written,
    }, indent=2))
    return 0


if __name__ == "__main__":
    sys.exit(main())
