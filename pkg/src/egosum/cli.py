"""`egosum` command line: plan, inspect, summarize, narrate, cot-summarize, eval."""

from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import sys
from fractions import Fraction
from pathlib import Path

from . import llm
from .config import PipelineConfig
from .embedio import read_embeddings
from .errors import EgosumError, ParameterError, PipelineStageError
from .evaluation import aggregate, read_scores_csv, render_markdown, report_json
from .pipeline import summarize_file
from .sampling import plan_sampling

logger = logging.getLogger("egosum")

_IMAGE_TYPES = {".jpg": "image/jpeg", ".jpeg": "image/jpeg", ".png": "image/png"}


def _parse_fps(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise ParameterError(f"cannot parse fps {text!r}: {exc}") from exc


def _load_frames(source: str, rate: float) -> tuple[list, list]:
    """Frames from a directory of images (sorted by name); timestamps i/rate."""
    root = Path(source)
    if not root.is_dir():
        raise ParameterError(f"frame source {source!r} is not a directory")
    paths = sorted(p for p in root.iterdir() if p.suffix.lower() in _IMAGE_TYPES)
    if not paths:
        raise ParameterError(f"no .jpg/.png frames found under {source!r}")
    frames = [
        llm.ImagePart.from_bytes(p.read_bytes(), _IMAGE_TYPES[p.suffix.lower()])
        for p in paths
    ]
    timestamps = [i / rate for i in range(len(paths))]
    return frames, timestamps


def _make_transport(args) -> llm.Transport:
    if args.mock:
        return llm.ScriptedTransport.from_script_file(args.mock)
    return llm.HttpChatTransport()


def _resolved_config(args) -> PipelineConfig:
    config = PipelineConfig.from_toml(args.config) if args.config else PipelineConfig()
    overrides = {}
    for flag, key in [
        ("reduce", "reduce_method"), ("dim", "reduce_dim"),
        ("perplexity", "tsne_perplexity"), ("tsne_iterations", "tsne_iterations"),
        ("seed", "seed"), ("birch_threshold", "birch_threshold"),
        ("birch_branching", "birch_branching"), ("nmax", "nmax"),
        ("sigmoid_a", "sigmoid_a"), ("sigmoid_b", "sigmoid_b"),
        ("outlier_z", "outlier_z"), ("smooth_window", "smooth_window"),
        ("epsilon", "epsilon"), ("baseline", "baseline"),
        ("bias_mode", "bias_mode"), ("bias_strength", "bias_strength"),
        ("interp", "interp"), ("budget", "budget"),
    ]:
        value = getattr(args, flag, None)
        if value is not None:
            overrides[key] = value
    if getattr(args, "l2_normalize", False):
        overrides["l2_normalize"] = True
    return config.replace(**overrides) if overrides else config


def _cmd_plan(args) -> int:
    plan = plan_sampling(_parse_fps(args.fps), args.frames, args.rate)
    print(json.dumps({
        "fps": str(plan.native_fps),
        "frame_count": plan.frame_count,
        "rate": plan.target_rate,
        "indices": list(plan.selected_indices),
    }, indent=2))
    return 0


def _cmd_inspect(args) -> int:
    with open(args.input, "rb") as fh:
        seq = read_embeddings(fh)
    meta = seq.meta
    print(json.dumps({
        "video_id": meta.video_id,
        "extractor_name": meta.extractor_name,
        "native_fps": str(meta.native_fps),
        "frame_count": meta.frame_count,
        "duration_s": meta.duration_s,
        "sample_count": len(seq),
        "embedding_dim": meta.embedding_dim,
    }, indent=2))
    return 0


def _cmd_summarize(args) -> int:
    config = _resolved_config(args)
    summarize_file(
        config,
        args.input,
        args.output,
        cuts_path=args.cuts,
        debug_artifacts=args.debug_artifacts,
    )
    return 0


def _cmd_narrate(args) -> int:
    frames, timestamps = _load_frames(args.frames_dir, args.rate)
    transport = _make_transport(args)
    log = llm.narrate_video(
        frames, timestamps, transport,
        batch_size=args.batch_size, history_k=args.history_k,
    )
    Path(args.output).write_text(log.to_json(), encoding="utf-8")
    return 0


def _cmd_cot_summarize(args) -> int:
    frames, timestamps = _load_frames(args.frames_dir, args.rate)
    transport = _make_transport(args)
    summary = llm.cot_summarize(frames, timestamps, transport, frame_cap=args.max_frames)
    doc = {
        "steps": list(summary.step_outputs),
        "intervals": [[a, b] for a, b in summary.final_intervals],
    }
    Path(args.output).write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")
    return 0


def _cmd_eval(args) -> int:
    report = aggregate(read_scores_csv(args.scores))
    Path(args.output).write_text(render_markdown(report), encoding="utf-8")
    if args.json:
        Path(args.json).write_text(report_json(report), encoding="utf-8")
    return 0


def _add_config_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="TOML config file; flags override it")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--reduce", choices=["pca", "tsne"], default=None)
    p.add_argument("--dim", type=int, default=None)
    p.add_argument("--perplexity", type=float, default=None)
    p.add_argument("--tsne-iterations", dest="tsne_iterations", type=int, default=None)
    p.add_argument("--l2-normalize", dest="l2_normalize", action="store_true")
    p.add_argument("--birch-threshold", dest="birch_threshold", type=float, default=None)
    p.add_argument("--birch-branching", dest="birch_branching", type=int, default=None)
    p.add_argument("--nmax", type=int, default=None)
    p.add_argument("--sigmoid-a", dest="sigmoid_a", type=float, default=None)
    p.add_argument("--sigmoid-b", dest="sigmoid_b", type=float, default=None)
    p.add_argument("--outlier-z", dest="outlier_z", type=float, default=None)
    p.add_argument("--smooth-window", dest="smooth_window", type=int, default=None)
    p.add_argument("--epsilon", type=int, default=None)
    p.add_argument("--baseline", choices=["direct", "inverse"], default=None)
    p.add_argument("--bias-mode", dest="bias_mode", choices=["boost", "dampen"], default=None)
    p.add_argument("--bias-strength", dest="bias_strength", type=float, default=None)
    p.add_argument("--interp", choices=["cosine", "linear"], default=None)
    p.add_argument("--budget", type=float, default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="egosum",
        description="Egocentric video summarization over embedding sequences",
    )
    parser.add_argument("--log-level", default="WARNING",
                        choices=["DEBUG", "INFO", "WARNING", "ERROR"])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("plan", help="print the frame-sampling plan as JSON")
    p.add_argument("--fps", required=True, help="native fps, e.g. 30 or 30000/1001")
    p.add_argument("--frames", required=True, type=int, help="total frame count")
    p.add_argument("--rate", type=int, default=4, help="target samples per second")
    p.set_defaults(fn=_cmd_plan)

    p = sub.add_parser("inspect", help="print an EGSM file header as JSON")
    p.add_argument("input")
    p.set_defaults(fn=_cmd_inspect)

    p = sub.add_parser("summarize", help="run the summarization pipeline on an EGSM file")
    p.add_argument("input")
    p.add_argument("-o", "--output", required=True, help="summary JSON path")
    p.add_argument("--cuts", help="also write a cut list to this path")
    p.add_argument("--debug-artifacts", action="store_true",
                   help="write per-stage JSON artifacts next to the output")
    _add_config_flags(p)
    p.set_defaults(fn=_cmd_summarize)

    p = sub.add_parser("narrate", help="narrate frames one by one with history context")
    p.add_argument("frames_dir", help="directory of .jpg/.png frames, sorted by name")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--rate", type=float, default=4.0, help="frames per second for timestamps")
    p.add_argument("--batch-size", dest="batch_size", type=int, default=llm.DEFAULT_BATCH_SIZE)
    p.add_argument("--history-k", dest="history_k", type=int, default=llm.DEFAULT_HISTORY_K)
    p.add_argument("--mock", help="scripted transport JSON for offline runs")
    p.set_defaults(fn=_cmd_narrate)

    p = sub.add_parser("cot-summarize", help="whole-video multi-step summarization request")
    p.add_argument("frames_dir")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--rate", type=float, default=4.0)
    p.add_argument("--max-frames", dest="max_frames", type=int, default=llm.COT_FRAME_CAP)
    p.add_argument("--mock", help="scripted transport JSON for offline runs")
    p.set_defaults(fn=_cmd_cot_summarize)

    p = sub.add_parser("eval", help="aggregate criterion scores into a quality report")
    p.add_argument("scores", help="CSV: video_id,model,rater,accuracy,clarity,relevance")
    p.add_argument("-o", "--output", required=True, help="Markdown report path")
    p.add_argument("--json", help="also write the report as JSON")
    p.set_defaults(fn=_cmd_eval)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=getattr(logging, args.log_level))
    try:
        return args.fn(args)
    except PipelineStageError as exc:
        print(json.dumps({
            "error": type(exc.cause).__name__,
            "stage": exc.stage,
            "message": str(exc.cause),
        }), file=sys.stderr)
        return 1
    except EgosumError as exc:
        print(json.dumps({
            "error": type(exc).__name__,
            "message": str(exc),
        }), file=sys.stderr)
        return 1
    except OSError as exc:
        print(json.dumps({"error": "OSError", "message": str(exc)}), file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
