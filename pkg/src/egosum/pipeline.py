"""End-to-end summarization: reduce, cluster, partition, score, select.

``run_pipeline`` operates on an in-memory embedding sequence and returns
every stage product, so tests and debug tooling can inspect each one;
``summarize_file`` adds the file I/O around it.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from pathlib import Path

from . import clustering, intervals, partitioning, reduction, scoring
from .config import PipelineConfig
from .embedio import EmbeddingSequence, read_embeddings
from .errors import PipelineStageError
from .intervals import SummaryIntervals
from .scoring import ImportanceCurve, KeyframeSet

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PipelineResult:
    config: PipelineConfig
    reduced: reduction.ReducedEmbedding
    coarse: clustering.CoarseLabels
    fine: clustering.FineLabels
    final_labels: partitioning.FinalLabels
    partitions: partitioning.PartitionSet
    keyframes: KeyframeSet
    importance: ImportanceCurve
    summary: SummaryIntervals


def _stage(name: str):
    def wrap(fn):
        def inner(*args, **kwargs):
            try:
                return fn(*args, **kwargs)
            except PipelineStageError:
                raise
            except Exception as exc:
                raise PipelineStageError(name, exc) from exc
        return inner
    return wrap


def run_pipeline(config: PipelineConfig, seq: EmbeddingSequence) -> PipelineResult:
    """Run every stage over ``seq`` under ``config``; deterministic."""
    config.validate()
    t, dim = seq.vectors.shape

    @_stage("reduce")
    def do_reduce():
        if config.reduce_method == "tsne":
            d = config.reduce_dim if config.reduce_dim in (2, 3) else 2
            return reduction.reduce_tsne(
                seq, d, config.tsne_perplexity, config.tsne_iterations,
                rng_seed=config.seed, l2_normalize=config.l2_normalize,
            )
        d = max(1, min(config.reduce_dim, dim, t - 1))
        return reduction.reduce_pca(seq, d, l2_normalize=config.l2_normalize)

    reduced = do_reduce()
    if reduced.explained_variance_ratio is not None:
        logger.info(
            "reduction kept %.1f%% of variance in %d dims",
            100.0 * float(reduced.explained_variance_ratio.sum()),
            reduced.vectors.shape[1],
        )

    @_stage("cluster")
    def do_cluster():
        threshold = config.birch_threshold
        if threshold <= 0.0:
            threshold = clustering.birch_threshold_for(reduced.vectors, seed=config.seed)
        coarse = clustering.birch_coarse(reduced, threshold, config.birch_branching)
        target = clustering.sigmoid_target(
            coarse.n_coarse, config.nmax, config.sigmoid_a, config.sigmoid_b
        )
        fine = clustering.hierarchical_merge(coarse, target)
        return coarse, fine

    coarse, fine = do_cluster()

    @_stage("partition")
    def do_partition():
        cleaned = partitioning.eliminate_outliers(fine, reduced, config.outlier_z)
        smoothed = partitioning.smooth_labels(cleaned, config.smooth_window)
        parts = partitioning.build_partitions(smoothed)
        return smoothed, partitioning.refine_partitions(parts, config.epsilon)

    final_labels, parts = do_partition()

    @_stage("score")
    def do_score():
        keys = scoring.select_keyframes(parts, reduced)
        base = scoring.baseline_scores(parts, config.baseline)
        curve = scoring.bias_scores(
            base, keys, config.bias_mode, config.bias_strength, config.interp
        )
        return keys, curve

    keys, curve = do_score()

    @_stage("intervals")
    def do_intervals():
        candidates = intervals.make_intervals(keys, seq, curve)
        return intervals.select_intervals(candidates, config.budget)

    summary = do_intervals()
    return PipelineResult(
        config=config,
        reduced=reduced,
        coarse=coarse,
        fine=fine,
        final_labels=final_labels,
        partitions=parts,
        keyframes=keys,
        importance=curve,
        summary=summary,
    )


def _summary_document(result: PipelineResult, video_id: str) -> dict:
    return {
        "video_id": video_id,
        "budget": result.summary.budget_fraction,
        "intervals": [
            {"start_s": c.start_s, "end_s": c.end_s, "score": c.score}
            for c in result.summary.intervals
        ],
        "config": result.config.to_dict(),
    }


def write_debug_artifacts(result: PipelineResult, out_path: Path) -> list[Path]:
    """Per-stage JSON next to the summary output: labels, partitions,
    importance curve."""
    stem = out_path.with_suffix("")
    artifacts = {
        Path(f"{stem}.labels.json"): {
            "coarse": result.coarse.labels.tolist(),
            "fine": result.fine.labels.tolist(),
            "final": result.final_labels.labels.tolist(),
            "outlier_mask": result.final_labels.outlier_mask.tolist(),
        },
        Path(f"{stem}.partitions.json"): {
            "sections": [
                {"start": s.start, "end": s.end, "label": s.label}
                for s in result.partitions.sections
            ],
            "keyframes": list(result.keyframes.indices),
        },
        Path(f"{stem}.importance.json"): {
            "scores": result.importance.scores.tolist(),
            "bias_mode": result.importance.bias_mode,
            "interp": result.importance.interp,
        },
    }
    written = []
    for path, doc in artifacts.items():
        path.write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")
        written.append(path)
    return written


def summarize_file(
    config: PipelineConfig,
    in_path: str | Path,
    out_path: str | Path,
    cuts_path: str | Path | None = None,
    debug_artifacts: bool = False,
) -> PipelineResult:
    """Read an EGSM file, run the pipeline, write summary JSON (+ cut list)."""
    in_path = Path(in_path)
    out_path = Path(out_path)

    @_stage("embedio")
    def do_read():
        with open(in_path, "rb") as fh:
            return read_embeddings(fh)

    seq = do_read()
    result = run_pipeline(config, seq)

    @_stage("output")
    def do_write():
        doc = _summary_document(result, seq.meta.video_id)
        out_path.parent.mkdir(parents=True, exist_ok=True)
        out_path.write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")
        if cuts_path is not None:
            Path(cuts_path).write_text(
                intervals.render_cut_list(result.summary), encoding="utf-8"
            )
        if debug_artifacts:
            write_debug_artifacts(result, out_path)

    do_write()
    return result
