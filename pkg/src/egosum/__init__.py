"""Egocentric video summarization over frame-embedding sequences."""

from .embedio import EmbeddingSequence, VideoMeta, read_embeddings, write_embeddings
from .sampling import SamplingPlan, plan_sampling
from .reduction import ReducedEmbedding, reduce_pca, reduce_tsne
from .clustering import (
    CoarseLabels,
    FineLabels,
    birch_coarse,
    birch_threshold_for,
    hierarchical_merge,
    sigmoid_target,
)
from .partitioning import (
    FinalLabels,
    PartitionSet,
    Section,
    build_partitions,
    eliminate_outliers,
    refine_partitions,
    smooth_labels,
)
from .scoring import (
    ImportanceCurve,
    KeyframeSet,
    baseline_scores,
    bias_scores,
    interpolate,
    select_keyframes,
)
from .intervals import (
    Candidate,
    SummaryIntervals,
    emit_trim_script,
    make_intervals,
    render_cut_list,
    render_intervals_json,
    select_intervals,
)
from .evaluation import QualityReport, ScoreSheet, aggregate, score_summary
from .config import PipelineConfig
from .pipeline import PipelineResult, run_pipeline, summarize_file

__version__ = "0.1.0"

__all__ = [
    "EmbeddingSequence", "VideoMeta", "read_embeddings", "write_embeddings",
    "SamplingPlan", "plan_sampling",
    "ReducedEmbedding", "reduce_pca", "reduce_tsne",
    "CoarseLabels", "FineLabels", "birch_coarse", "birch_threshold_for",
    "hierarchical_merge", "sigmoid_target",
    "FinalLabels", "PartitionSet", "Section", "build_partitions",
    "eliminate_outliers", "refine_partitions", "smooth_labels",
    "ImportanceCurve", "KeyframeSet", "baseline_scores", "bias_scores",
    "interpolate", "select_keyframes",
    "Candidate", "SummaryIntervals", "emit_trim_script", "make_intervals",
    "render_cut_list", "render_intervals_json", "select_intervals",
    "QualityReport", "ScoreSheet", "aggregate", "score_summary",
    "PipelineConfig", "PipelineResult", "run_pipeline", "summarize_file",
]
