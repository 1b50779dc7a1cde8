"""Summary-quality bookkeeping: criterion sheets, aggregation, reports.

Each summary is scored on three 100-point criteria; the per-summary
score is their mean and a model's Quality Score is the mean over its
summaries.  Aggregation runs in exact decimal arithmetic; rounding
(2 places, half-even) happens only at display time.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from decimal import ROUND_HALF_EVEN, Decimal
from pathlib import Path
from typing import Iterable

from .errors import ParameterError, ValidationError

CSV_COLUMNS = ("video_id", "model", "rater", "accuracy", "clarity", "relevance")
CRITERIA = ("accuracy", "clarity", "relevance")

_TWO_PLACES = Decimal("0.01")


@dataclass(frozen=True)
class ScoreSheet:
    """One rater's criterion scores for one model's summary of one video."""

    video_id: str
    model_name: str
    accuracy: float
    clarity: float
    relevance: float
    rater_id: str = "default"

    def validate(self) -> None:
        for name in CRITERIA:
            value = getattr(self, name)
            if not (0 <= value <= 100):
                raise ValidationError(f"{name} must be in [0, 100], got {value}")


@dataclass(frozen=True)
class SummaryScore:
    video_id: str
    model_name: str
    mean: Decimal  # full-precision per-summary mean


@dataclass(frozen=True)
class QualityReport:
    per_summary_scores: tuple[SummaryScore, ...]
    per_model_quality: dict  # model -> Decimal, full precision
    per_model_stddev: dict   # model -> Decimal (population stddev, extra output)
    n_videos: int
    n_summaries: int


def _dec(value) -> Decimal:
    return Decimal(str(value))


def round2(value: Decimal) -> Decimal:
    return value.quantize(_TWO_PLACES, rounding=ROUND_HALF_EVEN)


def score_summary(sheet: ScoreSheet) -> float:
    """Per-summary score: (accuracy + clarity + relevance) / 3, rounded to
    2 places half-even."""
    sheet.validate()
    total = _dec(sheet.accuracy) + _dec(sheet.clarity) + _dec(sheet.relevance)
    return float(round2(total / 3))


def aggregate(sheets: Iterable[ScoreSheet]) -> QualityReport:
    """Group sheets by (video, model), average raters, then average the
    three criteria per summary and the summaries per model."""
    sheets = list(sheets)
    if not sheets:
        raise ParameterError("at least one score sheet is required")
    for sheet in sheets:
        sheet.validate()

    by_summary: dict[tuple[str, str], list[ScoreSheet]] = {}
    for sheet in sheets:
        by_summary.setdefault((sheet.video_id, sheet.model_name), []).append(sheet)

    summary_scores: list[SummaryScore] = []
    for (video_id, model), raters in sorted(by_summary.items()):
        criterion_means = [
            sum(_dec(getattr(r, c)) for r in raters) / len(raters) for c in CRITERIA
        ]
        mean = sum(criterion_means) / 3
        summary_scores.append(SummaryScore(video_id=video_id, model_name=model, mean=mean))

    per_model: dict[str, list[Decimal]] = {}
    for s in summary_scores:
        per_model.setdefault(s.model_name, []).append(s.mean)

    quality = {m: sum(vals) / len(vals) for m, vals in per_model.items()}
    stddev = {}
    for m, vals in per_model.items():
        mu = quality[m]
        variance = sum((v - mu) ** 2 for v in vals) / len(vals)
        stddev[m] = variance.sqrt()

    return QualityReport(
        per_summary_scores=tuple(summary_scores),
        per_model_quality=quality,
        per_model_stddev=stddev,
        n_videos=len({s.video_id for s in summary_scores}),
        n_summaries=len(summary_scores),
    )


def read_scores_csv(path: str | Path) -> list[ScoreSheet]:
    """Load sheets from a CSV with the exact header
    video_id,model,rater,accuracy,clarity,relevance."""
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or tuple(reader.fieldnames) != CSV_COLUMNS:
            raise ValidationError(
                f"CSV header must be exactly {','.join(CSV_COLUMNS)}; "
                f"got {reader.fieldnames}"
            )
        sheets = []
        for row in reader:
            try:
                sheets.append(
                    ScoreSheet(
                        video_id=row["video_id"],
                        model_name=row["model"],
                        rater_id=row["rater"],
                        accuracy=float(row["accuracy"]),
                        clarity=float(row["clarity"]),
                        relevance=float(row["relevance"]),
                    )
                )
            except (TypeError, ValueError) as exc:
                raise ValidationError(f"bad CSV row {row!r}: {exc}") from exc
    return sheets


def render_markdown(report: QualityReport) -> str:
    """Results-style table plus per-summary detail."""
    lines = [
        "# Summary Quality Report",
        "",
        f"Videos: {report.n_videos}  |  Summaries: {report.n_summaries}",
        "",
        "| Model | Quality Score | Std Dev (population) | Summaries |",
        "|---|---|---|---|",
    ]
    for model in sorted(report.per_model_quality):
        count = sum(1 for s in report.per_summary_scores if s.model_name == model)
        lines.append(
            f"| {model} | {round2(report.per_model_quality[model])} "
            f"| {round2(report.per_model_stddev[model])} | {count} |"
        )
    lines += ["", "| Video | Model | Summary Score |", "|---|---|---|"]
    for s in report.per_summary_scores:
        lines.append(f"| {s.video_id} | {s.model_name} | {round2(s.mean)} |")
    return "\n".join(lines) + "\n"


def report_json(report: QualityReport) -> str:
    doc = {
        "n_videos": report.n_videos,
        "n_summaries": report.n_summaries,
        "models": {
            m: {
                "quality_score": float(round2(q)),
                "stddev_population": float(round2(report.per_model_stddev[m])),
            }
            for m, q in sorted(report.per_model_quality.items())
        },
        "summaries": [
            {"video_id": s.video_id, "model": s.model_name, "score": float(round2(s.mean))}
            for s in report.per_summary_scores
        ],
    }
    return json.dumps(doc, indent=2) + "\n"
