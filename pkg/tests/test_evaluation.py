from __future__ import annotations

from decimal import Decimal

import pytest

from egosum.errors import ParameterError, ValidationError
from egosum.evaluation import (
    QualityReport,
    ScoreSheet,
    aggregate,
    read_scores_csv,
    render_markdown,
    report_json,
    round2,
    score_summary,
)


def sheet(video, model, a, c, r, rater="r1") -> ScoreSheet:
    return ScoreSheet(video_id=video, model_name=model, accuracy=a, clarity=c,
                      relevance=r, rater_id=rater)


def test_score_summary_simple_mean():
    assert score_summary(sheet("v", "m", 90, 80, 70)) == 80.00


def test_score_summary_zero():
    assert score_summary(sheet("v", "m", 0, 0, 0)) == 0.00


def test_score_summary_rounds_half_even():
    assert score_summary(sheet("v", "m", 100, 100, 99)) == 99.67


def test_out_of_range_criterion_rejected():
    with pytest.raises(ValidationError):
        score_summary(sheet("v", "m", 101, 50, 50))
    with pytest.raises(ValidationError):
        score_summary(sheet("v", "m", 50, -1, 50))


def test_single_sheet_quality_equals_its_mean():
    report = aggregate([sheet("v1", "m1", 90, 80, 70)])
    assert round2(report.per_model_quality["m1"]) == Decimal("80.00")
    assert report.n_videos == 1
    assert report.n_summaries == 1


def test_model_reporting_its_average():
    # two summaries averaging 64.95 exactly
    sheets = [
        sheet("v1", "m", 64.95, 64.95, 64.95),
        sheet("v2", "m", 70, 65, 59.85),  # mean 64.95
    ]
    report = aggregate(sheets)
    assert round2(report.per_model_quality["m"]) == Decimal("64.95")


def test_twentyone_videos_four_models_counts():
    sheets = [
        sheet(f"v{i}", f"m{j}", 50 + i % 10, 60, 70)
        for i in range(21)
        for j in range(4)
    ]
    report = aggregate(sheets)
    assert report.n_videos == 21
    assert report.n_summaries == 84


def test_permutation_invariance(rng):
    sheets = [
        sheet(f"v{i}", f"m{j}", float(rng.integers(0, 101)),
              float(rng.integers(0, 101)), float(rng.integers(0, 101)))
        for i in range(6) for j in range(3)
    ]
    forward = aggregate(sheets)
    shuffled = list(sheets)
    rng.shuffle(shuffled)
    backward = aggregate(shuffled)
    assert forward.per_model_quality == backward.per_model_quality
    assert forward.per_summary_scores == backward.per_summary_scores


def test_duplicate_sheet_moves_toward_not_past(rng):
    base = [sheet("v1", "m", 90, 90, 90), sheet("v2", "m", 30, 30, 30)]
    before = aggregate(base).per_model_quality["m"]
    # duplicating the low summary as a new video drags the mean down,
    # but never past the duplicated value
    after = aggregate(base + [sheet("v3", "m", 30, 30, 30)]).per_model_quality["m"]
    assert Decimal(30) < after < before


def test_multiple_raters_averaged_before_summary_scoring():
    sheets = [
        sheet("v1", "m", 80, 80, 80, rater="r1"),
        sheet("v1", "m", 60, 60, 60, rater="r2"),
    ]
    report = aggregate(sheets)
    assert report.n_summaries == 1
    assert round2(report.per_model_quality["m"]) == Decimal("70.00")


def test_aggregate_empty_rejected():
    with pytest.raises(ParameterError):
        aggregate([])


def test_exact_mean_reproduction_random_tables(rng):
    for _ in range(20):
        models = [f"m{j}" for j in range(int(rng.integers(1, 5)))]
        videos = [f"v{i}" for i in range(int(rng.integers(1, 8)))]
        sheets = [
            sheet(v, m, int(rng.integers(0, 101)), int(rng.integers(0, 101)),
                  int(rng.integers(0, 101)))
            for v in videos for m in models
        ]
        report = aggregate(sheets)
        for m in models:
            expected = sum(
                (Decimal(s.accuracy) + Decimal(s.clarity) + Decimal(s.relevance)) / 3
                for s in sheets if s.model_name == m
            ) / len(videos)
            assert report.per_model_quality[m] == expected


def test_csv_roundtrip(tmp_path):
    path = tmp_path / "scores.csv"
    path.write_text(
        "video_id,model,rater,accuracy,clarity,relevance\n"
        "v1,frame-cluster,r1,90,80,70\n"
        "v1,narrator,r1,55.5,60,64.5\n",
        encoding="utf-8",
    )
    sheets = read_scores_csv(path)
    assert len(sheets) == 2
    assert sheets[0].model_name == "frame-cluster"
    assert sheets[1].accuracy == 55.5


def test_csv_header_must_match(tmp_path):
    path = tmp_path / "scores.csv"
    path.write_text("video,model,rater,accuracy,clarity,relevance\nv,m,r,1,2,3\n")
    with pytest.raises(ValidationError, match="header"):
        read_scores_csv(path)


def test_render_outputs(tmp_path):
    report = aggregate([sheet("v1", "m1", 90, 80, 70), sheet("v1", "m2", 60, 60, 60)])
    md = render_markdown(report)
    assert "| m1 | 80.00 |" in md
    assert "Videos: 1" in md
    js = report_json(report)
    assert '"quality_score": 80.0' in js
