"""Summary interval construction, budgeted selection, and trim output.

Consecutive keyframe timestamps bound the candidate intervals (with end
caps covering the video head and tail).  Candidates are picked greedily
by importance under a duration budget and emitted chronologically as a
JSON document plus a tool-agnostic cut list.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from decimal import ROUND_HALF_EVEN, Decimal
from pathlib import Path

import numpy as np

from .embedio import EmbeddingSequence
from .errors import ParameterError
from .scoring import ImportanceCurve, KeyframeSet

DEFAULT_BUDGET_FRACTION = 0.15


@dataclass(frozen=True)
class Candidate:
    start_s: float
    end_s: float
    score: float

    @property
    def length_s(self) -> float:
        return self.end_s - self.start_s


@dataclass(frozen=True)
class SummaryIntervals:
    """Chronologically ordered, non-overlapping summary time ranges."""

    intervals: tuple[Candidate, ...]
    budget_fraction: float
    total_duration_s: float

    def selected_length_s(self) -> float:
        return sum(c.length_s for c in self.intervals)

    def validate(self) -> None:
        prev_end = -1.0
        for c in self.intervals:
            if c.start_s >= c.end_s:
                raise ParameterError("intervals must have start_s < end_s")
            if c.start_s < prev_end:
                raise ParameterError("intervals must be chronological and non-overlapping")
            prev_end = c.end_s
        budget_s = self.budget_fraction * self.total_duration_s
        if len(self.intervals) > 1 and self.selected_length_s() > budget_s + 1e-9:
            raise ParameterError("selected length exceeds budget")


def make_intervals(
    keys: KeyframeSet,
    seq: EmbeddingSequence,
    importance: ImportanceCurve,
) -> list[Candidate]:
    """Candidate spans between consecutive keyframe timestamps.

    A leading [0, t1] and trailing [tK, duration] candidate cover the
    video's head and tail.  Each candidate is scored by the mean
    importance of the sampled frames inside it; a candidate with no
    member frames takes the importance of the time-nearest frame.
    """
    if len(keys) == 0:
        raise ParameterError("no keyframes; fall back to the whole-video interval")
    timestamps = np.asarray(seq.timestamps_s)
    scores = np.asarray(importance.scores)
    if scores.shape[0] != timestamps.shape[0]:
        raise ParameterError("importance curve must cover every sampled frame")
    duration = seq.meta.duration_s

    key_times = [float(timestamps[i]) for i in keys.indices]
    edges = [0.0] + key_times + [duration]
    candidates: list[Candidate] = []
    for a, b in zip(edges, edges[1:]):
        if b <= a:
            continue
        member = (timestamps >= a) & (timestamps < b)
        if np.any(member):
            score = float(scores[member].mean())
        else:
            midpoint = (a + b) / 2.0
            score = float(scores[int(np.argmin(np.abs(timestamps - midpoint)))])
        candidates.append(Candidate(start_s=a, end_s=b, score=score))
    return candidates


def select_intervals(
    candidates: list[Candidate],
    budget_fraction: float = DEFAULT_BUDGET_FRACTION,
) -> SummaryIntervals:
    """Greedy pick by descending score (earlier start on ties) under the
    duration budget; if nothing fits, the single top candidate is kept."""
    if not (0.0 < budget_fraction <= 1.0):
        raise ParameterError("budget_fraction must be in (0, 1]")
    if not candidates:
        raise ParameterError("no candidates to select from")

    duration = max(c.end_s for c in candidates)
    budget_s = budget_fraction * duration
    ranked = sorted(candidates, key=lambda c: (-c.score, c.start_s))

    chosen: list[Candidate] = []
    total = 0.0
    for cand in ranked:
        if total + cand.length_s <= budget_s + 1e-9:
            chosen.append(cand)
            total += cand.length_s
    if not chosen:
        chosen = [ranked[0]]
    chosen.sort(key=lambda c: c.start_s)
    return SummaryIntervals(
        intervals=tuple(chosen),
        budget_fraction=budget_fraction,
        total_duration_s=duration,
    )


def _fmt3(value: float) -> str:
    return str(Decimal(repr(value)).quantize(Decimal("0.001"), rounding=ROUND_HALF_EVEN))


def render_cut_list(sel: SummaryIntervals) -> str:
    """One `start_s end_s` pair per line, 3-decimal fixed point, half-even."""
    return "".join(f"{_fmt3(c.start_s)} {_fmt3(c.end_s)}\n" for c in sel.intervals)


def render_intervals_json(sel: SummaryIntervals, video_id: str) -> str:
    doc = {
        "video_id": video_id,
        "budget": sel.budget_fraction,
        "intervals": [
            {"start_s": c.start_s, "end_s": c.end_s, "score": c.score}
            for c in sel.intervals
        ],
    }
    return json.dumps(doc, indent=2) + "\n"


def emit_trim_script(
    sel: SummaryIntervals,
    source_path: str,
    out_dir: str | Path | None = None,
) -> tuple[Path, Path]:
    """Write the intervals JSON and the cut list next to ``source_path``
    (or into ``out_dir``); returns the two paths."""
    src = Path(source_path)
    target = Path(out_dir) if out_dir is not None else src.parent
    target.mkdir(parents=True, exist_ok=True)
    json_path = target / f"{src.stem}.intervals.json"
    cuts_path = target / f"{src.stem}.cuts.txt"
    json_path.write_text(render_intervals_json(sel, src.stem), encoding="utf-8")
    cuts_path.write_text(render_cut_list(sel), encoding="utf-8")
    return json_path, cuts_path
