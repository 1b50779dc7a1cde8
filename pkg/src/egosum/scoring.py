"""Keyframe selection and importance-score construction.

Each partition contributes one keyframe (its centroid-nearest member).
Baseline scores come from section lengths; keyframe biasing then boosts
frames near keyframes (or dampens frames far from them), with linear or
cosine interpolation shaping the transition.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import ParameterError
from .partitioning import PartitionSet
from .reduction import ReducedEmbedding

DEFAULT_BIAS_MODE = "boost"
DEFAULT_BIAS_STRENGTH = 0.7
DEFAULT_INTERP = "cosine"


@dataclass(frozen=True)
class KeyframeSet:
    """One representative sampled-frame index per partition."""

    by_partition: tuple[int, ...]
    indices: tuple[int, ...]  # sorted union of the per-partition keyframes

    def __len__(self) -> int:
        return len(self.indices)


@dataclass(frozen=True)
class ImportanceCurve:
    """Per-sampled-frame scores in [0, 1]; max is 1.0 after normalization."""

    scores: np.ndarray
    bias_mode: Optional[str] = None  # "boost" or "dampen" once biased
    interp: Optional[str] = None     # "cosine" or "linear" once biased

    def __len__(self) -> int:
        return int(self.scores.shape[0])


def interpolate(v_a: float, v_b: float, mu: float, mode: str) -> float:
    """Value between v_a and v_b at normalized position mu in [0, 1]."""
    if mode == "linear":
        return (1.0 - mu) * v_a + mu * v_b
    if mode == "cosine":
        return v_a + (v_b - v_a) * (1.0 - math.cos(math.pi * mu)) / 2.0
    raise ParameterError(f"unknown interpolation mode {mode!r}")


def select_keyframes(parts: PartitionSet, reduced: ReducedEmbedding) -> KeyframeSet:
    """Pick each partition's member nearest its centroid (earliest on ties)."""
    parts.validate()
    x = np.asarray(reduced.vectors, dtype=np.float64)
    if parts.total != x.shape[0]:
        raise ParameterError("partitions must tile the reduced sequence")
    chosen: list[int] = []
    for sec in parts.sections:
        members = x[sec.start:sec.end]
        centroid = members.mean(axis=0)
        dists = np.linalg.norm(members - centroid, axis=1)
        chosen.append(sec.start + int(np.argmin(dists)))
    return KeyframeSet(by_partition=tuple(chosen), indices=tuple(sorted(chosen)))


def baseline_scores(parts: PartitionSet, proportionality: str = "direct") -> ImportanceCurve:
    """Per-frame baseline from the length of the owning section.

    direct:  score = |P| / max |P|
    inverse: score = (1 - |P| / (max + 1)), normalized to max 1.0
    """
    parts.validate()
    lengths = np.array([s.length for s in parts.sections], dtype=np.float64)
    max_len = lengths.max()
    if proportionality == "direct":
        per_section = lengths / max_len
    elif proportionality == "inverse":
        raw = 1.0 - lengths / (max_len + 1.0)
        per_section = raw / raw.max()
    else:
        raise ParameterError(f"unknown proportionality {proportionality!r}")
    scores = np.empty(parts.total, dtype=np.float64)
    for sec, value in zip(parts.sections, per_section):
        scores[sec.start:sec.end] = value
    return ImportanceCurve(scores=scores)


def _base_at(base: np.ndarray, pos: float) -> float:
    lo = int(math.floor(pos))
    hi = min(lo + 1, base.shape[0] - 1)
    frac = pos - lo
    return (1.0 - frac) * base[lo] + frac * base[hi]


def _boost_curve(base: np.ndarray, keys: tuple[int, ...], strength: float, interp: str) -> np.ndarray:
    t = base.shape[0]
    out = base.copy()
    anchors = list(keys)
    # virtual end keys hold their nearest real key's value (1.0 under boost)
    if anchors[0] != 0:
        anchors.insert(0, 0)
    if anchors[-1] != t - 1:
        anchors.append(t - 1)
    values = {a: 1.0 for a in anchors}
    for a in anchors:
        out[a] = values[a]

    for a, b in zip(anchors, anchors[1:]):
        if b - a < 2:
            continue
        mid = (a + b) / 2.0
        envelope = interpolate(values[a], values[b], 0.5, interp)
        # midpoint contract: dip from the key envelope toward the local
        # baseline, proportionally to the bias strength
        valley = (1.0 - strength) * envelope + strength * _base_at(base, mid)
        for i in range(a + 1, b):
            if i < mid:
                mu = (i - a) / (mid - a)
                out[i] = interpolate(values[a], valley, mu, interp)
            elif i > mid:
                mu = (i - mid) / (b - mid)
                out[i] = interpolate(valley, values[b], mu, interp)
            else:
                out[i] = valley
    return out


def _dampen_curve(base: np.ndarray, keys: tuple[int, ...], strength: float, interp: str) -> np.ndarray:
    t = base.shape[0]
    key_arr = np.array(keys)
    dist = np.array([np.min(np.abs(key_arr - i)) for i in range(t)], dtype=np.float64)
    d_max = dist.max()
    if d_max == 0:
        return base.copy()
    weights = np.array([interpolate(0.0, 1.0, d / d_max, interp) for d in dist])
    return base * (1.0 - strength * weights)


def bias_scores(
    base: ImportanceCurve,
    keys: KeyframeSet,
    mode: str = DEFAULT_BIAS_MODE,
    strength: float = DEFAULT_BIAS_STRENGTH,
    interp: str = DEFAULT_INTERP,
) -> ImportanceCurve:
    """Refine a baseline curve by proximity to keyframes.

    boost:  keyframes are pinned to 1.0; between consecutive keyframes the
            curve dips toward the baseline at the segment midpoint, deeper
            for larger strength.
    dampen: keyframes keep their baseline; other frames scale down with
            distance, reaching base * (1 - strength) at the frame farthest
            from any keyframe.

    The result is renormalized so its maximum is 1.0.
    """
    if not (0.0 <= strength <= 1.0):
        raise ParameterError("strength must be in [0, 1]")
    if mode not in ("boost", "dampen"):
        raise ParameterError(f"unknown bias mode {mode!r}")
    if interp not in ("cosine", "linear"):
        raise ParameterError(f"unknown interpolation mode {interp!r}")
    if len(keys) == 0:
        return base

    scores = np.asarray(base.scores, dtype=np.float64)
    if mode == "boost":
        curve = _boost_curve(scores, keys.indices, strength, interp)
    else:
        curve = _dampen_curve(scores, keys.indices, strength, interp)
    peak = curve.max()
    if peak > 0:
        curve = curve / peak
    return ImportanceCurve(scores=curve, bias_mode=mode, interp=interp)
