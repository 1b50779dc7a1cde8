"""Final label cleanup and contiguous section construction.

Order of operations in the pipeline: outlier elimination, majority-vote
smoothing, run-length section building, then iterative merging of
sections shorter than the minimum length epsilon.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

import numpy as np

from .errors import ParameterError
from .clustering import FineLabels
from .reduction import ReducedEmbedding

DEFAULT_OUTLIER_Z = 2.5
DEFAULT_SMOOTH_WINDOW = 5
DEFAULT_EPSILON = 8  # two seconds of frames at a 4 fps sampling rate


@dataclass(frozen=True)
class FinalLabels:
    """Per-frame labels after outlier reassignment; no sentinel values remain."""

    labels: np.ndarray       # (T,) int
    outlier_mask: np.ndarray  # (T,) bool, True where the label was reassigned


@dataclass(frozen=True)
class Section:
    start: int  # inclusive sampled-frame index
    end: int    # exclusive
    label: int

    @property
    def length(self) -> int:
        return self.end - self.start


@dataclass(frozen=True)
class PartitionSet:
    """Contiguous sections tiling the sampled-frame range [0, T)."""

    sections: tuple[Section, ...]

    @property
    def n(self) -> int:
        return len(self.sections)

    @property
    def total(self) -> int:
        return self.sections[-1].end if self.sections else 0

    def validate(self) -> None:
        if not self.sections:
            raise ParameterError("a PartitionSet must hold at least one section")
        pos = 0
        for s in self.sections:
            if s.start != pos or s.end <= s.start:
                raise ParameterError("sections must tile [0, T) contiguously")
            pos = s.end


def eliminate_outliers(
    fine: FineLabels,
    reduced: ReducedEmbedding,
    z_threshold: float = DEFAULT_OUTLIER_Z,
) -> FinalLabels:
    """Reassign frames that sit unusually far from their cluster centroid.

    Within each cluster of size >= 3, a frame is an outlier when its
    centroid distance exceeds mean + z * stddev (population stddev) of
    the cluster's distances.  Outliers take the label of the nearest
    non-outlier frame by index; ties go to the earlier frame.
    """
    x = np.asarray(reduced.vectors, dtype=np.float64)
    labels = np.asarray(fine.labels)
    if labels.shape[0] != x.shape[0]:
        raise ParameterError("labels and vectors must be aligned")
    t = labels.shape[0]
    outlier = np.zeros(t, dtype=bool)

    for lab in np.unique(labels):
        members = np.flatnonzero(labels == lab)
        if members.size < 3:
            continue
        centroid = x[members].mean(axis=0)
        dists = np.linalg.norm(x[members] - centroid, axis=1)
        cutoff = dists.mean() + z_threshold * dists.std()
        outlier[members[dists > cutoff]] = True

    result = labels.copy()
    keepers = np.flatnonzero(~outlier)
    for i in np.flatnonzero(outlier):
        # nearest non-outlier by index; ties resolved to the earlier frame
        gaps = np.abs(keepers - i)
        result[i] = labels[keepers[int(np.argmin(gaps))]]
    return FinalLabels(labels=result, outlier_mask=outlier)


def smooth_labels(final: FinalLabels, window: int = DEFAULT_SMOOTH_WINDOW) -> FinalLabels:
    """Single-pass majority vote over a centered window.

    The window truncates at sequence edges.  A frame keeps its current
    label unless one label is the strict mode of its window.
    """
    if window < 1 or window % 2 == 0:
        raise ParameterError("window must be odd and >= 1")
    labels = np.asarray(final.labels)
    half = window // 2
    t = labels.shape[0]
    out = labels.copy()
    for i in range(t):
        lo = max(0, i - half)
        hi = min(t, i + half + 1)
        counts = Counter(labels[lo:hi].tolist())
        top = max(counts.values())
        winners = [lab for lab, c in counts.items() if c == top]
        if len(winners) == 1:
            out[i] = winners[0]
    return FinalLabels(labels=out, outlier_mask=final.outlier_mask)


def build_partitions(final: FinalLabels) -> PartitionSet:
    """Turn maximal runs of equal consecutive labels into sections."""
    labels = np.asarray(final.labels)
    if labels.shape[0] < 1:
        raise ParameterError("need at least one frame")
    sections: list[Section] = []
    start = 0
    for i in range(1, labels.shape[0]):
        if labels[i] != labels[i - 1]:
            sections.append(Section(start, i, int(labels[start])))
            start = i
    sections.append(Section(start, labels.shape[0], int(labels[start])))
    return PartitionSet(sections=tuple(sections))


def refine_partitions(parts: PartitionSet, epsilon: int = DEFAULT_EPSILON) -> PartitionSet:
    """Iteratively merge the shortest section into a neighbor until every
    section reaches length epsilon (or only one section remains).

    The shortest section (earliest on ties) merges with its shorter
    neighbor (left on ties; boundary sections take their only neighbor).
    The merged section keeps the label of the longer constituent (left
    constituent on ties).  The section count shrinks by one per merge,
    so the loop runs at most N - 1 times.
    """
    if epsilon < 1:
        raise ParameterError("epsilon must be >= 1")
    parts.validate()
    sections = [[s.start, s.end, s.label] for s in parts.sections]

    while len(sections) > 1:
        lengths = [end - start for start, end, _ in sections]
        shortest = int(np.argmin(lengths))  # first minimum: earliest wins ties
        if lengths[shortest] >= epsilon:
            break
        if shortest == 0:
            neighbor = 1
        elif shortest == len(sections) - 1:
            neighbor = shortest - 1
        else:
            left_len = lengths[shortest - 1]
            right_len = lengths[shortest + 1]
            neighbor = shortest - 1 if left_len <= right_len else shortest + 1
        lo, hi = min(shortest, neighbor), max(shortest, neighbor)
        left_sec, right_sec = sections[lo], sections[hi]
        left_len = left_sec[1] - left_sec[0]
        right_len = right_sec[1] - right_sec[0]
        label = left_sec[2] if left_len >= right_len else right_sec[2]
        sections[lo:hi + 1] = [[left_sec[0], right_sec[1], label]]

    return PartitionSet(sections=tuple(Section(s, e, lab) for s, e, lab in sections))
