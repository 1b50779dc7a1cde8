"""Snippet-based frame selection, conforming to the shared test vectors.

The summarizer publishes its sampling behavior as a vector set of
(fps, frame_count, rate) -> indices; this module re-derives the same
rule locally so the extractor stays deployable on its own.  Frames are
grouped into whole seconds by timestamp, each second is cut into
``rate`` snippets at half-up-rounded proportional boundaries, and the
middle frame of every nonempty snippet is kept.
"""

from __future__ import annotations

from fractions import Fraction


def select_frame_indices(fps: Fraction, frame_count: int, rate: int = 4) -> list[int]:
    if fps <= 0:
        raise ValueError("fps must be positive")
    if rate < 1:
        raise ValueError("rate must be >= 1")
    if frame_count < 0:
        raise ValueError("frame_count must be >= 0")

    by_second: dict[int, list[int]] = {}
    for i in range(frame_count):
        second = int(Fraction(i) / fps)
        by_second.setdefault(second, []).append(i)

    half = Fraction(1, 2)
    picks: list[int] = []
    for second in sorted(by_second):
        frames = by_second[second]
        start, count = frames[0], len(frames)
        bounds = [
            int((Fraction(start) + Fraction(j * count, rate) + half).__floor__())
            for j in range(rate + 1)
        ]
        for lo, hi in zip(bounds, bounds[1:]):
            if hi > lo:
                picks.append((lo + hi - 1) // 2)
    return picks
