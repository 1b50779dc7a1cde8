"""Deterministic snippet-based frame sampling.

Each whole second of video is divided into ``target_rate`` equal-length
snippets and the middle frame of every nonempty snippet is selected.  All
arithmetic is exact (rationals reduced to integer math), so a plan is a
pure function of (rate, fps, frame_count).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import ParameterError


@dataclass(frozen=True)
class SamplingPlan:
    """Selected original-frame indices for one video."""

    target_rate: int
    native_fps: Fraction
    frame_count: int
    selected_indices: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.selected_indices)

    def timestamps_s(self) -> list[float]:
        """Second offsets of the selected frames."""
        fps = self.native_fps
        return [i * fps.denominator / fps.numerator for i in self.selected_indices]


def _ceil_div(a: int, b: int) -> int:
    return -(-a // b)


def plan_sampling(native_fps: Fraction, frame_count: int, target_rate: int = 4) -> SamplingPlan:
    """Select representative frames at ``target_rate`` per second.

    A frame with index i belongs to second s when s <= i / fps < s + 1.
    Within a second holding F frames starting at index ``start``, snippet
    boundaries are b_j = round_half_up(start + j * F / rate) for
    j = 0..rate, and the middle frame (b_j + b_{j+1} - 1) // 2 of each
    nonempty snippet is selected.  The trailing partial second is handled
    identically over its actual frame span.
    """
    native_fps = Fraction(native_fps)
    if native_fps <= 0:
        raise ParameterError("native_fps must be > 0")
    if target_rate < 1:
        raise ParameterError("target_rate must be >= 1")
    if frame_count < 0:
        raise ParameterError("frame_count must be >= 0")

    num, den = native_fps.numerator, native_fps.denominator
    rate = int(target_rate)
    selected: list[int] = []
    second = 0
    while True:
        start = _ceil_div(second * num, den)
        if start >= frame_count:
            break
        end = min(_ceil_div((second + 1) * num, den), frame_count)
        frames_in_second = end - start
        if frames_in_second > 0:
            # b_j = floor(start + j*F/rate + 1/2), exact in integers
            bounds = [
                (2 * start * rate + 2 * j * frames_in_second + rate) // (2 * rate)
                for j in range(rate + 1)
            ]
            for j in range(rate):
                if bounds[j + 1] > bounds[j]:
                    selected.append((bounds[j] + bounds[j + 1] - 1) // 2)
        second += 1

    return SamplingPlan(
        target_rate=rate,
        native_fps=native_fps,
        frame_count=frame_count,
        selected_indices=tuple(selected),
    )
