"""Video decoding helpers built on OpenCV."""

from __future__ import annotations

from fractions import Fraction
from pathlib import Path
from typing import Iterator

import cv2
import numpy as np


class DecodeError(RuntimeError):
    """The video cannot be opened or ends before its declared frames."""


def probe(path: str | Path) -> tuple[Fraction, int]:
    """Native fps (as a reduced rational) and frame count.

    The container's frame count is trusted when positive; otherwise the
    stream is counted by decoding.
    """
    cap = cv2.VideoCapture(str(path))
    if not cap.isOpened():
        raise DecodeError(f"cannot open video {path}")
    try:
        fps_raw = cap.get(cv2.CAP_PROP_FPS)
        if fps_raw <= 0:
            raise DecodeError(f"video {path} reports fps {fps_raw}")
        fps = Fraction(fps_raw).limit_denominator(1001)
        count = int(cap.get(cv2.CAP_PROP_FRAME_COUNT))
        if count <= 0:
            count = 0
            while cap.read()[0]:
                count += 1
        return fps, count
    finally:
        cap.release()


def iter_frames(path: str | Path, wanted: list[int]) -> Iterator[tuple[int, np.ndarray]]:
    """Yield (frame_index, BGR frame) for each wanted index, in order.

    Decodes sequentially; raises DecodeError if the stream ends before
    the last wanted index.
    """
    if not wanted:
        return
    targets = set(wanted)
    last = max(wanted)
    cap = cv2.VideoCapture(str(path))
    if not cap.isOpened():
        raise DecodeError(f"cannot open video {path}")
    try:
        index = 0
        while index <= last:
            ok, frame = cap.read()
            if not ok:
                raise DecodeError(
                    f"video {path} ended at frame {index}, needed frame {last}"
                )
            if index in targets:
                yield index, frame
            index += 1
    finally:
        cap.release()
