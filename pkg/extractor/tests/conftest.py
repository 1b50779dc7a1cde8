from __future__ import annotations

from pathlib import Path

import cv2
import numpy as np
import pytest


@pytest.fixture
def synthetic_video(tmp_path) -> Path:
    """Two seconds of 30 fps 64x64 MJPG video with a mid-video color flip."""
    path = tmp_path / "clip.avi"
    writer = cv2.VideoWriter(str(path), cv2.VideoWriter_fourcc(*"MJPG"), 30.0, (64, 64))
    assert writer.isOpened()
    for i in range(60):
        shade = 40 if i < 30 else 200
        frame = np.full((64, 64, 3), shade, dtype=np.uint8)
        frame[:, :, 0] = (i * 4) % 255
        writer.write(frame)
    writer.release()
    return path
