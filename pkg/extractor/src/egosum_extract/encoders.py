"""Per-frame image encoders: CLIP, DINO, and a deterministic stub.

The stub derives each embedding from a SHA-256 hash of (seed, frame
index), so integration tests run without model weights.  The real
encoders load lazily through ``transformers``; a failed load raises
EncoderEnvironmentError so callers can degrade or skip.
"""

from __future__ import annotations

import hashlib

import numpy as np

KNOWN_ENCODERS = ("clip-base-16", "dino-b16")

_CHECKPOINTS = {
    "clip-base-16": "openai/clip-vit-base-patch16",
    "dino-b16": "facebook/dino-vitb16",
}


class EncoderEnvironmentError(RuntimeError):
    """Encoder weights or runtime are unavailable in this environment."""


class StubEncoder:
    """Pseudo-embeddings hashed from the frame index; frame pixels are ignored."""

    def __init__(self, dim: int = 32, seed: int = 0):
        if dim < 1:
            raise ValueError("dim must be >= 1")
        self.dim = dim
        self.seed = seed
        self.name = f"stub-sha256-d{dim}"

    def encode(self, frame_bgr: np.ndarray, frame_index: int) -> np.ndarray:
        digest = hashlib.sha256(f"{self.seed}:{frame_index}".encode()).digest()
        rng = np.random.default_rng(int.from_bytes(digest[:8], "little"))
        return rng.standard_normal(self.dim).astype(np.float32)


class TransformerEncoder:
    """CLIP or DINO vision encoder via transformers, CPU by default.

    The embedding width is read from the loaded model's configuration
    and asserted against the first produced vector, not hardcoded.
    """

    def __init__(self, encoder: str, device: str = "cpu", deterministic: bool = True):
        if encoder not in _CHECKPOINTS:
            raise ValueError(f"unknown encoder {encoder!r}; expected one of {KNOWN_ENCODERS}")
        self.encoder = encoder
        self.device = device
        checkpoint = _CHECKPOINTS[encoder]
        try:
            import torch
            from transformers import AutoImageProcessor

            if deterministic:
                torch.manual_seed(0)
            self._torch = torch
            self.processor = AutoImageProcessor.from_pretrained(checkpoint)
            if encoder == "clip-base-16":
                from transformers import CLIPVisionModelWithProjection

                self.model = CLIPVisionModelWithProjection.from_pretrained(checkpoint)
                self.dim = int(self.model.config.projection_dim)
            else:
                from transformers import ViTModel

                self.model = ViTModel.from_pretrained(checkpoint)
                self.dim = int(self.model.config.hidden_size)
            self.model.eval().to(device)
        except Exception as exc:  # noqa: BLE001 - any load failure is environmental
            raise EncoderEnvironmentError(
                f"cannot load {encoder} ({checkpoint}): {exc}"
            ) from exc
        size = getattr(self.processor, "crop_size", None) or getattr(
            self.processor, "size", {}
        )
        side = size.get("height") or size.get("shortest_edge") or 224
        self.name = f"{encoder}+center{side}"

    def encode(self, frame_bgr: np.ndarray, frame_index: int) -> np.ndarray:
        rgb = frame_bgr[:, :, ::-1]
        inputs = self.processor(images=rgb, return_tensors="pt").to(self.device)
        with self._torch.no_grad():
            out = self.model(**inputs)
        if self.encoder == "clip-base-16":
            vec = out.image_embeds[0]
        else:
            vec = out.last_hidden_state[0, 0]  # CLS token
        vec = vec.cpu().numpy().astype(np.float32)
        assert vec.shape == (self.dim,), "model output width differs from its config"
        return vec


def make_encoder(name: str, stub: bool = False, stub_dim: int = 32, seed: int = 0,
                 device: str = "cpu", deterministic: bool = True):
    if stub or name == "stub":
        return StubEncoder(dim=stub_dim, seed=seed)
    return TransformerEncoder(name, device=device, deterministic=deterministic)
