"""Pipeline configuration: defaults, TOML round-trip, strict key checking.

The resolved config is echoed into every pipeline output for
provenance, so field order and serialization are kept stable.
"""

from __future__ import annotations

import dataclasses
import sys
from dataclasses import dataclass
from pathlib import Path

from .errors import ConfigError

if sys.version_info >= (3, 11):
    import tomllib as _toml
else:
    import tomli as _toml


@dataclass(frozen=True)
class PipelineConfig:
    # reduction
    reduce_method: str = "pca"       # pca | tsne
    reduce_dim: int = 32
    l2_normalize: bool = False
    tsne_perplexity: float = 30.0
    tsne_iterations: int = 500
    seed: int = 0
    # clustering
    birch_threshold: float = 0.0     # 0.0 selects the adaptive default
    birch_branching: int = 50
    nmax: int = 10
    sigmoid_a: float = 0.5
    sigmoid_b: float = 10.0
    # partitioning
    outlier_z: float = 2.5
    smooth_window: int = 5
    epsilon: int = 8
    # scoring
    baseline: str = "direct"         # direct | inverse
    bias_mode: str = "boost"         # boost | dampen
    bias_strength: float = 0.7
    interp: str = "cosine"           # cosine | linear
    # interval selection
    budget: float = 0.15

    def validate(self) -> None:
        if self.reduce_method not in ("pca", "tsne"):
            raise ConfigError(f"reduce_method must be pca or tsne, got {self.reduce_method!r}")
        if self.baseline not in ("direct", "inverse"):
            raise ConfigError(f"baseline must be direct or inverse, got {self.baseline!r}")
        if self.bias_mode not in ("boost", "dampen"):
            raise ConfigError(f"bias_mode must be boost or dampen, got {self.bias_mode!r}")
        if self.interp not in ("cosine", "linear"):
            raise ConfigError(f"interp must be cosine or linear, got {self.interp!r}")
        if not (0.0 < self.budget <= 1.0):
            raise ConfigError("budget must be in (0, 1]")
        if self.birch_threshold < 0.0:
            raise ConfigError("birch_threshold must be >= 0 (0 means adaptive)")

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    def replace(self, **changes) -> "PipelineConfig":
        cfg = dataclasses.replace(self, **changes)
        cfg.validate()
        return cfg

    def to_toml(self) -> str:
        lines = []
        for item in dataclasses.fields(self):
            value = getattr(self, item.name)
            if isinstance(value, bool):
                rendered = "true" if value else "false"
            elif isinstance(value, str):
                rendered = f'"{value}"'
            else:
                rendered = repr(value)
            lines.append(f"{item.name} = {rendered}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_toml(cls, path: str | Path) -> "PipelineConfig":
        with open(path, "rb") as fh:
            doc = _toml.load(fh)
        return cls.from_dict(doc)

    @classmethod
    def from_dict(cls, doc: dict) -> "PipelineConfig":
        known = {f.name: f.type for f in dataclasses.fields(cls)}
        unknown = sorted(set(doc) - set(known))
        if unknown:
            raise ConfigError(f"unknown config key(s): {', '.join(unknown)}")
        kwargs = {}
        for name, value in doc.items():
            default = getattr(cls, name)
            if isinstance(default, bool):
                if not isinstance(value, bool):
                    raise ConfigError(f"{name} must be a boolean")
            elif isinstance(default, int):
                if isinstance(value, bool) or not isinstance(value, int):
                    raise ConfigError(f"{name} must be an integer")
            elif isinstance(default, float):
                if isinstance(value, bool) or not isinstance(value, (int, float)):
                    raise ConfigError(f"{name} must be a number")
                value = float(value)
            elif isinstance(default, str):
                if not isinstance(value, str):
                    raise ConfigError(f"{name} must be a string")
            kwargs[name] = value
        cfg = cls(**kwargs)
        cfg.validate()
        return cfg
