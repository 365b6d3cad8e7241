"""Pipeline configuration: a single JSON document, every default
overridable by CLI flag. Backend endpoints and the service port may also
come from environment variables."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from ..classifier.train import TrainConfig
from ..errors import ConfigError, ValidationError
from ..geometry import Box, RoiSpec
from ..stage1 import GateThresholds


@dataclass
class PipelineConfig:
    run_id: str
    background_dir: str
    target_class: str
    prompt: str
    roi: list[float]
    mask_width: float
    mask_height: float
    candidates_per_background: int = 1
    gate_thresholds: GateThresholds = field(default_factory=GateThresholds)
    train_config: TrainConfig = field(default_factory=TrainConfig)
    backend: str = "mock-hash"  # or "http"
    backend_url: str = ""
    backend_seed: int = 0
    master_seed: int = 0
    decision_threshold: float = 0.5
    label_resolution: str = "majority"
    feature_dims: tuple[int, int] = (32, 32)
    embed_dim: int = 64
    expand_ratio: float = 0.3
    concurrency: int = 1

    def __post_init__(self):
        if not self.run_id:
            raise ConfigError("run_id must be non-empty")
        if not self.prompt:
            raise ConfigError("prompt must be non-empty")
        if self.target_class and self.target_class.lower() not in self.prompt.lower():
            raise ConfigError(
                f"prompt must mention the target object {self.target_class!r}"
            )
        if self.candidates_per_background < 1:
            raise ConfigError("candidates_per_background must be >= 1")
        if self.concurrency < 1:
            raise ConfigError("concurrency must be >= 1")
        try:
            self.roi_spec  # validates roi geometry and mask fit
        except ValidationError as exc:
            raise ConfigError(str(exc)) from exc

    @property
    def roi_spec(self) -> RoiSpec:
        return RoiSpec(
            roi=Box.from_list(self.roi),
            mask_width=self.mask_width,
            mask_height=self.mask_height,
        )

    def to_dict(self) -> dict:
        return {
            "run_id": self.run_id,
            "background_dir": self.background_dir,
            "target_class": self.target_class,
            "prompt": self.prompt,
            "roi": list(self.roi),
            "mask_width": self.mask_width,
            "mask_height": self.mask_height,
            "candidates_per_background": self.candidates_per_background,
            "gate_thresholds": self.gate_thresholds.to_dict(),
            "train_config": self.train_config.to_dict(),
            "backend": self.backend,
            "backend_url": self.backend_url,
            "backend_seed": self.backend_seed,
            "master_seed": self.master_seed,
            "decision_threshold": self.decision_threshold,
            "label_resolution": self.label_resolution,
            "feature_dims": list(self.feature_dims),
            "embed_dim": self.embed_dim,
            "expand_ratio": self.expand_ratio,
            "concurrency": self.concurrency,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "PipelineConfig":
        d = dict(d)
        d["gate_thresholds"] = GateThresholds.from_dict(d.get("gate_thresholds", {}))
        d["train_config"] = TrainConfig.from_dict(d.get("train_config", {}))
        d["feature_dims"] = tuple(d.get("feature_dims", (32, 32)))
        return cls(**d)

    @classmethod
    def load(cls, path: str | Path) -> "PipelineConfig":
        try:
            return cls.from_dict(json.loads(Path(path).read_text()))
        except (OSError, json.JSONDecodeError, TypeError, KeyError) as exc:
            raise ConfigError(f"invalid config file {path}: {exc}") from exc

    def save(self, path: str | Path):
        Path(path).write_text(json.dumps(self.to_dict(), indent=2, sort_keys=True))
