"""Backend contracts shared by the HTTP client and the mocks."""

from __future__ import annotations

import abc
from dataclasses import dataclass, field

import numpy as np

from ..errors import ValidationError
from ..geometry import Box


@dataclass(frozen=True)
class BackendEndpoint:
    """Where a model service lives and how patient the client should be."""

    base_url: str
    timeout: float = 30.0
    retry_limit: int = 2

    def __post_init__(self):
        if self.timeout <= 0:
            raise ValidationError("endpoint timeout must be positive")
        if self.retry_limit < 0:
            raise ValidationError("retry_limit must be nonnegative")


@dataclass(frozen=True)
class Detection:
    """One detector hit: class label, confidence, and predicted box."""

    class_label: str
    confidence: float
    box: Box

    def __post_init__(self):
        if not 0.0 <= self.confidence <= 1.0:
            raise ValidationError(f"confidence out of [0,1]: {self.confidence}")


@dataclass
class FeatureBundle:
    """Pooled feature vectors from the two frozen backbone channels."""

    global_features: np.ndarray
    spatial_features: np.ndarray
    source_tags: tuple[str, str] = ("global", "spatial")

    def __post_init__(self):
        self.global_features = np.asarray(self.global_features, dtype=np.float64)
        self.spatial_features = np.asarray(self.spatial_features, dtype=np.float64)
        if self.global_features.size == 0 or self.spatial_features.size == 0:
            raise ValidationError("feature vectors must be non-empty")


class Backends(abc.ABC):
    """The five model services the pipeline depends on.

    Every implementation must honor the same semantics: `detect` returns
    target-class detections sorted by descending confidence, `caption`
    never returns an empty string, and mock implementations are pure
    functions of (inputs, configured seed).
    """

    @abc.abstractmethod
    def inpaint(self, background_ref: str, prompt: str, mask: Box, seed: int) -> str:
        """Generate an image by inpainting `mask` on the background; returns the new image id."""

    @abc.abstractmethod
    def detect(self, image_ref: str, target_class: str) -> list[Detection]:
        """Target-class detections sorted by descending confidence."""

    @abc.abstractmethod
    def aesthetic_score(self, image_ref: str) -> float:
        """Scalar visual-quality score (open scale, typically 0-10)."""

    @abc.abstractmethod
    def caption(self, image_ref: str, prompt: str) -> str:
        """Descriptive caption of the entire image."""

    @abc.abstractmethod
    def embed_text(self, text: str) -> np.ndarray:
        """Sentence embedding of the text; fixed dimension per backend."""

    @abc.abstractmethod
    def extract_features(self, image_ref: str, crop: Box) -> FeatureBundle:
        """Pooled two-channel features of the cropped region."""

    @abc.abstractmethod
    def identifier(self) -> str:
        """Stable identifier recorded in the manifest for provenance."""
