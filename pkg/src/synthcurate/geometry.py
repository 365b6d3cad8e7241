"""Axis-aligned box arithmetic: IoU, seeded mask placement, expand-and-crop.

All functions are pure and operate on continuous pixel coordinates with the
origin at the top-left of the image. Boxes serialize in manifests as
``[x_min, y_min, x_max, y_max]``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError


@dataclass(frozen=True)
class Box:
    """Axis-aligned rectangle in image coordinates."""

    x_min: float
    y_min: float
    x_max: float
    y_max: float

    def __post_init__(self):
        for v in (self.x_min, self.y_min, self.x_max, self.y_max):
            if not math.isfinite(v):
                raise ValidationError(f"box coordinates must be finite, got {self}")
        if self.x_min > self.x_max or self.y_min > self.y_max:
            raise ValidationError(f"box min exceeds max: {self}")

    @property
    def width(self) -> float:
        return self.x_max - self.x_min

    @property
    def height(self) -> float:
        return self.y_max - self.y_min

    @property
    def area(self) -> float:
        return self.width * self.height

    @property
    def center(self) -> tuple[float, float]:
        return (self.x_min + self.x_max) / 2, (self.y_min + self.y_max) / 2

    def to_list(self) -> list[float]:
        return [self.x_min, self.y_min, self.x_max, self.y_max]

    @classmethod
    def from_list(cls, coords) -> "Box":
        if len(coords) != 4:
            raise ValidationError(f"box needs 4 coordinates, got {len(coords)}")
        return cls(*(float(c) for c in coords))


@dataclass(frozen=True)
class ImageDims:
    """Pixel dimensions of an image."""

    width: int
    height: int

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise ValidationError(f"image dims must be positive, got {self}")


@dataclass(frozen=True)
class RoiSpec:
    """Region in which masks may be placed, plus the expected object size."""

    roi: Box
    mask_width: float
    mask_height: float

    def __post_init__(self):
        if self.mask_width <= 0 or self.mask_height <= 0:
            raise ValidationError("mask dimensions must be positive")
        if self.mask_width > self.roi.width or self.mask_height > self.roi.height:
            raise ValidationError(
                f"mask {self.mask_width}x{self.mask_height} does not fit in "
                f"ROI {self.roi.width}x{self.roi.height}"
            )


def iou(a: Box, b: Box) -> float:
    """Intersection over union of two boxes, in [0, 1].

    Returns 0 when the union has zero area (two degenerate boxes).
    """
    ix = min(a.x_max, b.x_max) - max(a.x_min, b.x_min)
    iy = min(a.y_max, b.y_max) - max(a.y_min, b.y_min)
    inter = max(0.0, ix) * max(0.0, iy)
    union = a.area + b.area - inter
    if union <= 0.0:
        return 0.0
    return inter / union


def sample_mask_box(spec: RoiSpec, rng_seed: int) -> Box:
    """Place a mask of the requested size uniformly at random inside the ROI.

    Deterministic for a fixed seed; the returned box always has exactly
    (mask_width x mask_height) dimensions and lies entirely inside the ROI.
    """
    rng = np.random.default_rng(rng_seed)
    free_x = spec.roi.width - spec.mask_width
    free_y = spec.roi.height - spec.mask_height
    x0 = spec.roi.x_min + rng.uniform(0.0, free_x) if free_x > 0 else spec.roi.x_min
    y0 = spec.roi.y_min + rng.uniform(0.0, free_y) if free_y > 0 else spec.roi.y_min
    return Box(x0, y0, x0 + spec.mask_width, y0 + spec.mask_height)


def expand_and_crop(b: Box, expand_ratio: float, dims: ImageDims) -> Box:
    """Grow a box symmetrically about its center, then clamp to image bounds.

    Each dimension scales by (1 + expand_ratio). Used to include object
    context before feature extraction.
    """
    if expand_ratio < 0:
        raise ValidationError(f"expand_ratio must be nonnegative, got {expand_ratio}")
    cx, cy = b.center
    half_w = b.width * (1 + expand_ratio) / 2
    half_h = b.height * (1 + expand_ratio) / 2
    return Box(
        max(0.0, cx - half_w),
        max(0.0, cy - half_h),
        min(float(dims.width), cx + half_w),
        min(float(dims.height), cy + half_h),
    )
