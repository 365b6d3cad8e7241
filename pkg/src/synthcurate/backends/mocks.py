"""Deterministic mock backends.

Two flavors:

* `ScriptedBackends` replays a fixture map exactly and raises on unknown
  request keys rather than fabricating values; used for targeted tests.
* `HashBackends` derives every response from a seeded hash of the request,
  so arbitrarily large end-to-end runs are reproducible bit-for-bit.
"""

from __future__ import annotations

import hashlib
import json

import numpy as np
from PIL import Image

from ..errors import BackendError, FixtureMissError, ValidationError
from ..geometry import Box
from ..imagestore import ImageStore
from .base import Backends, Detection, FeatureBundle


def _box_key(b: Box) -> list[float]:
    return [float(b.x_min), float(b.y_min), float(b.x_max), float(b.y_max)]


def inpaint_key(background_ref: str, prompt: str, mask: Box, seed: int) -> str:
    return json.dumps(["inpaint", background_ref, prompt, _box_key(mask), seed])


def detect_key(image_ref: str, target_class: str) -> str:
    return json.dumps(["detect", image_ref, target_class])


def aesthetic_key(image_ref: str) -> str:
    return json.dumps(["aesthetic", image_ref])


def caption_key(image_ref: str, prompt: str) -> str:
    return json.dumps(["caption", image_ref, prompt])


def embed_key(text: str) -> str:
    return json.dumps(["embed", text])


def features_key(image_ref: str, crop: Box) -> str:
    return json.dumps(["features", image_ref, _box_key(crop)])


def _digest(*parts) -> int:
    payload = json.dumps([str(p) for p in parts]).encode()
    return int.from_bytes(hashlib.sha256(payload).digest()[:8], "big")


def _check_mask_in_bounds(store: ImageStore, image_ref: str, box: Box, what: str):
    dims = store.dims(image_ref)
    if box.x_min < 0 or box.y_min < 0 or box.x_max > dims.width or box.y_max > dims.height:
        raise ValidationError(f"{what} {box.to_list()} outside image bounds {dims}")


class ScriptedBackends(Backends):
    """Replays a fixture map from request key to response.

    Fixture layout (all sections optional)::

        {
          "inpaint":  {key: "image-id" | {"__error__": "msg"}},
          "detect":   {key: [{"label": ..., "confidence": ..., "box": [..]}]},
          "aesthetic": {key: 6.2},
          "caption":  {key: "a dog in an elevator"},
          "embed":    {key: [..]},
          "features": {key: {"global": [..], "spatial": [..]}}
        }

    Unknown keys raise `FixtureMissError`; a scripted mock never invents
    a response.
    """

    def __init__(self, fixtures: dict, store: ImageStore | None = None):
        self.fixtures = fixtures
        self.store = store

    def identifier(self) -> str:
        return "mock-scripted"

    def _lookup(self, section: str, key: str):
        table = self.fixtures.get(section, {})
        if key not in table:
            raise FixtureMissError(f"no fixture for {section} request {key}")
        value = table[key]
        if isinstance(value, dict) and "__error__" in value:
            raise BackendError(value["__error__"])
        return value

    def inpaint(self, background_ref: str, prompt: str, mask: Box, seed: int) -> str:
        if self.store is not None and background_ref not in self.store:
            raise ValidationError(f"unknown background: {background_ref!r}")
        if self.store is not None:
            _check_mask_in_bounds(self.store, background_ref, mask, "mask")
        image_id = self._lookup("inpaint", inpaint_key(background_ref, prompt, mask, seed))
        if self.store is not None and image_id not in self.store:
            # Materialize a placeholder with the background's dims so the
            # dimension-preservation contract holds for downstream code.
            self.store.put_image(image_id, self.store.open(background_ref))
        return image_id

    def detect(self, image_ref: str, target_class: str) -> list[Detection]:
        raw = self._lookup("detect", detect_key(image_ref, target_class))
        dets = [
            Detection(d["label"], float(d["confidence"]), Box.from_list(d["box"]))
            for d in raw
        ]
        return sorted(dets, key=lambda d: -d.confidence)

    def aesthetic_score(self, image_ref: str) -> float:
        return float(self._lookup("aesthetic", aesthetic_key(image_ref)))

    def caption(self, image_ref: str, prompt: str) -> str:
        text = self._lookup("caption", caption_key(image_ref, prompt))
        if not text:
            raise BackendError("backend returned an empty caption")
        return text

    def embed_text(self, text: str) -> np.ndarray:
        if not text:
            raise ValidationError("cannot embed empty text")
        return np.asarray(self._lookup("embed", embed_key(text)), dtype=np.float64)

    def extract_features(self, image_ref: str, crop: Box) -> FeatureBundle:
        if self.store is not None:
            _check_mask_in_bounds(self.store, image_ref, crop, "crop")
        raw = self._lookup("features", features_key(image_ref, crop))
        return FeatureBundle(
            global_features=np.asarray(raw["global"], dtype=np.float64),
            spatial_features=np.asarray(raw["spatial"], dtype=np.float64),
            source_tags=("mock-global", "mock-spatial"),
        )


class HashBackends(Backends):
    """Every response is a pure function of (request, seed).

    Tuned so a realistic fraction of candidates survives each Stage-1
    gate: detections usually land near the inpainting mask with a jitter
    that sometimes drops IoU below threshold, aesthetics spans the 3-10
    band, and captions echo the prompt at `alignment_rate`.
    """

    def __init__(
        self,
        store: ImageStore,
        seed: int = 0,
        embed_dim: int = 64,
        feature_dims: tuple[int, int] = (32, 32),
        detect_miss_rate: float = 0.1,
        alignment_rate: float = 0.7,
    ):
        self.store = store
        self.seed = seed
        self.embed_dim = embed_dim
        self.feature_dims = feature_dims
        self.detect_miss_rate = detect_miss_rate
        self.alignment_rate = alignment_rate
        self._masks: dict[str, Box] = {}

    def identifier(self) -> str:
        return f"mock-hash-{self.seed}"

    def inpaint(self, background_ref: str, prompt: str, mask: Box, seed: int) -> str:
        if background_ref not in self.store:
            raise ValidationError(f"unknown background: {background_ref!r}")
        _check_mask_in_bounds(self.store, background_ref, mask, "mask")
        h = _digest("inpaint", self.seed, background_ref, prompt, _box_key(mask), seed)
        image_id = f"gen-{h:016x}"
        if image_id not in self.store:
            im = self.store.open(background_ref)
            rng = np.random.default_rng(h)
            x0, y0 = int(mask.x_min), int(mask.y_min)
            x1 = max(x0 + 1, int(mask.x_max))
            y1 = max(y0 + 1, int(mask.y_max))
            patch = rng.integers(0, 256, size=(y1 - y0, x1 - x0, 3), dtype=np.uint8)
            im.paste(Image.fromarray(patch, "RGB"), (x0, y0))
            self.store.put_image(image_id, im)
        self._masks[image_id] = mask
        return image_id

    def _jittered_box(self, image_ref: str, h: int) -> Box:
        dims = self.store.dims(image_ref)
        base = self._masks.get(image_ref)
        rng = np.random.default_rng(h)
        if base is None:
            # No known inpainting mask (plain background); invent a box.
            w = dims.width * rng.uniform(0.2, 0.6)
            ht = dims.height * rng.uniform(0.2, 0.6)
            x0 = rng.uniform(0, dims.width - w)
            y0 = rng.uniform(0, dims.height - ht)
            base = Box(x0, y0, x0 + w, y0 + ht)
        jx = rng.uniform(-0.12, 0.12) * base.width
        jy = rng.uniform(-0.12, 0.12) * base.height
        return Box(
            max(0.0, base.x_min + jx),
            max(0.0, base.y_min + jy),
            min(float(dims.width), base.x_max + jx),
            min(float(dims.height), base.y_max + jy),
        )

    def detect(self, image_ref: str, target_class: str) -> list[Detection]:
        if image_ref not in self.store:
            raise ValidationError(f"unknown image: {image_ref!r}")
        h = _digest("detect", self.seed, image_ref, target_class)
        if (h % 10_000) / 10_000 < self.detect_miss_rate:
            return []
        confidence = 0.6 + ((h >> 16) % 4000) / 10_000
        return [Detection(target_class, confidence, self._jittered_box(image_ref, h))]

    def aesthetic_score(self, image_ref: str) -> float:
        h = _digest("aesthetic", self.seed, image_ref)
        return 3.0 + (h % 7000) / 1000

    def caption(self, image_ref: str, prompt: str) -> str:
        if not prompt:
            raise ValidationError("caption requires the generation prompt")
        h = _digest("caption", self.seed, image_ref, prompt)
        if (h % 10_000) / 10_000 < self.alignment_rate:
            return prompt
        return "an empty scene with no clear subject"

    def embed_text(self, text: str) -> np.ndarray:
        if not text:
            raise ValidationError("cannot embed empty text")
        rng = np.random.default_rng(_digest("embed", self.seed, text))
        return rng.standard_normal(self.embed_dim)

    def extract_features(self, image_ref: str, crop: Box) -> FeatureBundle:
        _check_mask_in_bounds(self.store, image_ref, crop, "crop")
        rng = np.random.default_rng(_digest("features", self.seed, image_ref, _box_key(crop)))
        return FeatureBundle(
            global_features=rng.standard_normal(self.feature_dims[0]),
            spatial_features=rng.standard_normal(self.feature_dims[1]),
            source_tags=("mock-global", "mock-spatial"),
        )
