"""HTTP client for model services speaking the /v1 wire protocol.

4xx responses are application errors and are never retried; 5xx and
transport failures are retried up to the endpoint's retry_limit.
"""

from __future__ import annotations

import numpy as np
import httpx

from ..errors import BackendError, TransportError
from ..geometry import Box
from .base import BackendEndpoint, Backends, Detection, FeatureBundle


class HttpBackends(Backends):
    def __init__(self, endpoint: BackendEndpoint, client: httpx.Client | None = None):
        self.endpoint = endpoint
        self._client = client or httpx.Client(
            base_url=endpoint.base_url, timeout=endpoint.timeout
        )

    def identifier(self) -> str:
        return f"http:{self.endpoint.base_url}"

    def _post(self, path: str, payload: dict) -> dict:
        attempts = self.endpoint.retry_limit + 1
        last_exc = None
        for _ in range(attempts):
            try:
                resp = self._client.post(path, json=payload)
            except httpx.TransportError as exc:
                last_exc = exc
                continue
            if resp.status_code >= 500:
                last_exc = BackendError(f"{path} -> {resp.status_code}")
                continue
            if resp.status_code >= 400:
                raise BackendError(f"{path} -> {resp.status_code}: {resp.text}")
            return resp.json()
        raise TransportError(
            f"{path} failed after {attempts} attempts: {last_exc}", attempts=attempts
        )

    def inpaint(self, background_ref: str, prompt: str, mask: Box, seed: int) -> str:
        data = self._post(
            "/v1/inpaint",
            {
                "background_id": background_ref,
                "prompt": prompt,
                "mask": mask.to_list(),
                "seed": seed,
            },
        )
        return data["image_id"]

    def detect(self, image_ref: str, target_class: str) -> list[Detection]:
        data = self._post("/v1/detect", {"image_id": image_ref, "target_class": target_class})
        dets = [
            Detection(d["label"], float(d["confidence"]), Box.from_list(d["box"]))
            for d in data["detections"]
        ]
        return sorted(dets, key=lambda d: -d.confidence)

    def aesthetic_score(self, image_ref: str) -> float:
        return float(self._post("/v1/aesthetic", {"image_id": image_ref})["score"])

    def caption(self, image_ref: str, prompt: str) -> str:
        text = self._post("/v1/caption", {"image_id": image_ref, "prompt": prompt})["caption"]
        if not text:
            raise BackendError("backend returned an empty caption")
        return text

    def embed_text(self, text: str) -> np.ndarray:
        if not text:
            from ..errors import ValidationError

            raise ValidationError("cannot embed empty text")
        return np.asarray(self._post("/v1/embed", {"text": text})["vector"], dtype=np.float64)

    def extract_features(self, image_ref: str, crop: Box) -> FeatureBundle:
        data = self._post("/v1/features", {"image_id": image_ref, "crop": crop.to_list()})
        return FeatureBundle(
            global_features=np.asarray(data["global"], dtype=np.float64),
            spatial_features=np.asarray(data["spatial"], dtype=np.float64),
            source_tags=("http-global", "http-spatial"),
        )
