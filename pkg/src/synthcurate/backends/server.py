"""Expose any Backends implementation over the /v1 wire protocol.

Lets the deterministic mocks stand in for real model servers during
integration tests and desk-scale runs.
"""

from __future__ import annotations

from fastapi import FastAPI
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from ..errors import BackendError, DomainError, ValidationError
from ..geometry import Box
from .base import Backends


class InpaintRequest(BaseModel):
    background_id: str
    prompt: str
    mask: list[float]
    seed: int


class DetectRequest(BaseModel):
    image_id: str
    target_class: str


class ImageRequest(BaseModel):
    image_id: str


class CaptionRequest(BaseModel):
    image_id: str
    prompt: str


class EmbedRequest(BaseModel):
    text: str


class FeaturesRequest(BaseModel):
    image_id: str
    crop: list[float]


def create_backend_server(backends: Backends) -> FastAPI:
    app = FastAPI(title="synthcurate model backend")

    @app.exception_handler(ValidationError)
    @app.exception_handler(DomainError)
    @app.exception_handler(BackendError)
    def _app_error(request, exc):
        return JSONResponse(status_code=400, content={"error": str(exc)})

    @app.post("/v1/inpaint")
    def inpaint(req: InpaintRequest):
        image_id = backends.inpaint(
            req.background_id, req.prompt, Box.from_list(req.mask), req.seed
        )
        return {"image_id": image_id}

    @app.post("/v1/detect")
    def detect(req: DetectRequest):
        dets = backends.detect(req.image_id, req.target_class)
        return {
            "detections": [
                {"label": d.class_label, "confidence": d.confidence, "box": d.box.to_list()}
                for d in dets
            ]
        }

    @app.post("/v1/aesthetic")
    def aesthetic(req: ImageRequest):
        return {"score": backends.aesthetic_score(req.image_id)}

    @app.post("/v1/caption")
    def caption(req: CaptionRequest):
        return {"caption": backends.caption(req.image_id, req.prompt)}

    @app.post("/v1/embed")
    def embed(req: EmbedRequest):
        return {"vector": backends.embed_text(req.text).tolist()}

    @app.post("/v1/features")
    def features(req: FeaturesRequest):
        bundle = backends.extract_features(req.image_id, Box.from_list(req.crop))
        return {
            "global": bundle.global_features.tolist(),
            "spatial": bundle.spatial_features.tolist(),
        }

    return app
