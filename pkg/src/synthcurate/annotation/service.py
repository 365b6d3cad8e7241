"""HTTP API for the Stage-2 annotation queue.

Serves the Stage-1 pass set to annotators, persists accept/reject labels
durably before acknowledging them, and exports resolved labels for
training. CORS is open so the browser UI can run from another origin.
"""

from __future__ import annotations

from threading import Lock

from fastapi import FastAPI, HTTPException, Query
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import Response
from pydantic import BaseModel

from ..errors import ValidationError
from ..orchestrator.runstate import RunState
from .store import EmptyExportError, LabelStore


class LabelSubmission(BaseModel):
    candidate_id: str
    label: str
    annotator_id: str


def create_annotation_app(state: RunState) -> FastAPI:
    app = FastAPI(title="synthcurate annotation service")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    store = LabelStore(state.labels_path)
    write_lock = Lock()  # serializes appends to keep log order deterministic
    run_id = state.config.run_id

    def check_run(rid: str):
        if rid != run_id:
            raise HTTPException(status_code=404, detail=f"unknown run {rid!r}")

    def queue_records():
        return state.in_state("stage1_passed", "annotated")

    @app.get("/api/v1/runs/{rid}/queue")
    def queue(rid: str, annotator: str = Query(...), count: int = Query(10, ge=1)):
        check_run(rid)
        done = store.labeled_candidates(annotator)
        items = []
        for rec in queue_records():  # sorted_records gives stable oldest-first order
            if rec.candidate_id in done:
                continue
            items.append(
                {
                    "candidate_id": rec.candidate_id,
                    "image_url": f"/api/v1/images/{rec.image_ref}",
                    "score_card": rec.score_card.to_dict() if rec.score_card else None,
                    "mask": rec.mask.to_list(),
                }
            )
            if len(items) >= count:
                break
        return {"items": items}

    @app.get("/api/v1/images/{image_id}")
    def image(image_id: str):
        if image_id not in state.images:
            raise HTTPException(status_code=404, detail=f"unknown image {image_id!r}")
        return Response(content=state.images.get_bytes(image_id), media_type="image/png")

    @app.post("/api/v1/runs/{rid}/labels")
    def submit(rid: str, body: LabelSubmission):
        check_run(rid)
        rec = state.records.get(body.candidate_id)
        if rec is None:
            raise HTTPException(status_code=404, detail=f"unknown candidate {body.candidate_id!r}")
        if rec.final_state not in ("stage1_passed", "annotated"):
            raise HTTPException(
                status_code=409,
                detail=f"candidate {body.candidate_id} is {rec.final_state}, not annotatable",
            )
        try:
            with write_lock:
                record = store.submit(body.candidate_id, body.label, body.annotator_id)
        except ValidationError as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        return record.to_dict()

    @app.get("/api/v1/runs/{rid}/progress")
    def progress(rid: str, annotator: str | None = Query(None)):
        check_run(rid)
        total = len(queue_records())
        labeled_ids = store.labeled_candidates(annotator)
        labeled = sum(1 for rec in queue_records() if rec.candidate_id in labeled_ids)
        return {"pending": total - labeled, "labeled": labeled, "total": total}

    @app.get("/api/v1/runs/{rid}/export")
    def export(rid: str, resolution: str = Query("majority")):
        check_run(rid)
        try:
            labels, ties = store.export(resolution)
        except EmptyExportError as exc:
            raise HTTPException(status_code=409, detail=str(exc))
        except ValidationError as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        return {"labels": labels, "ties": ties}

    return app
