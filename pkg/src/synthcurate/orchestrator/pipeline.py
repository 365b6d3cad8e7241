"""The three pipeline stages and manifest emission.

Stage 1 generates and gates candidates, persisting each as it completes
so interrupted runs resume without regenerating finished work. Stage 2
turns exported human labels into training examples and fits the
preference classifier. Stage 3 scores every surviving candidate with the
trained classifier and finalizes the manifest; it needs no further
annotation.
"""

from __future__ import annotations

import hashlib
import json

import numpy as np
from concurrent.futures import ThreadPoolExecutor
from datetime import datetime, timezone
from pathlib import Path
from threading import Lock

from ..annotation.store import LabelStore
from ..backends import Backends, HashBackends, HttpBackends, BackendEndpoint
from ..classifier import (
    LabeledExample,
    PreferenceModel,
    TrainConfig,
    forward,
    load_checkpoint,
    save_checkpoint,
    train,
)
from ..errors import ConfigError, ManifestFormatError, SynthcurateError, ValidationError
from ..geometry import expand_and_crop, sample_mask_box
from ..metrics import ACCEPT, REJECT
from ..stage1 import apply_gates, score_candidate
from .config import PipelineConfig
from .runstate import CandidateRecord, RunState

MANIFEST_SCHEMA_VERSION = 1


def candidate_seed(run_id: str, background_id: str, index: int) -> int:
    """Stable per-candidate seed so regeneration is reproducible and resumable."""
    payload = f"{run_id}/{background_id}/{index}".encode()
    return int.from_bytes(hashlib.sha256(payload).digest()[:8], "big")


def make_backends(cfg: PipelineConfig, state: RunState) -> Backends:
    if cfg.backend == "mock-hash":
        return HashBackends(
            state.images,
            seed=cfg.backend_seed,
            embed_dim=cfg.embed_dim,
            feature_dims=cfg.feature_dims,
        )
    if cfg.backend == "http":
        if not cfg.backend_url:
            raise ConfigError("backend 'http' requires backend_url")
        return HttpBackends(BackendEndpoint(base_url=cfg.backend_url))
    raise ConfigError(f"unknown backend {cfg.backend!r}")


def ingest(cfg: PipelineConfig, run_dir: str | Path) -> RunState:
    """Create the run directory and register all background images."""
    background_dir = Path(cfg.background_dir)
    sources = sorted(
        p for p in background_dir.glob("*") if p.suffix.lower() in (".png", ".jpg", ".jpeg")
    )
    if not sources:
        raise ConfigError(f"no background images in {background_dir}")
    state = RunState(run_dir, config=cfg)
    for src in sources:
        image_id = f"bg-{src.stem}"
        if image_id not in state.images:
            state.images.add_file(src, image_id=image_id)
    return state


def _process_candidate(state: RunState, backends: Backends, rec: CandidateRecord):
    cfg = state.config
    try:
        rec.image_ref = backends.inpaint(rec.background_id, cfg.prompt, rec.mask, rec.seed)
    except SynthcurateError as exc:
        rec.failure_reason = f"generation: {exc}"
        rec.advance("stage1_failed")
        return rec
    rec.backend_id = backends.identifier()
    rec.score_card = score_candidate(
        rec.image_ref, backends, cfg.target_class, cfg.prompt, rec.mask
    )
    rec.gate_decision = apply_gates(rec.score_card, cfg.gate_thresholds)
    rec.advance("stage1_passed" if rec.gate_decision.passed else "stage1_failed")
    return rec


def run_stage1(state: RunState, backends: Backends | None = None) -> dict:
    """Generate, score, and gate candidates for every background.

    Already-persisted candidates are skipped, so a killed run resumes
    cleanly. Returns the stage statistics.
    """
    cfg = state.config
    backends = backends or make_backends(cfg, state)
    backgrounds = [i for i in state.images.ids() if i.startswith("bg-")]
    if not backgrounds:
        raise ConfigError("run has no ingested backgrounds")

    todo = []
    for bg in backgrounds:
        for index in range(cfg.candidates_per_background):
            cid = f"{bg}-c{index:04d}"
            if cid in state.records and state.records[cid].final_state != "generated":
                continue  # already completed; resume skips it
            seed = candidate_seed(cfg.run_id, bg, index)
            mask = sample_mask_box(cfg.roi_spec, seed)
            todo.append(CandidateRecord(candidate_id=cid, background_id=bg, mask=mask, seed=seed))

    write_lock = Lock()

    def work(rec: CandidateRecord):
        _process_candidate(state, backends, rec)
        with write_lock:  # single-writer funnel for run-state mutation
            state.persist(rec)

    if cfg.concurrency > 1:
        with ThreadPoolExecutor(max_workers=cfg.concurrency) as pool:
            list(pool.map(work, todo))
    else:
        for rec in todo:
            work(rec)
    return state.stage_stats()


def _crop_for(rec: CandidateRecord, state: RunState):
    """Classifier crop: the detected box when present, else the sampled mask."""
    base = rec.mask
    if rec.score_card is not None and rec.score_card.b_det is not None:
        base = rec.score_card.b_det
    dims = state.images.dims(rec.image_ref)
    return expand_and_crop(base, state.config.expand_ratio, dims)


def _examples_from_labels(
    state: RunState, backends: Backends, labels: list[dict]
) -> list[LabeledExample]:
    examples = []
    for entry in labels:
        rec = state.records.get(entry["candidate_id"])
        if rec is None or rec.image_ref is None:
            continue
        crop = _crop_for(rec, state)
        bundle = backends.extract_features(rec.image_ref, crop)
        examples.append(
            LabeledExample(features=bundle, label=entry["label"], candidate_id=rec.candidate_id)
        )
    return examples


def run_stage2(
    state: RunState,
    backends: Backends | None = None,
    resolution: str | None = None,
) -> tuple[PreferenceModel, dict]:
    """Export labels, extract features, and train the preference classifier."""
    cfg = state.config
    backends = backends or make_backends(cfg, state)
    store = LabelStore(state.labels_path)
    labels, ties = store.export(resolution or cfg.label_resolution)
    examples = _examples_from_labels(state, backends, labels)
    present = {ex.label for ex in examples}
    if len(present) < 2:
        progress = f"{len(store.labeled_candidates())} candidates labeled"
        raise ValidationError(
            f"training needs both accept and reject labels (have {sorted(present)}; {progress})"
        )

    model, report = train(examples, cfg.train_config)
    save_checkpoint(model, cfg.train_config, state.checkpoint_path)
    report_dict = report.to_dict()
    report_dict["label_ties_excluded"] = ties
    state.train_report_path.write_text(json.dumps(report_dict, indent=2))

    by_candidate = {entry["candidate_id"]: entry for entry in labels}
    for rec in state.in_state("stage1_passed"):
        if rec.candidate_id in by_candidate:
            entry = by_candidate[rec.candidate_id]
            rec.annotation_summary = {
                "label": entry["label"],
                "votes": entry.get("votes"),
            }
            rec.advance("annotated")
            state.persist(rec)
    return model, report_dict


def run_stage3(
    state: RunState,
    backends: Backends | None = None,
    model: PreferenceModel | None = None,
    decision_threshold: float | None = None,
) -> dict:
    """Score every Stage-1 survivor with the trained classifier and finalize."""
    cfg = state.config
    backends = backends or make_backends(cfg, state)
    if model is None:
        if not state.checkpoint_path.exists():
            raise ValidationError(f"no trained model at {state.checkpoint_path}")
        model, _ = load_checkpoint(state.checkpoint_path)
    threshold = cfg.decision_threshold if decision_threshold is None else decision_threshold

    for rec in state.in_state("stage1_passed", "annotated"):
        try:
            bundle = backends.extract_features(rec.image_ref, _crop_for(rec, state))
        except SynthcurateError:
            rec.failure_reason = "features-unavailable"
            rec.advance("rejected")
            state.persist(rec)
            continue
        rec.classifier_probability = forward(model, bundle)
        rec.advance("accepted" if rec.classifier_probability > threshold else "rejected")
        state.persist(rec)
    return write_manifest(state, decision_threshold=threshold)


def auto_label(
    state: RunState,
    backends: Backends | None = None,
    num_annotators: int = 1,
    seed: int = 0,
    flip_rate: float = 0.1,
) -> int:
    """Deterministic stand-in annotator for mock and dry runs.

    Labels each Stage-1 survivor by a simple feature rule (accept when the
    mean global feature is positive) so the preference classifier has a
    learnable signal; extra annotators disagree at `flip_rate` via a
    seeded hash. Returns the number of labels written.
    """
    cfg = state.config
    backends = backends or make_backends(cfg, state)
    store = LabelStore(state.labels_path)
    written = 0
    for rec in state.in_state("stage1_passed"):
        bundle = backends.extract_features(rec.image_ref, _crop_for(rec, state))
        base = ACCEPT if float(np.mean(bundle.global_features)) > 0 else REJECT
        for a in range(num_annotators):
            label = base
            if a > 0:
                h = int.from_bytes(
                    hashlib.sha256(f"{seed}/{rec.candidate_id}/{a}".encode()).digest()[:4], "big"
                )
                if h % 10_000 < flip_rate * 10_000:
                    label = REJECT if base == ACCEPT else ACCEPT
            store.submit(rec.candidate_id, label, f"auto-{a}", now="1970-01-01T00:00:00+00:00")
            written += 1
    return written


def run_all(state: RunState, backends: Backends | None = None) -> dict:
    """Stage 1 through 3 in one go, auto-labeling when no labels exist yet."""
    backends = backends or make_backends(state.config, state)
    run_stage1(state, backends)
    if not state.labels_path.exists():
        auto_label(state, backends, seed=state.config.master_seed)
    model, _ = run_stage2(state, backends)
    return run_stage3(state, backends, model=model)


def write_manifest(state: RunState, decision_threshold: float | None = None) -> dict:
    """Schema-versioned JSON manifest of every candidate and all statistics."""
    manifest = {
        "schema_version": MANIFEST_SCHEMA_VERSION,
        "run_id": state.config.run_id,
        "created_at": datetime.now(timezone.utc).isoformat(),
        "config": state.config.to_dict(),
        "decision_threshold": (
            state.config.decision_threshold if decision_threshold is None else decision_threshold
        ),
        "statistics": state.stage_stats(),
        "candidates": [rec.to_dict() for rec in state.sorted_records()],
    }
    try:
        state.manifest_path.write_text(json.dumps(manifest, indent=2, sort_keys=True))
    except OSError as exc:
        raise SynthcurateError(f"cannot write manifest {state.manifest_path}: {exc}") from exc
    return manifest


def load_manifest(path: str | Path) -> dict:
    try:
        manifest = json.loads(Path(path).read_text())
    except OSError as exc:
        raise SynthcurateError(f"cannot read manifest {path}: {exc}") from exc
    if manifest.get("schema_version") != MANIFEST_SCHEMA_VERSION:
        raise ManifestFormatError(
            f"unsupported manifest schema_version {manifest.get('schema_version')!r}"
        )
    return manifest


def manifest_summary(manifest: dict) -> str:
    """Human-readable per-stage count table."""
    stats = manifest["statistics"]
    lines = [
        f"run {manifest['run_id']}  (schema v{manifest['schema_version']})",
        "",
        f"{'stage':<16}{'count':>8}",
    ]
    for key in ("generated", "stage1_failed", "stage1_passed", "annotated", "accepted", "rejected"):
        lines.append(f"{key:<16}{stats.get(key, 0):>8}")
    return "\n".join(lines)
