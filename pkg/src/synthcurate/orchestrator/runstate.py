"""Persistent per-run state.

A run directory holds::

    config.json     config snapshot taken at ingest
    images/         ImageStore (backgrounds + generated candidates)
    records.jsonl   append-only candidate records; last record per id wins
    labels.jsonl    annotation label log (see annotation.store)
    checkpoint.json trained preference model
    train_report.json
    manifest.json   final curated manifest

Candidate records are appended as work completes, so an interrupted run
resumes without re-paying finished backend calls.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from ..errors import ValidationError
from ..geometry import Box
from ..imagestore import ImageStore
from ..stage1 import GateDecision, ScoreCard
from .config import PipelineConfig

STATES = ("generated", "stage1_failed", "stage1_passed", "annotated", "accepted", "rejected")

# Forward-only lifecycle; a state may only move to one listed here.
_TRANSITIONS = {
    "generated": {"stage1_failed", "stage1_passed"},
    "stage1_failed": set(),
    "stage1_passed": {"annotated", "accepted", "rejected"},
    "annotated": {"accepted", "rejected"},
    "accepted": set(),
    "rejected": set(),
}


@dataclass
class CandidateRecord:
    candidate_id: str
    background_id: str
    mask: Box
    seed: int
    image_ref: str | None = None
    score_card: ScoreCard | None = None
    gate_decision: GateDecision | None = None
    annotation_summary: dict | None = None
    classifier_probability: float | None = None
    final_state: str = "generated"
    failure_reason: str | None = None
    backend_id: str | None = None

    def advance(self, new_state: str):
        if new_state not in STATES:
            raise ValidationError(f"unknown candidate state {new_state!r}")
        if new_state != self.final_state and new_state not in _TRANSITIONS[self.final_state]:
            raise ValidationError(
                f"illegal transition {self.final_state} -> {new_state} for {self.candidate_id}"
            )
        self.final_state = new_state

    def to_dict(self) -> dict:
        return {
            "candidate_id": self.candidate_id,
            "background_id": self.background_id,
            "mask": self.mask.to_list(),
            "seed": self.seed,
            "image_ref": self.image_ref,
            "score_card": self.score_card.to_dict() if self.score_card else None,
            "gate_decision": self.gate_decision.to_dict() if self.gate_decision else None,
            "annotation_summary": self.annotation_summary,
            "classifier_probability": self.classifier_probability,
            "final_state": self.final_state,
            "failure_reason": self.failure_reason,
            "backend_id": self.backend_id,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "CandidateRecord":
        return cls(
            candidate_id=d["candidate_id"],
            background_id=d["background_id"],
            mask=Box.from_list(d["mask"]),
            seed=d["seed"],
            image_ref=d.get("image_ref"),
            score_card=ScoreCard.from_dict(d["score_card"]) if d.get("score_card") else None,
            gate_decision=(
                GateDecision.from_dict(d["gate_decision"]) if d.get("gate_decision") else None
            ),
            annotation_summary=d.get("annotation_summary"),
            classifier_probability=d.get("classifier_probability"),
            final_state=d.get("final_state", "generated"),
            failure_reason=d.get("failure_reason"),
            backend_id=d.get("backend_id"),
        )


class RunState:
    def __init__(self, run_dir: str | Path, config: PipelineConfig | None = None):
        self.run_dir = Path(run_dir)
        self.run_dir.mkdir(parents=True, exist_ok=True)
        self.config_path = self.run_dir / "config.json"
        if config is not None:
            config.save(self.config_path)
            self.config = config
        elif self.config_path.exists():
            self.config = PipelineConfig.load(self.config_path)
        else:
            raise ValidationError(f"no config at {self.config_path}")
        self.images = ImageStore(self.run_dir / "images")
        self.records_path = self.run_dir / "records.jsonl"
        self.labels_path = self.run_dir / "labels.jsonl"
        self.checkpoint_path = self.run_dir / "checkpoint.json"
        self.train_report_path = self.run_dir / "train_report.json"
        self.manifest_path = self.run_dir / "manifest.json"
        self.records: dict[str, CandidateRecord] = {}
        if self.records_path.exists():
            for line in self.records_path.read_text().splitlines():
                if line.strip():
                    rec = CandidateRecord.from_dict(json.loads(line))
                    self.records[rec.candidate_id] = rec

    @classmethod
    def open(cls, run_dir: str | Path) -> "RunState":
        return cls(run_dir)

    def persist(self, record: CandidateRecord):
        """Append the record's current snapshot; the latest line wins on load."""
        self.records[record.candidate_id] = record
        with open(self.records_path, "a") as fh:
            fh.write(json.dumps(record.to_dict()) + "\n")

    def sorted_records(self) -> list[CandidateRecord]:
        return [self.records[cid] for cid in sorted(self.records)]

    def in_state(self, *states: str) -> list[CandidateRecord]:
        return [r for r in self.sorted_records() if r.final_state in states]

    def stage_stats(self) -> dict:
        """Cumulative per-stage tallies; "generated" counts every candidate."""
        past_stage1 = ("stage1_passed", "annotated", "accepted", "rejected")
        recs = list(self.records.values())
        return {
            "generated": len(recs),
            "stage1_failed": sum(r.final_state == "stage1_failed" for r in recs),
            "stage1_passed": sum(r.final_state in past_stage1 for r in recs),
            "annotated": sum(r.annotation_summary is not None for r in recs),
            "accepted": sum(r.final_state == "accepted" for r in recs),
            "rejected": sum(r.final_state == "rejected" for r in recs),
        }
