"""Durable label storage: append-only JSONL log with a compacted view.

Every acknowledged label is flushed and fsynced to the log before the
caller sees a response, so labels survive a forced restart. The current
state keeps one label per (candidate, annotator); resubmission
overwrites with the newer label, and the log retains full history.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

from ..errors import SynthcurateError, ValidationError
from ..metrics import ACCEPT, REJECT


class EmptyExportError(SynthcurateError):
    """Export requested before any labels exist."""


@dataclass(frozen=True)
class AnnotationRecord:
    candidate_id: str
    label: str
    annotator_id: str
    annotated_at: str  # ISO-8601 UTC

    def to_dict(self) -> dict:
        return {
            "candidate_id": self.candidate_id,
            "label": self.label,
            "annotator_id": self.annotator_id,
            "annotated_at": self.annotated_at,
        }


@dataclass(frozen=True)
class QueueState:
    pending: int
    labeled: int

    @property
    def total(self) -> int:
        return self.pending + self.labeled


class LabelStore:
    def __init__(self, log_path: str | Path):
        self.log_path = Path(log_path)
        self._current: dict[tuple[str, str], AnnotationRecord] = {}
        if self.log_path.exists():
            for line in self.log_path.read_text().splitlines():
                if not line.strip():
                    continue
                d = json.loads(line)
                rec = AnnotationRecord(**d)
                self._current[(rec.candidate_id, rec.annotator_id)] = rec

    def submit(
        self, candidate_id: str, label: str, annotator_id: str, now: str | None = None
    ) -> AnnotationRecord:
        if label not in (ACCEPT, REJECT):
            raise ValidationError(f"label must be accept/reject, got {label!r}")
        if not annotator_id:
            raise ValidationError("annotator_id must be non-empty")
        rec = AnnotationRecord(
            candidate_id=candidate_id,
            label=label,
            annotator_id=annotator_id,
            annotated_at=now or datetime.now(timezone.utc).isoformat(),
        )
        self.log_path.parent.mkdir(parents=True, exist_ok=True)
        with open(self.log_path, "a") as fh:
            fh.write(json.dumps(rec.to_dict()) + "\n")
            fh.flush()
            os.fsync(fh.fileno())
        self._current[(candidate_id, annotator_id)] = rec
        return rec

    def records(self) -> list[AnnotationRecord]:
        """Current labels (one per candidate/annotator pair), sorted for determinism."""
        return sorted(
            self._current.values(), key=lambda r: (r.candidate_id, r.annotator_id)
        )

    def labels_for(self, candidate_id: str) -> list[AnnotationRecord]:
        return [r for r in self.records() if r.candidate_id == candidate_id]

    def labeled_candidates(self, annotator_id: str | None = None) -> set[str]:
        if annotator_id is None:
            return {cid for cid, _ in self._current}
        return {cid for cid, aid in self._current if aid == annotator_id}

    def export(self, resolution: str = "majority") -> tuple[list[dict], list[str]]:
        """Resolve per-candidate labels for training.

        "majority" takes the majority vote per candidate; tied candidates
        are excluded and returned separately. "any" emits one entry per
        annotation record. Returns (labels, ties).
        """
        if resolution not in ("majority", "any"):
            raise ValidationError(f"unknown resolution {resolution!r}")
        records = self.records()
        if not records:
            raise EmptyExportError("no labels have been submitted")
        if resolution == "any":
            return [r.to_dict() for r in records], []
        votes: dict[str, list[AnnotationRecord]] = {}
        for r in records:
            votes.setdefault(r.candidate_id, []).append(r)
        resolved, ties = [], []
        for cid in sorted(votes):
            accepts = sum(1 for r in votes[cid] if r.label == ACCEPT)
            rejects = len(votes[cid]) - accepts
            if accepts == rejects:
                ties.append(cid)
            else:
                resolved.append(
                    {
                        "candidate_id": cid,
                        "label": ACCEPT if accepts > rejects else REJECT,
                        "votes": {"accept": accepts, "reject": rejects},
                    }
                )
        return resolved, ties
