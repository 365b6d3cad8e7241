"""Stage-1 scoring and threshold gating.

Each generated candidate gets a ScoreCard holding all four measurements
(detection confidence, mask IoU, aesthetics, caption-prompt alignment);
`apply_gates` turns a card into a pass/fail decision under strict-greater
thresholds. Every gate is evaluated even after one fails, so the manifest
carries full diagnostics for failure analysis.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .embedding import cosine_similarity
from .errors import SynthcurateError
from .geometry import Box, iou

GATE_NAMES = ("s_det", "iou_mask", "s_aes", "s_vlm")


@dataclass
class ScoreCard:
    """All Stage-1 measurements for one candidate.

    `b_det` and `iou_mask` are absent when the detector found nothing.
    An incomplete card (a backend failed mid-scoring) records which
    component failed and never passes gating.
    """

    s_det: float | None = None
    b_det: Box | None = None
    iou_mask: float | None = None
    s_aes: float | None = None
    caption: str | None = None
    s_vlm: float | None = None
    incomplete: bool = False
    failed_component: str | None = None

    def to_dict(self) -> dict:
        return {
            "s_det": self.s_det,
            "b_det": self.b_det.to_list() if self.b_det else None,
            "iou_mask": self.iou_mask,
            "s_aes": self.s_aes,
            "caption": self.caption,
            "s_vlm": self.s_vlm,
            "incomplete": self.incomplete,
            "failed_component": self.failed_component,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ScoreCard":
        return cls(
            s_det=d.get("s_det"),
            b_det=Box.from_list(d["b_det"]) if d.get("b_det") else None,
            iou_mask=d.get("iou_mask"),
            s_aes=d.get("s_aes"),
            caption=d.get("caption"),
            s_vlm=d.get("s_vlm"),
            incomplete=d.get("incomplete", False),
            failed_component=d.get("failed_component"),
        )


@dataclass(frozen=True)
class GateThresholds:
    """Strict-greater thresholds for the four Stage-1 gates.

    Defaults follow the dog-in-elevator case study; all are adjustable
    per run and may vary with the choice of pre-trained models.
    """

    min_s_det: float = 0.8
    min_s_aes: float = 5.0
    min_iou: float = 0.8
    min_s_vlm: float = 0.8

    def to_dict(self) -> dict:
        return {
            "min_s_det": self.min_s_det,
            "min_s_aes": self.min_s_aes,
            "min_iou": self.min_iou,
            "min_s_vlm": self.min_s_vlm,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "GateThresholds":
        return cls(**d)


@dataclass
class GateDecision:
    passed: bool
    per_gate: dict[str, dict] = field(default_factory=dict)
    failure_reasons: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "per_gate": self.per_gate,
            "failure_reasons": self.failure_reasons,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "GateDecision":
        return cls(
            passed=d["passed"],
            per_gate=d.get("per_gate", {}),
            failure_reasons=d.get("failure_reasons", []),
        )


def score_candidate(image_ref: str, backends, target_class: str, prompt: str, mask: Box) -> ScoreCard:
    """Run all four Stage-1 measurements on one generated image.

    Backend failures do not raise: the card comes back marked incomplete
    with the failing component named, and gating rejects it.
    """
    card = ScoreCard()
    component = "detect"
    try:
        detections = [d for d in backends.detect(image_ref, target_class) if d.class_label == target_class]
        if detections:
            best = detections[0]  # sorted by descending confidence
            card.s_det = best.confidence
            card.b_det = best.box
            card.iou_mask = iou(best.box, mask)
        component = "aesthetic"
        card.s_aes = backends.aesthetic_score(image_ref)
        component = "caption"
        card.caption = backends.caption(image_ref, prompt)
        component = "embed"
        card.s_vlm = cosine_similarity(
            backends.embed_text(card.caption), backends.embed_text(prompt)
        )
    except SynthcurateError:
        card.incomplete = True
        card.failed_component = component
    return card


def apply_gates(card: ScoreCard, thresholds: GateThresholds) -> GateDecision:
    """Strict-greater comparison per gate; pass requires all four.

    A card with no detection fails the detection gate and skips-as-failed
    the three others that depend on it being meaningful; an incomplete
    card fails outright with reason "incomplete".
    """
    if card.incomplete:
        return GateDecision(
            passed=False,
            failure_reasons=[f"incomplete: backend '{card.failed_component}' failed"],
        )

    per_gate = {}
    reasons = []

    def gate(name: str, value, threshold: float):
        ok = value is not None and value > threshold
        per_gate[name] = {"value": value, "threshold": threshold, "passed": ok}
        if not ok:
            reasons.append(
                f"{name}={value} not > {threshold}" if value is not None else f"{name} absent"
            )

    gate("s_det", card.s_det, thresholds.min_s_det)
    gate("iou_mask", card.iou_mask, thresholds.min_iou)
    gate("s_aes", card.s_aes, thresholds.min_s_aes)
    gate("s_vlm", card.s_vlm, thresholds.min_s_vlm)

    return GateDecision(
        passed=all(g["passed"] for g in per_gate.values()),
        per_gate=per_gate,
        failure_reasons=reasons,
    )
