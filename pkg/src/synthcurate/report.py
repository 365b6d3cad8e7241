"""Run reports: a delimited score table plus rendered figures.

Reads a finished (or partially finished) run directory and writes
`scores.csv`, score-distribution and gate-pass-rate figures, and the
training curves when a train report exists.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from .orchestrator.runstate import RunState

_SCORE_FIELDS = (
    ("s_det", "min_s_det"),
    ("iou_mask", "min_iou"),
    ("s_aes", "min_s_aes"),
    ("s_vlm", "min_s_vlm"),
)


def write_scores_csv(state: RunState, path: Path) -> int:
    rows = 0
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            [
                "candidate_id",
                "background_id",
                "final_state",
                "s_det",
                "iou_mask",
                "s_aes",
                "s_vlm",
                "gate_passed",
                "classifier_probability",
            ]
        )
        for rec in state.sorted_records():
            card = rec.score_card
            writer.writerow(
                [
                    rec.candidate_id,
                    rec.background_id,
                    rec.final_state,
                    card.s_det if card else None,
                    card.iou_mask if card else None,
                    card.s_aes if card else None,
                    card.s_vlm if card else None,
                    rec.gate_decision.passed if rec.gate_decision else None,
                    rec.classifier_probability,
                ]
            )
            rows += 1
    return rows


def plot_score_distributions(state: RunState, path: Path):
    thresholds = state.config.gate_thresholds.to_dict()
    fig, axes = plt.subplots(2, 2, figsize=(10, 7))
    for ax, (field, tkey) in zip(axes.flat, _SCORE_FIELDS):
        values = [
            getattr(r.score_card, field)
            for r in state.sorted_records()
            if r.score_card and getattr(r.score_card, field) is not None
        ]
        if values:
            ax.hist(values, bins=30, color="steelblue", alpha=0.8)
        ax.axvline(thresholds[tkey], color="crimson", linestyle="--", label=f"> {thresholds[tkey]}")
        ax.set_title(field)
        ax.legend()
    fig.suptitle(f"Stage-1 score distributions ({state.config.run_id})")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def plot_gate_pass_rates(state: RunState, path: Path):
    gated = [r for r in state.sorted_records() if r.gate_decision and r.gate_decision.per_gate]
    names = ["s_det", "iou_mask", "s_aes", "s_vlm", "all"]
    rates = []
    for name in names[:-1]:
        passed = sum(1 for r in gated if r.gate_decision.per_gate[name]["passed"])
        rates.append(passed / len(gated) if gated else 0.0)
    rates.append(sum(1 for r in gated if r.gate_decision.passed) / len(gated) if gated else 0.0)
    fig, ax = plt.subplots(figsize=(7, 4))
    ax.bar(names, rates, color=["steelblue"] * 4 + ["seagreen"])
    ax.set_ylim(0, 1)
    ax.set_ylabel("pass rate")
    ax.set_title(f"Gate pass rates ({state.config.run_id}, n={len(gated)})")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def plot_training_curves(train_report: dict, path: Path):
    epochs = train_report["epochs"]
    xs = [e["epoch"] for e in epochs]
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(11, 4))
    ax1.plot(xs, [e["train_loss"] for e in epochs], label="train loss")
    ax1.set_xlabel("epoch")
    ax1.legend()
    ax2.plot(xs, [e["val_f1"] for e in epochs], label="val F1")
    ax2.plot(xs, [e["val_precision"] for e in epochs], label="val precision", alpha=0.6)
    ax2.plot(xs, [e["val_recall"] for e in epochs], label="val recall", alpha=0.6)
    ax2.axvline(train_report["best_epoch"], color="gray", linestyle=":", label="best epoch")
    ax2.set_xlabel("epoch")
    ax2.set_ylim(0, 1.05)
    ax2.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def generate_report(state: RunState, out_dir: str | Path | None = None) -> dict[str, Path]:
    """Write all report artifacts; returns a name -> path map."""
    out = Path(out_dir) if out_dir else state.run_dir / "report"
    out.mkdir(parents=True, exist_ok=True)
    artifacts = {"scores_csv": out / "scores.csv"}
    write_scores_csv(state, artifacts["scores_csv"])
    artifacts["score_distributions"] = out / "score_distributions.png"
    plot_score_distributions(state, artifacts["score_distributions"])
    artifacts["gate_pass_rates"] = out / "gate_pass_rates.png"
    plot_gate_pass_rates(state, artifacts["gate_pass_rates"])
    if state.train_report_path.exists():
        artifacts["training_curves"] = out / "training_curves.png"
        plot_training_curves(
            json.loads(state.train_report_path.read_text()), artifacts["training_curves"]
        )
    return artifacts
