"""Training loop: stratified split, mini-batch AdamW with warmup-cosine
schedule and gradient clipping, early stopping on validation F1, and
JSON checkpointing that round-trips parameters bit-exactly."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..errors import ManifestFormatError, ValidationError
from ..metrics import ACCEPT, REJECT, confusion, precision_recall_f1
from .model import (
    LabeledExample,
    ModelDims,
    PreferenceModel,
    forward_batch,
    init_model,
    loss_and_gradients,
)
from .optim import AdamWState, adamw_step, clip_global_norm, lr_at_step

CHECKPOINT_FORMAT = "synthcurate-checkpoint"
CHECKPOINT_VERSION = 1


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 2e-5
    weight_decay: float = 1e-4
    epochs: int = 50
    early_stop_patience: int = 10
    warmup_fraction: float = 0.10
    grad_clip_max_norm: float = 1.0
    batch_size: int = 32
    val_fraction: float = 0.20
    seed: int = 0
    decision_threshold: float = 0.5
    dropout_rate: float = 0.3

    def __post_init__(self):
        if self.learning_rate <= 0 or self.epochs < 1 or self.batch_size < 1:
            raise ValidationError("learning_rate, epochs, and batch_size must be positive")
        if self.weight_decay < 0 or self.grad_clip_max_norm <= 0 or self.early_stop_patience < 1:
            raise ValidationError("invalid weight_decay, grad clip, or patience")
        if not 0.0 < self.val_fraction < 1.0:
            raise ValidationError("val_fraction must be in (0, 1)")
        if not 0.0 <= self.warmup_fraction < 1.0:
            raise ValidationError("warmup_fraction must be in [0, 1)")
        if not 0.0 <= self.dropout_rate < 1.0:
            raise ValidationError("dropout_rate must be in [0, 1)")

    def to_dict(self) -> dict:
        return {
            "learning_rate": self.learning_rate,
            "weight_decay": self.weight_decay,
            "epochs": self.epochs,
            "early_stop_patience": self.early_stop_patience,
            "warmup_fraction": self.warmup_fraction,
            "grad_clip_max_norm": self.grad_clip_max_norm,
            "batch_size": self.batch_size,
            "val_fraction": self.val_fraction,
            "seed": self.seed,
            "decision_threshold": self.decision_threshold,
            "dropout_rate": self.dropout_rate,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "TrainConfig":
        return cls(**d)


@dataclass
class TrainReport:
    epochs: list[dict] = field(default_factory=list)
    best_epoch: int = 0
    stopped_early: bool = False
    train_size: int = 0
    val_size: int = 0

    def to_dict(self) -> dict:
        return {
            "epochs": self.epochs,
            "best_epoch": self.best_epoch,
            "stopped_early": self.stopped_early,
            "train_size": self.train_size,
            "val_size": self.val_size,
        }


def stratified_split(
    examples: list[LabeledExample], val_fraction: float, rng: np.random.Generator
) -> tuple[list[LabeledExample], list[LabeledExample]]:
    """Seeded per-class shuffle and holdout; keeps both classes in both splits."""
    by_label = {ACCEPT: [], REJECT: []}
    for i, ex in enumerate(examples):
        by_label[ex.label].append(i)
    if not by_label[ACCEPT] or not by_label[REJECT]:
        raise ValidationError("cannot early-stop on F1 with one class")
    if min(len(v) for v in by_label.values()) < 2:
        raise ValidationError(
            "need at least 2 labeled examples per class to hold out a validation split"
        )
    train_idx, val_idx = [], []
    for label in (ACCEPT, REJECT):
        idx = np.array(by_label[label])
        rng.shuffle(idx)
        n_val = int(round(len(idx) * val_fraction))
        n_val = min(max(n_val, 1), len(idx) - 1)
        val_idx.extend(idx[:n_val])
        train_idx.extend(idx[n_val:])
    return [examples[i] for i in sorted(train_idx)], [examples[i] for i in sorted(val_idx)]


def evaluate(
    model: PreferenceModel, examples: list[LabeledExample], threshold: float
) -> tuple[float, float, float]:
    """(precision, recall, F1) at the given decision threshold, dropout off."""
    probs = forward_batch(model, [ex.features for ex in examples])
    preds = [ACCEPT if p > threshold else REJECT for p in probs]
    return precision_recall_f1(confusion(preds, [ex.label for ex in examples]))


def train(
    examples: list[LabeledExample],
    cfg: TrainConfig,
    dims: ModelDims | None = None,
    eval_fn=None,
) -> tuple[PreferenceModel, TrainReport]:
    """Full training run; returns the best-validation-F1 snapshot.

    Deterministic for a fixed (examples, cfg.seed). `eval_fn` overrides
    the validation metric computation, mainly so tests can stub it.
    """
    if not examples:
        raise ValidationError("no training examples")
    if dims is None:
        f = examples[0].features
        dims = ModelDims(
            global_dim=f.global_features.shape[0],
            spatial_dim=f.spatial_features.shape[0],
        )
    eval_fn = eval_fn or evaluate

    rng = np.random.default_rng(cfg.seed)
    train_set, val_set = stratified_split(examples, cfg.val_fraction, rng)
    if len({ex.label for ex in train_set}) < 2:
        raise ValidationError("cannot early-stop on F1 with one class")

    model = init_model(dims, seed=cfg.seed)
    state = AdamWState()
    steps_per_epoch = math.ceil(len(train_set) / cfg.batch_size)
    total_steps = cfg.epochs * steps_per_epoch

    report = TrainReport(train_size=len(train_set), val_size=len(val_set))
    best = model.copy()
    best_f1 = -1.0
    since_best = 0
    global_step = 0

    for epoch in range(1, cfg.epochs + 1):
        order = rng.permutation(len(train_set))
        epoch_losses = []
        lr = 0.0
        for b in range(steps_per_epoch):
            batch = [train_set[i] for i in order[b * cfg.batch_size : (b + 1) * cfg.batch_size]]
            loss, grads = loss_and_gradients(
                model, batch, dropout_rate=cfg.dropout_rate, dropout_rng=rng
            )
            grads = clip_global_norm(grads, cfg.grad_clip_max_norm)
            lr = lr_at_step(cfg.learning_rate, cfg.warmup_fraction, global_step, total_steps)
            adamw_step(model.params, grads, state, lr, cfg.weight_decay)
            epoch_losses.append(loss)
            global_step += 1

        val_p, val_r, val_f1 = eval_fn(model, val_set, cfg.decision_threshold)
        report.epochs.append(
            {
                "epoch": epoch,
                "train_loss": float(np.mean(epoch_losses)),
                "val_precision": val_p,
                "val_recall": val_r,
                "val_f1": val_f1,
                "learning_rate": lr,
            }
        )
        if val_f1 > best_f1:  # ties break toward the earlier epoch
            best_f1 = val_f1
            best = model.copy()
            report.best_epoch = epoch
            since_best = 0
        else:
            since_best += 1
            if since_best >= cfg.early_stop_patience:
                report.stopped_early = True
                break

    return best, report


def save_checkpoint(model: PreferenceModel, cfg: TrainConfig, path: str | Path):
    """Write a versioned JSON checkpoint that round-trips bit-exactly."""
    model.validate()
    payload = {
        "format": CHECKPOINT_FORMAT,
        "version": CHECKPOINT_VERSION,
        "dims": model.dims.to_dict(),
        "seed": model.seed,
        "params": {k: v.tolist() for k, v in sorted(model.params.items())},
        "train_config": cfg.to_dict(),
    }
    Path(path).write_text(json.dumps(payload))


def load_checkpoint(path: str | Path) -> tuple[PreferenceModel, TrainConfig]:
    payload = json.loads(Path(path).read_text())
    if payload.get("format") != CHECKPOINT_FORMAT or payload.get("version") != CHECKPOINT_VERSION:
        raise ManifestFormatError(
            f"unknown checkpoint format {payload.get('format')!r} v{payload.get('version')!r}"
        )
    model = PreferenceModel(
        dims=ModelDims.from_dict(payload["dims"]),
        params={k: np.asarray(v, dtype=np.float64) for k, v in payload["params"].items()},
        seed=payload["seed"],
    )
    model.validate()
    return model, TrainConfig.from_dict(payload["train_config"])
