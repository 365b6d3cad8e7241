"""Learnable preference head over frozen two-channel backbone features.

Architecture: per-channel attention gates (two-layer MLP, ReLU then
sigmoid) reweight each feature channel elementwise; the gated channels
are concatenated and fused through a linear projection with ReLU; a
three-layer MLP head maps the fused representation to a single
accept-probability logit. All math is numpy with hand-written exact
backpropagation so gradients can be audited against finite differences.
"""

from .model import (
    LabeledExample,
    ModelDims,
    PreferenceModel,
    forward,
    init_model,
    loss_and_gradients,
    predict,
)
from .optim import AdamWState, adamw_step, clip_global_norm, lr_at_step
from .train import TrainConfig, TrainReport, evaluate, load_checkpoint, save_checkpoint, train

__all__ = [
    "LabeledExample",
    "ModelDims",
    "PreferenceModel",
    "forward",
    "init_model",
    "loss_and_gradients",
    "predict",
    "AdamWState",
    "adamw_step",
    "clip_global_norm",
    "lr_at_step",
    "TrainConfig",
    "TrainReport",
    "evaluate",
    "train",
    "save_checkpoint",
    "load_checkpoint",
]
