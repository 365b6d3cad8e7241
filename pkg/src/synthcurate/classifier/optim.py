"""AdamW with decoupled weight decay, global-norm clipping, and the
warmup-then-cosine learning-rate schedule."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..errors import NumericError

BETA1 = 0.9
BETA2 = 0.999
ADAM_EPS = 1e-8


@dataclass
class AdamWState:
    step: int = 0
    m: dict[str, np.ndarray] = field(default_factory=dict)
    v: dict[str, np.ndarray] = field(default_factory=dict)


def clip_global_norm(grads: dict[str, np.ndarray], max_norm: float) -> dict[str, np.ndarray]:
    """Scale all gradients so their joint L2 norm does not exceed max_norm."""
    total = math.sqrt(sum(float(np.sum(g * g)) for g in grads.values()))
    if total <= max_norm or total == 0.0:
        return grads
    scale = max_norm / total
    return {k: g * scale for k, g in grads.items()}


def adamw_step(
    params: dict[str, np.ndarray],
    grads: dict[str, np.ndarray],
    state: AdamWState,
    lr: float,
    weight_decay: float = 0.0,
) -> tuple[dict[str, np.ndarray], AdamWState]:
    """One AdamW update, in place.

    Weight decay is decoupled: `p -= lr * wd * p` is applied separately
    from the bias-corrected adaptive step, so decay strength does not
    depend on gradient magnitudes.
    """
    state.step += 1
    t = state.step
    bc1 = 1.0 - BETA1**t
    bc2 = 1.0 - BETA2**t
    for name, p in params.items():
        g = grads[name]
        if not np.all(np.isfinite(g)):
            raise NumericError(f"non-finite gradient in parameter block {name}")
        if name not in state.m:
            state.m[name] = np.zeros_like(p)
            state.v[name] = np.zeros_like(p)
        m = state.m[name]
        v = state.v[name]
        m += (1.0 - BETA1) * (g - m)
        v += (1.0 - BETA2) * (g * g - v)
        p -= lr * (m / bc1) / (np.sqrt(v / bc2) + ADAM_EPS)
        p -= lr * weight_decay * p
    return params, state


def lr_at_step(peak_lr: float, warmup_fraction: float, step: int, total_steps: int) -> float:
    """Linear warmup to peak_lr, then cosine decay to 0 at total_steps.

    lr(0) = 0, lr(warmup end) = peak_lr exactly.
    """
    warmup_steps = int(round(warmup_fraction * total_steps))
    if warmup_steps > 0 and step < warmup_steps:
        return peak_lr * step / warmup_steps
    span = max(1, total_steps - warmup_steps)
    progress = (step - warmup_steps) / span
    return peak_lr * 0.5 * (1.0 + math.cos(math.pi * progress))
