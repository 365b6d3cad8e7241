"""Model parameters, forward pass, and exact backpropagation."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..backends.base import FeatureBundle
from ..errors import NumericError, ValidationError
from ..metrics import ACCEPT, REJECT

_EPS = 1e-12


@dataclass(frozen=True)
class ModelDims:
    """All layer widths. Gate hidden widths default to channel_dim // 4."""

    global_dim: int
    spatial_dim: int
    gate_hidden_global: int | None = None
    gate_hidden_spatial: int | None = None
    fusion_dim: int = 512
    head_hidden: tuple[int, int] = (512, 128)

    def __post_init__(self):
        if self.global_dim < 1 or self.spatial_dim < 1 or self.fusion_dim < 1:
            raise ValidationError(f"layer widths must be positive: {self}")
        if len(self.head_hidden) != 2 or any(h < 1 for h in self.head_hidden):
            raise ValidationError(f"head needs two positive hidden widths: {self.head_hidden}")

    @property
    def hg(self) -> int:
        return self.gate_hidden_global or max(1, self.global_dim // 4)

    @property
    def hs(self) -> int:
        return self.gate_hidden_spatial or max(1, self.spatial_dim // 4)

    def to_dict(self) -> dict:
        return {
            "global_dim": self.global_dim,
            "spatial_dim": self.spatial_dim,
            "gate_hidden_global": self.gate_hidden_global,
            "gate_hidden_spatial": self.gate_hidden_spatial,
            "fusion_dim": self.fusion_dim,
            "head_hidden": list(self.head_hidden),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ModelDims":
        d = dict(d)
        d["head_hidden"] = tuple(d["head_hidden"])
        return cls(**d)


@dataclass
class LabeledExample:
    """One human-annotated candidate: features plus its accept/reject label."""

    features: FeatureBundle
    label: str
    candidate_id: str = ""

    def __post_init__(self):
        if self.label not in (ACCEPT, REJECT):
            raise ValidationError(f"label must be accept/reject, got {self.label!r}")


# Expected parameter shapes keyed by block name; W matrices are
# (out, in), biases are (out,).
def _expected_shapes(dims: ModelDims) -> dict[str, tuple]:
    dg, ds = dims.global_dim, dims.spatial_dim
    h1, h2 = dims.head_hidden
    return {
        "attn_g.W1": (dims.hg, dg),
        "attn_g.b1": (dims.hg,),
        "attn_g.W2": (dg, dims.hg),
        "attn_g.b2": (dg,),
        "attn_s.W1": (dims.hs, ds),
        "attn_s.b1": (dims.hs,),
        "attn_s.W2": (ds, dims.hs),
        "attn_s.b2": (ds,),
        "fusion.W": (dims.fusion_dim, dg + ds),
        "fusion.b": (dims.fusion_dim,),
        "head.W1": (h1, dims.fusion_dim),
        "head.b1": (h1,),
        "head.W2": (h2, h1),
        "head.b2": (h2,),
        "head.W3": (1, h2),
        "head.b3": (1,),
    }


@dataclass
class PreferenceModel:
    dims: ModelDims
    params: dict[str, np.ndarray]
    seed: int

    def validate(self):
        expected = _expected_shapes(self.dims)
        for name, shape in expected.items():
            if name not in self.params:
                raise ValidationError(f"missing parameter block {name}")
            if self.params[name].shape != shape:
                raise ValidationError(
                    f"parameter {name} has shape {self.params[name].shape}, expected {shape}"
                )
            if not np.all(np.isfinite(self.params[name])):
                raise NumericError(f"non-finite values in parameter {name}")

    def copy(self) -> "PreferenceModel":
        return PreferenceModel(
            dims=self.dims,
            params={k: v.copy() for k, v in self.params.items()},
            seed=self.seed,
        )


def init_model(dims: ModelDims, seed: int, gate_open_init: float = 0.9) -> PreferenceModel:
    """Deterministic He-style initialization from a seed.

    The gate MLPs' final bias is set to logit(gate_open_init) so the
    sigmoid gates start mostly open and early training sees the raw
    features rather than an attenuated version.
    """
    if not 0.0 < gate_open_init < 1.0:
        raise ValidationError("gate_open_init must be in (0, 1)")
    rng = np.random.default_rng(seed)
    params: dict[str, np.ndarray] = {}
    for name, shape in _expected_shapes(dims).items():
        if name.endswith(("b1", "b2", "b3", ".b")):
            params[name] = np.zeros(shape)
        elif name == "head.W3":
            # Zero final layer: training starts at probability 0.5 instead
            # of a saturated random logit.
            params[name] = np.zeros(shape)
        else:
            fan_in = shape[1]
            params[name] = rng.standard_normal(shape) * math.sqrt(2.0 / fan_in)
    open_bias = math.log(gate_open_init / (1.0 - gate_open_init))
    params["attn_g.b2"] += open_bias
    params["attn_s.b2"] += open_bias
    model = PreferenceModel(dims=dims, params=params, seed=seed)
    model.validate()
    return model


def _sigmoid(z):
    return np.where(z >= 0, 1.0 / (1.0 + np.exp(-z)), np.exp(z) / (1.0 + np.exp(z)))


def _stack_batch(model: PreferenceModel, features: list[FeatureBundle]):
    dg, ds = model.dims.global_dim, model.dims.spatial_dim
    for f in features:
        if f.global_features.shape != (dg,) or f.spatial_features.shape != (ds,):
            raise ValidationError(
                f"feature dims ({f.global_features.shape[0]}, {f.spatial_features.shape[0]}) "
                f"do not match model dims ({dg}, {ds})"
            )
    xg = np.stack([f.global_features for f in features])
    xs = np.stack([f.spatial_features for f in features])
    return xg, xs


def _forward_batch(model, xg, xs, dropout_rate=0.0, dropout_rng=None):
    """Forward over a batch with full intermediate cache for backprop."""
    p = model.params
    cache = {"xg": xg, "xs": xs}

    for ch, x in (("g", xg), ("s", xs)):
        z1 = x @ p[f"attn_{ch}.W1"].T + p[f"attn_{ch}.b1"]
        a1 = np.maximum(z1, 0.0)
        z2 = a1 @ p[f"attn_{ch}.W2"].T + p[f"attn_{ch}.b2"]
        gate = _sigmoid(z2)
        cache[f"z1_{ch}"], cache[f"a1_{ch}"], cache[f"gate_{ch}"] = z1, a1, gate
        cache[f"u_{ch}"] = gate * x

    c = np.concatenate([cache["u_g"], cache["u_s"]], axis=1)
    f_pre = c @ p["fusion.W"].T + p["fusion.b"]
    fused = np.maximum(f_pre, 0.0)
    cache["c"], cache["f_pre"], cache["fused"] = c, f_pre, fused

    keep = 1.0 - dropout_rate
    if dropout_rate > 0.0 and dropout_rng is not None:
        mask1 = (dropout_rng.random(model.dims.head_hidden[0]) < keep) / keep
        mask2 = (dropout_rng.random(model.dims.head_hidden[1]) < keep) / keep
    else:
        mask1 = mask2 = None

    hz1 = fused @ p["head.W1"].T + p["head.b1"]
    ha1 = np.maximum(hz1, 0.0)
    hd1 = ha1 * mask1 if mask1 is not None else ha1
    hz2 = hd1 @ p["head.W2"].T + p["head.b2"]
    ha2 = np.maximum(hz2, 0.0)
    hd2 = ha2 * mask2 if mask2 is not None else ha2
    logit = hd2 @ p["head.W3"].T + p["head.b3"]
    prob = _sigmoid(logit)

    cache.update(
        hz1=hz1, hd1=hd1, hz2=hz2, hd2=hd2, mask1=mask1, mask2=mask2,
        logit=logit, prob=prob,
    )
    if not np.all(np.isfinite(prob)):
        raise NumericError("non-finite output probability")
    return prob, cache


def forward(model: PreferenceModel, features: FeatureBundle) -> float:
    """Accept probability for one feature bundle (evaluation mode, no dropout)."""
    xg, xs = _stack_batch(model, [features])
    prob, _ = _forward_batch(model, xg, xs)
    return float(prob[0, 0])


def forward_batch(model: PreferenceModel, features: list[FeatureBundle]) -> np.ndarray:
    xg, xs = _stack_batch(model, features)
    prob, _ = _forward_batch(model, xg, xs)
    return prob[:, 0]


def predict(model: PreferenceModel, features: FeatureBundle, threshold: float = 0.5):
    """(label, probability); accept iff probability strictly exceeds the threshold."""
    prob = forward(model, features)
    return (ACCEPT if prob > threshold else REJECT), prob


def loss_and_gradients(
    model: PreferenceModel,
    batch: list[LabeledExample],
    dropout_rate: float = 0.0,
    dropout_rng: np.random.Generator | None = None,
) -> tuple[float, dict[str, np.ndarray]]:
    """Mean binary cross-entropy over the batch and its exact gradients.

    Dropout (applied to the two head hidden layers) is active only when a
    generator is supplied; the sampled masks are shared between the loss
    evaluation and the backward pass, so gradients stay exact for the
    realized network.
    """
    if not batch:
        raise ValidationError("batch must be non-empty")
    model.validate()
    xg, xs = _stack_batch(model, [ex.features for ex in batch])
    y = np.array([[1.0 if ex.label == ACCEPT else 0.0] for ex in batch])
    n = len(batch)

    prob, cache = _forward_batch(model, xg, xs, dropout_rate, dropout_rng)
    clipped = np.clip(prob, _EPS, 1.0 - _EPS)
    loss = float(-np.mean(y * np.log(clipped) + (1 - y) * np.log(1 - clipped)))

    p = model.params
    grads: dict[str, np.ndarray] = {}

    d_logit = (prob - y) / n  # exact BCE-through-sigmoid gradient
    grads["head.W3"] = d_logit.T @ cache["hd2"]
    grads["head.b3"] = d_logit.sum(axis=0)

    d_hd2 = d_logit @ p["head.W3"]
    if cache["mask2"] is not None:
        d_hd2 = d_hd2 * cache["mask2"]
    d_hz2 = d_hd2 * (cache["hz2"] > 0)
    grads["head.W2"] = d_hz2.T @ cache["hd1"]
    grads["head.b2"] = d_hz2.sum(axis=0)

    d_hd1 = d_hz2 @ p["head.W2"]
    if cache["mask1"] is not None:
        d_hd1 = d_hd1 * cache["mask1"]
    d_hz1 = d_hd1 * (cache["hz1"] > 0)
    grads["head.W1"] = d_hz1.T @ cache["fused"]
    grads["head.b1"] = d_hz1.sum(axis=0)

    d_fused = d_hz1 @ p["head.W1"]
    d_fpre = d_fused * (cache["f_pre"] > 0)
    grads["fusion.W"] = d_fpre.T @ cache["c"]
    grads["fusion.b"] = d_fpre.sum(axis=0)

    d_c = d_fpre @ p["fusion.W"]
    dg = model.dims.global_dim
    for ch, x, d_u in (("g", xg, d_c[:, :dg]), ("s", xs, d_c[:, dg:])):
        gate = cache[f"gate_{ch}"]
        d_gate = d_u * x
        d_z2 = d_gate * gate * (1.0 - gate)
        grads[f"attn_{ch}.W2"] = d_z2.T @ cache[f"a1_{ch}"]
        grads[f"attn_{ch}.b2"] = d_z2.sum(axis=0)
        d_a1 = d_z2 @ p[f"attn_{ch}.W2"]
        d_z1 = d_a1 * (cache[f"z1_{ch}"] > 0)
        grads[f"attn_{ch}.W1"] = d_z1.T @ x
        grads[f"attn_{ch}.b1"] = d_z1.sum(axis=0)

    return loss, grads
