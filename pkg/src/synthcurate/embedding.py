"""Vector arithmetic for prompt-caption alignment scoring.

Embeddings are plain 1-D float64 arrays; all components must be finite.
"""

from __future__ import annotations

import numpy as np

from .errors import DomainError, ValidationError


def as_embedding(values) -> np.ndarray:
    """Validate and return a 1-D float64 embedding vector."""
    v = np.asarray(values, dtype=np.float64)
    if v.ndim != 1 or v.size == 0:
        raise ValidationError(f"embedding must be a non-empty 1-D vector, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise ValidationError("embedding has non-finite components")
    return v


def l2_norm(u) -> float:
    """Euclidean norm of a vector."""
    return float(np.linalg.norm(as_embedding(u)))


def cosine_similarity(u, v) -> float:
    """Cosine of the angle between two vectors, clamped to [-1, 1].

    Raises on dimension mismatch; a zero-norm input is a domain error
    (it signals a broken embedder, not a legitimate score of 0).
    """
    u = as_embedding(u)
    v = as_embedding(v)
    if u.shape != v.shape:
        raise ValidationError(f"dimension mismatch: {u.shape[0]} vs {v.shape[0]}")
    nu = np.linalg.norm(u)
    nv = np.linalg.norm(v)
    if nu == 0.0 or nv == 0.0:
        raise DomainError("cosine similarity undefined for zero-norm vector")
    return float(np.clip(np.dot(u, v) / (nu * nv), -1.0, 1.0))
