"""Clients and mocks for the five external model services.

All neural inference happens behind these interfaces; the engine itself
never loads model weights. Backends are selected by configuration, so
real model servers can replace the deterministic mocks without engine
changes.
"""

from .base import Backends, BackendEndpoint, Detection, FeatureBundle
from .mocks import HashBackends, ScriptedBackends
from .http import HttpBackends

__all__ = [
    "Backends",
    "BackendEndpoint",
    "Detection",
    "FeatureBundle",
    "HashBackends",
    "ScriptedBackends",
    "HttpBackends",
]
