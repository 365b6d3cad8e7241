"""Human-in-the-loop annotation: durable label store and HTTP service."""

from .store import AnnotationRecord, LabelStore, QueueState
from .service import create_annotation_app

__all__ = ["AnnotationRecord", "LabelStore", "QueueState", "create_annotation_app"]
