"""Synthetic dataset generation and auto-curation engine.

Three stages over a run directory: generate candidates via a pluggable
inpainting backend and gate them on detection confidence, spatial IoU,
aesthetics, and caption-prompt alignment; collect human accept/reject
labels and train a preference classifier on frozen backbone features;
apply the classifier to produce a curated, reproducible dataset manifest.
"""

__version__ = "0.1.0"
