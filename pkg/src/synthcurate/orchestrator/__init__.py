"""Run orchestration: config, persistent run state, and the three stages."""

from .config import PipelineConfig
from .runstate import CandidateRecord, RunState, STATES
from .pipeline import run_stage1, run_stage2, run_stage3, write_manifest, load_manifest

__all__ = [
    "PipelineConfig",
    "CandidateRecord",
    "RunState",
    "STATES",
    "run_stage1",
    "run_stage2",
    "run_stage3",
    "write_manifest",
    "load_manifest",
]
