import numpy as np
import pytest
from PIL import Image

from synthcurate.classifier import TrainConfig
from synthcurate.orchestrator.config import PipelineConfig


@pytest.fixture
def background_dir(tmp_path):
    """Five tiny 64x48 noise backgrounds."""
    bgdir = tmp_path / "backgrounds"
    bgdir.mkdir()
    rng = np.random.default_rng(0)
    for i in range(5):
        arr = rng.integers(0, 255, (48, 64, 3), dtype=np.uint8)
        Image.fromarray(arr, "RGB").save(bgdir / f"bg{i:02d}.png")
    return bgdir


def small_pipeline_config(background_dir, **overrides) -> PipelineConfig:
    base = dict(
        run_id="testrun",
        background_dir=str(background_dir),
        target_class="dog",
        prompt="a dog in an elevator",
        roi=[8, 8, 56, 40],
        mask_width=16,
        mask_height=16,
        candidates_per_background=10,
        train_config=TrainConfig(learning_rate=1e-3, epochs=20, seed=1, batch_size=8),
    )
    base.update(overrides)
    return PipelineConfig(**base)


@pytest.fixture
def pipeline_config(background_dir):
    return small_pipeline_config(background_dir)
