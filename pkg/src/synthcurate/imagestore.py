"""Directory-backed store for background and generated images.

Images are PNG files under a single directory with a JSON index mapping
image id -> {file, width, height}. The store is the engine's only view of
image content; backends reference images purely by id.
"""

from __future__ import annotations

import json
from pathlib import Path

from PIL import Image

from .errors import ValidationError
from .geometry import ImageDims

_INDEX_NAME = "index.json"


class ImageStore:
    def __init__(self, root: str | Path):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self._index_path = self.root / _INDEX_NAME
        if self._index_path.exists():
            self._index = json.loads(self._index_path.read_text())
        else:
            self._index = {}

    def _save_index(self):
        self._index_path.write_text(json.dumps(self._index, indent=2, sort_keys=True))

    def __contains__(self, image_id: str) -> bool:
        return image_id in self._index

    def ids(self) -> list[str]:
        return sorted(self._index)

    def dims(self, image_id: str) -> ImageDims:
        entry = self._entry(image_id)
        return ImageDims(width=entry["width"], height=entry["height"])

    def path(self, image_id: str) -> Path:
        return self.root / self._entry(image_id)["file"]

    def get_bytes(self, image_id: str) -> bytes:
        return self.path(image_id).read_bytes()

    def add_file(self, source: str | Path, image_id: str | None = None) -> str:
        """Register an existing image file, copying it into the store."""
        source = Path(source)
        image_id = image_id or source.stem
        with Image.open(source) as im:
            width, height = im.size
            im = im.convert("RGB")
            im.save(self.root / f"{image_id}.png")
        self._index[image_id] = {"file": f"{image_id}.png", "width": width, "height": height}
        self._save_index()
        return image_id

    def put_image(self, image_id: str, image: Image.Image) -> str:
        image.convert("RGB").save(self.root / f"{image_id}.png")
        self._index[image_id] = {
            "file": f"{image_id}.png",
            "width": image.width,
            "height": image.height,
        }
        self._save_index()
        return image_id

    def open(self, image_id: str) -> Image.Image:
        return Image.open(self.path(image_id)).convert("RGB")

    def _entry(self, image_id: str) -> dict:
        if image_id not in self._index:
            raise ValidationError(f"unknown image id: {image_id!r}")
        return self._index[image_id]
