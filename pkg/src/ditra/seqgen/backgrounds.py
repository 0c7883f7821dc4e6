# seqgen/backgrounds.py
import logging
import threading
from collections import OrderedDict
from pathlib import Path
from typing import Dict, List, Protocol, Sequence

import numpy as np
from PIL import Image
from scipy import ndimage

from ditra.errors import DatasetError

IMAGE_SUFFIXES = (".png", ".jpg", ".jpeg", ".bmp")

# textures kept per procedural source
TEXTURE_CACHE_SIZE = 4


class BackgroundSource(Protocol):
    def ids(self) -> List[str]: ...

    def frame(self, background_id: str, index: int, height: int, width: int) -> np.ndarray: ...


class ProceduralBackgrounds:
    """
    Smoothed-noise textures with a colour gradient, fully determined by
    (seed, background id). Ids look like `proc-000123`.
    """

    def __init__(self, seed: int = 0, pool_size: int = 1000):
        self.seed = seed
        self.pool_size = pool_size
        self._cache: "OrderedDict[tuple, np.ndarray]" = OrderedDict()
        self._lock = threading.Lock()

    def ids(self) -> List[str]:
        return [f"proc-{i:06d}" for i in range(self.pool_size)]

    def frame(self, background_id: str, index: int, height: int, width: int) -> np.ndarray:
        key = (background_id, height, width)
        with self._lock:
            if key in self._cache:
                self._cache.move_to_end(key)
                return self._cache[key]

        texture = self._texture(background_id, height, width)
        with self._lock:
            self._cache[key] = texture
            while len(self._cache) > TEXTURE_CACHE_SIZE:
                self._cache.popitem(last=False)
        return texture

    def _texture(self, background_id: str, height: int, width: int) -> np.ndarray:
        try:
            number = int(background_id.rsplit("-", 1)[-1])
        except ValueError:
            error_msg = f"Not a procedural background id: {background_id}"
            logging.error(error_msg)
            raise DatasetError(error_msg)

        rng = np.random.default_rng([self.seed, number])

        # coarse noise, upsampled and blurred into blobs
        coarse = rng.uniform(0.0, 255.0, size=(max(height // 16, 2), max(width // 16, 2), 3))
        zoom = (height / coarse.shape[0], width / coarse.shape[1], 1.0)
        texture = ndimage.zoom(coarse, zoom, order=1)[:height, :width]
        texture = ndimage.gaussian_filter(texture, sigma=(4.0, 4.0, 0.0))

        # fine grain so the background is not flat at feature resolution
        texture += rng.normal(0.0, 12.0, size=texture.shape)

        gradient = np.linspace(0.0, 1.0, width)[None, :, None] * rng.uniform(-60.0, 60.0, size=3)
        return np.clip(texture + gradient, 0.0, 255.0).astype(np.uint8)


class DirectoryBackgrounds:
    """
    Backgrounds from a directory of still images and/or frame folders.
    The id is the file or folder name; frame folders advance with the frame
    index and loop.
    """

    def __init__(self, root: Path):
        self.root = Path(root)
        if not self.root.is_dir():
            error_msg = f"Background directory not found: {self.root}"
            logging.error(error_msg)
            raise DatasetError(error_msg)

        self._entries: Dict[str, List[Path]] = {}
        for path in sorted(self.root.iterdir()):
            if path.is_file() and path.suffix.lower() in IMAGE_SUFFIXES:
                self._entries[path.name] = [path]
            elif path.is_dir():
                frames = sorted(p for p in path.iterdir() if p.suffix.lower() in IMAGE_SUFFIXES)
                if frames:
                    self._entries[path.name] = frames

        if not self._entries:
            error_msg = f"No background images in {self.root}"
            logging.error(error_msg)
            raise DatasetError(error_msg)

        # debug
        logging.debug(f"Found {len(self._entries)} background(s) in {self.root}")

    def ids(self) -> List[str]:
        return list(self._entries)

    def frame(self, background_id: str, index: int, height: int, width: int) -> np.ndarray:
        frames = self._entries.get(background_id)
        if frames is None:
            error_msg = f"Background '{background_id}' not found in {self.root}"
            logging.error(error_msg)
            raise DatasetError(error_msg)

        path = frames[index % len(frames)]
        try:
            with Image.open(path) as image:
                image = image.convert("RGB").resize((width, height), Image.Resampling.BILINEAR)
                return np.asarray(image, dtype=np.uint8)
        except OSError as e:
            error_msg = f"Cannot read background image {path}: {e}"
            logging.error(error_msg)
            raise DatasetError(error_msg)


def draw_background_ids(pool: Sequence[str], count: int, rng: np.random.Generator) -> List[str]:
    """
    Draw `count` background ids, each at most once while the pool lasts.
    A pool smaller than `count` is reshuffled and reused.
    """
    if not pool:
        error_msg = "Background pool is empty"
        logging.error(error_msg)
        raise DatasetError(error_msg)

    drawn: List[str] = []
    while len(drawn) < count:
        order = rng.permutation(len(pool))
        take = min(count - len(drawn), len(pool))
        drawn.extend(pool[i] for i in order[:take])
    if count > len(pool):
        logging.warning(f"Only {len(pool)} backgrounds for {count} sequences; some are reused")
    return drawn
