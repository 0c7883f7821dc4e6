# geom/crop.py
import logging
import math
from typing import Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict
from scipy import ndimage

from ditra.errors import DomainError
from ditra.geom.boxes import BoundingBox


class CropTransform(BaseModel):
    """
    Maps square patch coordinates back to image coordinates:
    image = offset + patch * scale.
    """

    model_config = ConfigDict(frozen=True)

    x0: float
    y0: float
    scale: float
    size: int

    def patch_to_image(self, box: BoundingBox) -> BoundingBox:
        return BoundingBox(
            x=self.x0 + box.x * self.scale,
            y=self.y0 + box.y * self.scale,
            w=box.w * self.scale,
            h=box.h * self.scale,
        )

    def image_to_patch(self, box: BoundingBox) -> BoundingBox:
        return BoundingBox(
            x=(box.x - self.x0) / self.scale,
            y=(box.y - self.y0) / self.scale,
            w=box.w / self.scale,
            h=box.h / self.scale,
        )


def crop_square(
    image: np.ndarray, center: Tuple[float, float], side: float, out: int
) -> Tuple[np.ndarray, CropTransform]:
    """
    Bilinearly resample the square of `side` pixels centred on `center` into an
    out x out patch. Samples falling outside the frame take the channel mean.
    """
    if side <= 0 or out <= 0:
        error_msg = f"Crop side and output size must be positive, got side={side} out={out}"
        logging.error(error_msg)
        raise DomainError(error_msg)

    image = np.asarray(image)
    x0 = center[0] - 0.5 * side
    y0 = center[1] - 0.5 * side
    scale = side / out

    # pixel-centre convention: patch pixel j covers image coordinate x0 + (j + 0.5) * scale
    coords = (np.arange(out) + 0.5) * scale - 0.5
    rows, cols = np.meshgrid(y0 + coords, x0 + coords, indexing="ij")

    channels = image.reshape(image.shape[0], image.shape[1], -1).astype(np.float32)
    means = channels.mean(axis=(0, 1))
    patch = np.empty((out, out, channels.shape[2]), dtype=np.float32)
    for c in range(channels.shape[2]):
        patch[..., c] = ndimage.map_coordinates(
            channels[..., c],
            [rows, cols],
            order=1,
            mode="constant",
            cval=float(means[c]),
        )

    transform = CropTransform(x0=x0, y0=y0, scale=scale, size=out)
    return patch, transform


def crop_resize(
    image: np.ndarray, box: BoundingBox, context: float, out: int
) -> Tuple[np.ndarray, CropTransform]:
    """Square region of side context * sqrt(w * h) around the box centre, resized to out x out."""
    if context < 1:
        error_msg = f"Context factor must be >= 1, got {context}"
        logging.error(error_msg)
        raise DomainError(error_msg)
    if not (box.w > 0 and box.h > 0 and math.isfinite(box.w * box.h)):
        error_msg = f"Degenerate crop box: {box.as_tuple()}"
        logging.error(error_msg)
        raise DomainError(error_msg)

    side = context * math.sqrt(box.w * box.h)
    return crop_square(image, (box.cx, box.cy), side, out)
