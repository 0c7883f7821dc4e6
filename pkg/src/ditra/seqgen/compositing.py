# seqgen/compositing.py
import logging
from typing import Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict
from scipy import ndimage

from ditra.errors import DomainError
from ditra.geom.masks import BinaryMask
from ditra.seqgen.attributes import BLUR_KERNEL_LENGTHS, STRIPE_COUNTS
from ditra.seqgen.sprites import Sprite, signed_distance

RIM_GAIN = 0.15
RIM_WIDTH = 1.5
STRIPE_WIDTH = 12
STRIPE_SPEED = 2
STRIPE_PALETTE = np.array(
    [
        [230, 57, 70],
        [29, 53, 87],
        [255, 183, 3],
        [42, 157, 143],
        [131, 56, 236],
        [244, 162, 97],
    ],
    dtype=np.uint8,
)


class SpriteLayer(BaseModel):
    """
    A premultiplied RGBA sprite layer plus an additive rim highlight. The
    mask is the unblurred silhouette and is what ground truth is taken from.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True)

    color: np.ndarray
    opacity: np.ndarray
    highlight: np.ndarray
    mask: BinaryMask


def render_layer(
    sprite: Sprite,
    alpha: float,
    angle: float,
    center: Tuple[float, float],
    height: int,
    width: int,
    rim: bool = True,
) -> SpriteLayer:
    if not (0.0 < alpha <= 1.0):
        error_msg = f"alpha must be in (0, 1], got {alpha}"
        logging.error(error_msg)
        raise DomainError(error_msg)

    sdf = signed_distance(sprite, center, angle, height, width)
    coverage = np.clip(0.5 - sdf, 0.0, 1.0).astype(np.float32)
    opacity = (alpha * coverage).astype(np.float32)
    color = opacity[..., None] * np.asarray(sprite.color, dtype=np.float32)

    highlight = np.zeros((height, width), dtype=np.float32)
    if rim:
        near = np.abs(sdf) < 3.0 * RIM_WIDTH
        highlight[near] = (RIM_GAIN * 255.0 * np.exp(-((sdf[near] / RIM_WIDTH) ** 2))).astype(np.float32)

    mask = BinaryMask.from_array(coverage > 0.5)
    return SpriteLayer(color=color, opacity=opacity, highlight=highlight, mask=mask)


def composite_layer(image: np.ndarray, layer: SpriteLayer) -> np.ndarray:
    """Alpha-over of a premultiplied layer onto a float image."""
    out = (1.0 - layer.opacity[..., None]) * image + layer.color + layer.highlight[..., None]
    return np.clip(out, 0.0, 255.0)


def composite_target(
    background: np.ndarray,
    sprite: Sprite,
    alpha: float,
    angle: float,
    center: Tuple[float, float],
    rim: Optional[bool] = None,
) -> Tuple[np.ndarray, BinaryMask]:
    """
    Composite one sprite over the background:
    (1 - alpha * coverage) * background + alpha * coverage * color + rim.
    Opaque sprites (alpha 1) get no rim unless asked for.
    """
    height, width = background.shape[:2]
    layer = render_layer(sprite, alpha, angle, center, height, width, rim=alpha < 1.0 if rim is None else rim)
    out = composite_layer(background.astype(np.float32), layer)
    return np.rint(out).astype(np.uint8), layer.mask


def motion_blur_kernel(length: int, direction: Sequence[float]) -> np.ndarray:
    """Normalised line kernel of `length` taps along `direction`."""
    if length <= 1:
        return np.ones((1, 1), dtype=np.float32)

    dx, dy = float(direction[0]), float(direction[1])
    norm = np.hypot(dx, dy)
    dx, dy = (dx / norm, dy / norm) if norm > 1e-12 else (1.0, 0.0)

    kernel = np.zeros((length, length), dtype=np.float64)
    half = (length - 1) / 2.0
    for t in np.linspace(-half, half, 4 * length):
        col = int(round(half + t * dx))
        row = int(round(half + t * dy))
        kernel[row, col] += 1.0
    return (kernel / kernel.sum()).astype(np.float32)


def apply_motion_blur(layer: SpriteLayer, level: int, motion_dir: Sequence[float]) -> SpriteLayer:
    """Convolve the moving layer with a line kernel; the ground-truth mask is kept."""
    if level not in BLUR_KERNEL_LENGTHS:
        error_msg = f"blur level must be one of {sorted(BLUR_KERNEL_LENGTHS)}, got {level}"
        logging.error(error_msg)
        raise DomainError(error_msg)

    length = BLUR_KERNEL_LENGTHS[level]
    if length == 1:
        return layer

    kernel = motion_blur_kernel(length, motion_dir)
    pad = length // 2

    # only blur the region the layer actually touches
    support = (layer.opacity > 0) | (layer.highlight > 0)
    rows = np.flatnonzero(support.any(axis=1))
    cols = np.flatnonzero(support.any(axis=0))
    if rows.size == 0:
        return layer
    height, width = layer.opacity.shape
    r0, r1 = max(rows[0] - pad, 0), min(rows[-1] + pad + 1, height)
    c0, c1 = max(cols[0] - pad, 0), min(cols[-1] + pad + 1, width)

    def blur(plane: np.ndarray) -> np.ndarray:
        out = plane.copy()
        out[r0:r1, c0:c1] = ndimage.convolve(plane[r0:r1, c0:c1], kernel, mode="constant", cval=0.0)
        return out

    color = np.stack([blur(layer.color[..., c]) for c in range(layer.color.shape[2])], axis=-1)
    return SpriteLayer(
        color=color,
        opacity=blur(layer.opacity),
        highlight=blur(layer.highlight),
        mask=layer.mask,
    )


def occlusion_columns(width: int, stripes: int, frame_index: int) -> np.ndarray:
    """(stripes, width) bool array: which columns each stripe covers at this frame."""
    covered = np.zeros((stripes, width), dtype=bool)
    for k in range(stripes):
        start = (int(np.floor(k * width / stripes)) + STRIPE_SPEED * frame_index) % width
        covered[k, (start + np.arange(STRIPE_WIDTH)) % width] = True
    return covered


def render_occlusion(frame: np.ndarray, stripes: int, frame_index: int) -> np.ndarray:
    """
    Draw `stripes` opaque vertical stripes over the whole frame, moving right
    by 2 px per frame with wraparound. Zero stripes leaves the frame as is.
    """
    out = np.array(frame, copy=True)
    if stripes == 0:
        return out
    if stripes not in STRIPE_COUNTS:
        error_msg = f"stripe count must be 0 or one of {STRIPE_COUNTS}, got {stripes}"
        logging.error(error_msg)
        raise DomainError(error_msg)

    covered = occlusion_columns(frame.shape[1], stripes, frame_index)
    for k in range(stripes):
        out[:, covered[k]] = STRIPE_PALETTE[k % len(STRIPE_PALETTE)]
    return out
