# seqgen/sprites.py
import logging
from typing import Callable, Dict, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator

from ditra.seqgen.attributes import SHAPE_IDS


class Sprite(BaseModel):
    """A procedural glass-like silhouette of a given type, size and tint."""

    model_config = ConfigDict(frozen=True)

    shape_id: str
    width: float = Field(gt=0)
    height: float = Field(gt=0)
    color: Tuple[float, float, float]

    @field_validator("shape_id")
    @classmethod
    def _known_shape(cls, value: str) -> str:
        if value not in SHAPE_IDS:
            raise ValueError(f"unknown shape '{value}', expected one of {SHAPE_IDS}")
        return value

    @property
    def radius(self) -> float:
        """Half-diagonal: the sprite stays inside this circle at any rotation."""
        return 0.5 * float(np.hypot(self.width, self.height))


def _ellipse(x, y, cx, cy, rx, ry):
    return (np.sqrt(((x - cx) / rx) ** 2 + ((y - cy) / ry) ** 2) - 1.0) * min(rx, ry)


def _box(x, y, cx, cy, hx, hy):
    dx = np.abs(x - cx) - hx
    dy = np.abs(y - cy) - hy
    outside = np.hypot(np.maximum(dx, 0.0), np.maximum(dy, 0.0))
    inside = np.minimum(np.maximum(dx, dy), 0.0)
    return outside + inside


def _union(*fields):
    return np.minimum.reduce(fields)


# signed distance in unit coordinates: the sprite spans [-1, 1] on both axes, y points down
SHAPES: Dict[str, Callable[[np.ndarray, np.ndarray], np.ndarray]] = {
    "ellipse": lambda x, y: _ellipse(x, y, 0.0, 0.0, 1.0, 1.0),
    "goblet": lambda x, y: _union(
        _ellipse(x, y, 0.0, -0.45, 0.9, 0.55),
        _box(x, y, 0.0, 0.35, 0.12, 0.45),
        _box(x, y, 0.0, 0.9, 0.6, 0.1),
    ),
    "bottle": lambda x, y: _union(
        _box(x, y, 0.0, 0.3, 0.75, 0.7),
        _ellipse(x, y, 0.0, -0.35, 0.75, 0.35),
        _box(x, y, 0.0, -0.75, 0.25, 0.25),
    ),
    "flask": lambda x, y: _union(
        _ellipse(x, y, 0.0, 0.35, 1.0, 0.65),
        _box(x, y, 0.0, -0.6, 0.25, 0.4),
    ),
    # tapered towards the bottom
    "tumbler": lambda x, y: _box(x, y, 0.0, 0.0, 0.7 + 0.2 * (1.0 - np.clip(y, -1.0, 1.0)) / 2.0, 1.0),
    "vase": lambda x, y: _union(
        _ellipse(x, y, 0.0, 0.35, 1.0, 0.65),
        _box(x, y, 0.0, -0.45, 0.35, 0.3),
        _ellipse(x, y, 0.0, -0.85, 0.6, 0.15),
    ),
}


def signed_distance(
    sprite: Sprite,
    center: Tuple[float, float],
    angle: float,
    height: int,
    width: int,
) -> np.ndarray:
    """
    Signed distance in pixels from every pixel centre to the sprite outline
    (negative inside), with the sprite rotated by `angle` degrees about `center`.
    """
    theta = np.deg2rad(angle % 360.0)
    cos_t, sin_t = np.cos(theta), np.sin(theta)

    cols = np.arange(width, dtype=np.float64) + 0.5 - center[0]
    rows = np.arange(height, dtype=np.float64) + 0.5 - center[1]
    dx, dy = np.meshgrid(cols, rows)

    # rotate the pixel grid back into the sprite frame
    lx = cos_t * dx + sin_t * dy
    ly = -sin_t * dx + cos_t * dy

    half_w, half_h = 0.5 * sprite.width, 0.5 * sprite.height
    unit = SHAPES[sprite.shape_id](lx / half_w, ly / half_h)
    return unit * min(half_w, half_h)


def random_sprite(rng: np.random.Generator, shape_id: str, frame_size: Tuple[int, int]) -> Sprite:
    """Draw a sprite of the given type sized relative to the frame."""
    short_side = min(frame_size)
    width = float(rng.uniform(0.10, 0.18) * short_side)
    height = float(width * rng.uniform(1.0, 1.6))
    # light, slightly tinted glass
    color = tuple(float(c) for c in rng.uniform(150.0, 255.0, size=3))

    # debug
    logging.debug(f"Sprite {shape_id}: {width:.1f}x{height:.1f} color={color}")
    return Sprite(shape_id=shape_id, width=width, height=height, color=color)
