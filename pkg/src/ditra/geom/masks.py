# geom/masks.py
from typing import Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, model_validator

from ditra.geom.boxes import BoundingBox


class BinaryMask(BaseModel):
    """One-channel {0,1} mask on a row-major pixel grid."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    grid: np.ndarray
    height: int
    width: int

    @model_validator(mode="after")
    def _check_mask(self) -> "BinaryMask":
        if self.height <= 0 or self.width <= 0:
            raise ValueError(f"mask size must be positive, got {self.height}x{self.width}")
        if self.grid.shape != (self.height, self.width):
            raise ValueError(
                f"mask grid shape {self.grid.shape} does not match {self.height}x{self.width}"
            )
        if self.grid.size and not np.isin(self.grid, (0, 1)).all():
            raise ValueError("mask values must be 0 or 1")
        return self

    @classmethod
    def from_array(cls, array: np.ndarray) -> "BinaryMask":
        grid = (np.asarray(array) > 0).astype(np.uint8)
        return cls(grid=grid, height=grid.shape[0], width=grid.shape[1])

    @property
    def count(self) -> int:
        return int(self.grid.sum())

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BinaryMask):
            return NotImplemented
        return self.grid.shape == other.grid.shape and bool(np.array_equal(self.grid, other.grid))

    __hash__ = None


def rasterize_box(box: BoundingBox, height: int, width: int) -> BinaryMask:
    """Pixel (r, c) is set iff its centre (c + 0.5, r + 0.5) lies inside the box."""
    cols = np.arange(width) + 0.5
    rows = np.arange(height) + 0.5
    inside_x = (cols >= box.x) & (cols < box.x2)
    inside_y = (rows >= box.y) & (rows < box.y2)
    grid = (inside_y[:, None] & inside_x[None, :]).astype(np.uint8)
    return BinaryMask(grid=grid, height=height, width=width)


def mask_bounding_box(mask: BinaryMask) -> Optional[BoundingBox]:
    """Tight axis-aligned hull of the nonzero pixels, None for an empty mask."""
    rows = np.flatnonzero(mask.grid.any(axis=1))
    cols = np.flatnonzero(mask.grid.any(axis=0))
    if rows.size == 0:
        return None
    return BoundingBox(
        x=float(cols[0]),
        y=float(rows[0]),
        w=float(cols[-1] - cols[0] + 1),
        h=float(rows[-1] - rows[0] + 1),
    )


def two_channel_mask(mask: np.ndarray) -> np.ndarray:
    """Stack a {0,1} mask with its inverse along a new last axis."""
    first = np.asarray(mask, dtype=np.float32)
    return np.stack([first, 1.0 - first], axis=-1)
