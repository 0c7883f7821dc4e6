# geom/boxes.py
import logging
import math
from typing import Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, model_validator

from ditra.errors import DomainError


class BoundingBox(BaseModel):
    """
    Axis-aligned box in continuous pixel coordinates.

    (x, y) is the top-left corner, the origin is the top-left image corner and
    pixel centres sit at integer + 0.5.
    """

    model_config = ConfigDict(frozen=True)

    x: float
    y: float
    w: float
    h: float

    @model_validator(mode="after")
    def _check_box(self) -> "BoundingBox":
        values = (self.x, self.y, self.w, self.h)
        if not all(math.isfinite(v) for v in values):
            raise ValueError(f"box coordinates must be finite, got {values}")
        if self.w <= 0 or self.h <= 0:
            raise ValueError(f"box size must be positive, got w={self.w} h={self.h}")
        return self

    @classmethod
    def from_xywh(cls, values: Sequence[float]) -> "BoundingBox":
        x, y, w, h = (float(v) for v in values)
        return cls(x=x, y=y, w=w, h=h)

    @classmethod
    def from_xyxy(cls, values: Sequence[float]) -> "BoundingBox":
        x1, y1, x2, y2 = (float(v) for v in values)
        return cls(x=x1, y=y1, w=x2 - x1, h=y2 - y1)

    @classmethod
    def from_text(cls, line: str) -> "BoundingBox":
        parts = line.strip().split(",")
        if len(parts) != 4:
            raise ValueError(f"expected 'x,y,w,h', got {line.strip()!r}")
        return cls.from_xywh([float(p) for p in parts])

    def to_text(self) -> str:
        # repr keeps the shortest exact float form, so text round trips are lossless
        return ",".join(repr(float(v)) for v in self.as_tuple())

    def as_tuple(self) -> Tuple[float, float, float, float]:
        return (self.x, self.y, self.w, self.h)

    @property
    def x2(self) -> float:
        return self.x + self.w

    @property
    def y2(self) -> float:
        return self.y + self.h

    @property
    def cx(self) -> float:
        return self.x + 0.5 * self.w

    @property
    def cy(self) -> float:
        return self.y + 0.5 * self.h

    @property
    def area(self) -> float:
        return self.w * self.h

    def shift(self, dx: float, dy: float) -> "BoundingBox":
        return BoundingBox(x=self.x + dx, y=self.y + dy, w=self.w, h=self.h)

    def clip_to(self, height: int, width: int, min_size: float = 1.0) -> "BoundingBox":
        """Clip into the image, keeping at least `min_size` pixels per side."""
        x1 = min(max(self.x, 0.0), width - min_size)
        y1 = min(max(self.y, 0.0), height - min_size)
        x2 = min(max(self.x2, x1 + min_size), float(width))
        y2 = min(max(self.y2, y1 + min_size), float(height))
        return BoundingBox(x=x1, y=y1, w=x2 - x1, h=y2 - y1)


def _require_finite(*boxes: BoundingBox) -> None:
    for box in boxes:
        values = (box.x, box.y, box.w, box.h)
        if not all(math.isfinite(v) for v in values):
            error_msg = f"Non-finite box: {values}"
            logging.error(error_msg)
            raise DomainError(error_msg)


def _intersection(a: BoundingBox, b: BoundingBox) -> float:
    iw = max(0.0, min(a.x2, b.x2) - max(a.x, b.x))
    ih = max(0.0, min(a.y2, b.y2) - max(a.y, b.y))
    return iw * ih


def iou(a: BoundingBox, b: BoundingBox) -> float:
    """Intersection over union; 0 for disjoint boxes."""
    _require_finite(a, b)
    inter = _intersection(a, b)
    union = a.area + b.area - inter
    return inter / union


def giou(a: BoundingBox, b: BoundingBox) -> float:
    """Generalized IoU: IoU minus the empty fraction of the enclosing hull."""
    _require_finite(a, b)
    inter = _intersection(a, b)
    union = a.area + b.area - inter
    hull = (max(a.x2, b.x2) - min(a.x, b.x)) * (max(a.y2, b.y2) - min(a.y, b.y))
    return inter / union - (hull - union) / hull


def giou_loss(a: BoundingBox, b: BoundingBox) -> float:
    return 1.0 - giou(a, b)


def l1_box_loss(a: BoundingBox, b: BoundingBox, norm: Tuple[float, float]) -> float:
    """
    Mean absolute difference of (x, y, w, h) after normalising x, w by the image
    width and y, h by the image height.
    """
    _require_finite(a, b)
    width, height = norm
    if width <= 0 or height <= 0:
        error_msg = f"Normalisation size must be positive, got {norm}"
        logging.error(error_msg)
        raise DomainError(error_msg)

    scale = (width, height, width, height)
    diffs = [abs(p - q) / s for p, q, s in zip(a.as_tuple(), b.as_tuple(), scale)]
    return sum(diffs) / 4.0


def center_error(a: BoundingBox, b: BoundingBox) -> float:
    _require_finite(a, b)
    return math.hypot(a.cx - b.cx, a.cy - b.cy)


def boxes_to_array(boxes: Sequence[Optional[BoundingBox]]) -> np.ndarray:
    """Stack boxes into an (N, 4) array; absent boxes become zero rows."""
    out = np.zeros((len(boxes), 4), dtype=np.float64)
    for i, box in enumerate(boxes):
        if box is not None:
            out[i] = box.as_tuple()
    return out

