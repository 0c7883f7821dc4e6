# geom/box_ops.py
from typing import Tuple

import torch


def box_xywh_to_xyxy(boxes: torch.Tensor) -> torch.Tensor:
    x, y, w, h = boxes.unbind(-1)
    return torch.stack([x, y, x + w, y + h], dim=-1)


def box_xyxy_to_xywh(boxes: torch.Tensor) -> torch.Tensor:
    x1, y1, x2, y2 = boxes.unbind(-1)
    return torch.stack([x1, y1, x2 - x1, y2 - y1], dim=-1)


def _area(boxes: torch.Tensor) -> torch.Tensor:
    return (boxes[..., 2] - boxes[..., 0]).clamp(min=0) * (boxes[..., 3] - boxes[..., 1]).clamp(min=0)


def batched_iou(boxes1: torch.Tensor, boxes2: torch.Tensor) -> Tuple[torch.Tensor, torch.Tensor]:
    """Element-wise IoU of two (N, 4) xyxy tensors; also returns the unions."""
    lt = torch.max(boxes1[..., :2], boxes2[..., :2])
    rb = torch.min(boxes1[..., 2:], boxes2[..., 2:])
    wh = (rb - lt).clamp(min=0)
    inter = wh[..., 0] * wh[..., 1]
    union = _area(boxes1) + _area(boxes2) - inter
    return inter / union.clamp(min=1e-12), union


def batched_giou(boxes1: torch.Tensor, boxes2: torch.Tensor) -> torch.Tensor:
    """Element-wise generalized IoU of two (N, 4) xyxy tensors."""
    iou, union = batched_iou(boxes1, boxes2)

    lt = torch.min(boxes1[..., :2], boxes2[..., :2])
    rb = torch.max(boxes1[..., 2:], boxes2[..., 2:])
    wh = (rb - lt).clamp(min=0)
    hull = (wh[..., 0] * wh[..., 1]).clamp(min=1e-12)
    return iou - (hull - union) / hull


def normalized_l1(boxes1: torch.Tensor, boxes2: torch.Tensor, norm: Tuple[float, float]) -> torch.Tensor:
    """Per-row mean |delta| of (x, y, w, h) xywh boxes normalised by (width, height)."""
    width, height = norm
    scale = boxes1.new_tensor([width, height, width, height])
    return ((boxes1 - boxes2).abs() / scale).mean(dim=-1)
