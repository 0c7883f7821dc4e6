# geom/cells.py
from typing import Tuple

import torch


def cell_mask_from_boxes(
    boxes: torch.Tensor,
    grid: Tuple[int, int],
    stride: float,
    ensure_nonempty: bool = False,
) -> torch.Tensor:
    """
    Rasterise (B, 4) xywh patch-space boxes onto the feature grid.

    Cell (r, c) is selected iff its centre ((c + 0.5) * stride, (r + 0.5) * stride)
    lies in the box. Returns a (B, H * W) bool tensor in row-major order. With
    `ensure_nonempty` a box covering no cell centre selects the cell holding its
    centre instead.
    """
    height, width = grid
    boxes = boxes.detach().to(torch.float64)
    x, y, w, h = boxes.unbind(-1)

    cols = (torch.arange(width, dtype=torch.float64, device=boxes.device) + 0.5) * stride
    rows = (torch.arange(height, dtype=torch.float64, device=boxes.device) + 0.5) * stride
    inside_x = (cols[None, :] >= x[:, None]) & (cols[None, :] < (x + w)[:, None])
    inside_y = (rows[None, :] >= y[:, None]) & (rows[None, :] < (y + h)[:, None])
    mask = (inside_y[:, :, None] & inside_x[:, None, :]).reshape(boxes.shape[0], height * width)

    if ensure_nonempty:
        empty = ~mask.any(dim=1)
        if empty.any():
            col = torch.floor((x + 0.5 * w) / stride).clamp(0, width - 1).long()
            row = torch.floor((y + 0.5 * h) / stride).clamp(0, height - 1).long()
            fallback = row * width + col
            idx = torch.nonzero(empty).squeeze(1)
            mask[idx, fallback[idx]] = True
    return mask


def box_to_cell_mask(box, grid: Tuple[int, int], stride: float, ensure_nonempty: bool = False) -> torch.Tensor:
    """Single-box form of `cell_mask_from_boxes`; returns an (H * W,) bool tensor."""
    boxes = torch.tensor([list(box.as_tuple())], dtype=torch.float64)
    return cell_mask_from_boxes(boxes, grid, stride, ensure_nonempty=ensure_nonempty)[0]
