# model/heads.py
from typing import Tuple

import torch
import torch.nn as nn
import torch.nn.functional as F


def conv(in_planes: int, out_planes: int) -> nn.Sequential:
    return nn.Sequential(
        nn.Conv2d(in_planes, out_planes, kernel_size=3, padding=1, bias=True),
        nn.BatchNorm2d(out_planes),
        nn.ReLU(inplace=True),
    )


def cell_centres(spatial: Tuple[int, int], stride: float, reference: torch.Tensor) -> Tuple[torch.Tensor, torch.Tensor]:
    """Patch-pixel x and y of every cell centre, row-major, each (HW,)."""
    height, width = spatial
    xs = (torch.arange(width, dtype=reference.dtype, device=reference.device) + 0.5) * stride
    ys = (torch.arange(height, dtype=reference.dtype, device=reference.device) + 0.5) * stride
    return xs.repeat(height), ys.repeat_interleave(width)


def corners_to_box(
    prob_tl: torch.Tensor, prob_br: torch.Tensor, spatial: Tuple[int, int], stride: float
) -> Tuple[torch.Tensor, torch.Tensor]:
    """
    Soft-argmax of two (B, HW) corner distributions to (B, 4) xywh boxes.
    A bottom-right corner not past the top-left one is clamped to a 1-px box
    and flagged.
    """
    xs, ys = cell_centres(spatial, stride, prob_tl)
    x1 = (prob_tl * xs).sum(dim=1)
    y1 = (prob_tl * ys).sum(dim=1)
    x2 = (prob_br * xs).sum(dim=1)
    y2 = (prob_br * ys).sum(dim=1)

    degenerate = (x2 <= x1) | (y2 <= y1)
    x2 = torch.maximum(x2, x1 + 1.0)
    y2 = torch.maximum(y2, y1 + 1.0)
    return torch.stack([x1, y1, x2 - x1, y2 - y1], dim=1), degenerate


class CornerHead(nn.Module):
    """Two stacks of 3x3 convolutions halving channels, one score map per corner."""

    def __init__(self, channels: int, stride: int):
        super().__init__()
        self.stride = stride

        def tower() -> nn.Sequential:
            return nn.Sequential(
                conv(channels, channels),
                conv(channels, channels // 2),
                conv(channels // 2, channels // 4),
                conv(channels // 4, channels // 8),
                nn.Conv2d(channels // 8, 1, kernel_size=1),
            )

        self.tl = tower()
        self.br = tower()

    def forward(self, feature_map: torch.Tensor) -> Tuple[torch.Tensor, torch.Tensor, torch.Tensor, torch.Tensor]:
        """(B, C, H, W) localisation features to (boxes, degenerate flags, tl probs, br probs)."""
        spatial = tuple(feature_map.shape[-2:])
        prob_tl = F.softmax(self.tl(feature_map).flatten(1), dim=1)
        prob_br = F.softmax(self.br(feature_map).flatten(1), dim=1)
        boxes, degenerate = corners_to_box(prob_tl, prob_br, spatial, self.stride)
        return boxes, degenerate, prob_tl, prob_br


class AuxMaskHead(nn.Module):
    """Per-cell linear map C -> 1 (a 1x1 convolution on the flattened grid); raw logits."""

    def __init__(self, channels: int):
        super().__init__()
        self.proj = nn.Linear(channels, 1)

    def forward(self, features: torch.Tensor) -> torch.Tensor:
        return self.proj(features)
