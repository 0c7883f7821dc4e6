# model/branches.py
import logging
from typing import List, Sequence, Tuple

import torch
import torch.nn as nn
from torch.nn.utils.rnn import pad_sequence

from ditra.errors import DomainError
from ditra.geom.cells import cell_mask_from_boxes
from ditra.model.attention import AttentionBlock


def two_channel_cells(boxes: torch.Tensor, spatial: Tuple[int, int], stride: float, dtype: torch.dtype) -> torch.Tensor:
    """(B, HW, 2) cell mask of each box and its inverse."""
    mask = cell_mask_from_boxes(boxes, spatial, stride).to(dtype)
    return torch.stack([mask, 1.0 - mask], dim=-1)


class TemplateEncoder(nn.Module):
    """Learned linear map from the two-channel box mask to a C-channel code per cell."""

    def __init__(self, channels: int, stride: int):
        super().__init__()
        self.stride = stride
        self.proj = nn.Linear(2, channels)

    def forward(self, boxes: torch.Tensor, spatial: Tuple[int, int]) -> torch.Tensor:
        masks = two_channel_cells(boxes, spatial, self.stride, self.proj.weight.dtype)
        return self.proj(masks.to(self.proj.weight.device))


def crop_template_features(
    features: torch.Tensor, box: torch.Tensor, spatial: Tuple[int, int], stride: float
) -> torch.Tensor:
    """
    Rows of one (HW, C) template grid whose cell centres lie in `box`
    (xywh, template-patch pixels), in row-major order.
    """
    mask = cell_mask_from_boxes(box.reshape(1, 4), spatial, stride)[0].to(features.device)
    if not mask.any():
        error_msg = f"Box {box.tolist()} covers no feature cell"
        logging.error(error_msg)
        raise DomainError(error_msg)
    return features[mask]


def crop_batch(
    features: torch.Tensor, boxes: torch.Tensor, spatial: Tuple[int, int], stride: float
) -> List[torch.Tensor]:
    """Batched cropping; a box covering no cell centre keeps the cell holding its centre."""
    masks = cell_mask_from_boxes(boxes, spatial, stride, ensure_nonempty=True).to(features.device)
    return [features[b][masks[b]] for b in range(features.shape[0])]


class DistractorBranch(nn.Module):
    """
    Search cells query all template cells; keys are template features and
    values are template features plus template encodings.
    """

    def __init__(self, channels: int, heads: int, ffn_factor: int = 4):
        super().__init__()
        self.block = AttentionBlock(channels, heads, ffn_factor)

    def forward(
        self,
        search: torch.Tensor,
        templates: Sequence[Tuple[torch.Tensor, torch.Tensor]],
        pos: torch.Tensor,
    ) -> Tuple[torch.Tensor, torch.Tensor]:
        if not templates:
            error_msg = "Distractor branch needs at least one template"
            logging.error(error_msg)
            raise DomainError(error_msg)

        keys = torch.cat([f for f, _ in templates], dim=1)
        values = torch.cat([f + e for f, e in templates], dim=1)
        key_pos = pos.repeat(len(templates), 1)
        return self.block(search, keys, values, query_pos=pos, key_pos=key_pos)


class PoseBranch(nn.Module):
    """Search cells query the cropped target cells of the templates."""

    def __init__(self, channels: int, heads: int, ffn_factor: int = 4):
        super().__init__()
        self.block = AttentionBlock(channels, heads, ffn_factor)

    def forward(
        self,
        search: torch.Tensor,
        cropped: Sequence[Sequence[torch.Tensor]],
        pos: torch.Tensor,
    ) -> Tuple[torch.Tensor, torch.Tensor]:
        """`cropped[t][b]` is the (hw, C) cropped template t of batch element b."""
        if not cropped:
            error_msg = "Pose branch needs at least one cropped template"
            logging.error(error_msg)
            raise DomainError(error_msg)

        per_sample = [torch.cat([template[b] for template in cropped], dim=0) for b in range(search.shape[0])]
        keys = pad_sequence(per_sample, batch_first=True)
        lengths = torch.tensor([rows.shape[0] for rows in per_sample], device=search.device)
        padding = torch.arange(keys.shape[1], device=search.device)[None, :] >= lengths[:, None]
        return self.block(search, keys, keys, query_pos=pos, key_padding_mask=padding)
