# model/spm.py
from typing import Sequence, Tuple

import torch
import torch.nn as nn
from torch.nn.utils.rnn import pad_sequence

from ditra.geom.cells import cell_mask_from_boxes
from ditra.model.attention import AttentionBlock


class ScorePredictor(nn.Module):
    """
    A learnable token attends to the search cells inside the predicted box,
    then to the cropped initial template, and a 3-layer perceptron with a
    sigmoid turns it into a confidence.
    """

    def __init__(self, channels: int, heads: int, stride: int):
        super().__init__()
        self.stride = stride
        self.token = nn.Parameter(torch.zeros(1, 1, channels))
        nn.init.normal_(self.token, std=0.02)
        self.search_attn = AttentionBlock(channels, heads, ffn=False)
        self.template_attn = AttentionBlock(channels, heads, ffn=False)
        self.mlp = nn.Sequential(
            nn.Linear(channels, channels),
            nn.ReLU(inplace=True),
            nn.Linear(channels, channels),
            nn.ReLU(inplace=True),
            nn.Linear(channels, 1),
        )

    def forward(
        self,
        search: torch.Tensor,
        boxes: torch.Tensor,
        initial_cropped: Sequence[torch.Tensor],
        spatial: Tuple[int, int],
        pos: torch.Tensor,
    ) -> Tuple[torch.Tensor, torch.Tensor]:
        """Returns (B,) scores in (0, 1) and (B,) flags for boxes covering no cell (score 0)."""
        batch = search.shape[0]
        inside = cell_mask_from_boxes(boxes, spatial, self.stride).to(search.device)
        degenerate = ~inside.any(dim=1)
        # unmask empty rows so attention stays finite; their score is replaced below
        ignore = ~inside
        ignore[degenerate] = False

        token = self.token.expand(batch, -1, -1).to(search.dtype)
        token, _ = self.search_attn(token, search, search, key_pos=pos.unsqueeze(0), key_padding_mask=ignore)

        keys = pad_sequence(list(initial_cropped), batch_first=True)
        lengths = torch.tensor([rows.shape[0] for rows in initial_cropped], device=search.device)
        padding = torch.arange(keys.shape[1], device=search.device)[None, :] >= lengths[:, None]
        token, _ = self.template_attn(token, keys, keys, key_padding_mask=padding)

        scores = torch.sigmoid(self.mlp(token[:, 0])).squeeze(-1)
        scores = torch.where(degenerate, torch.zeros_like(scores), scores)
        return scores, degenerate
