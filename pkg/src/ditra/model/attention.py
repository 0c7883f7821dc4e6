# model/attention.py
from typing import List, Optional, Sequence, Tuple

import torch
import torch.nn as nn


class AttentionBlock(nn.Module):
    """
    Post-norm attention block: multi-head attention with a residual and
    LayerNorm, optionally followed by a two-layer ReLU feed-forward with its
    own residual and LayerNorm. Positional tables are added to queries and
    keys only.
    """

    def __init__(self, channels: int, heads: int, ffn_factor: int = 4, ffn: bool = True):
        super().__init__()
        self.attn = nn.MultiheadAttention(channels, heads, dropout=0.0, batch_first=True)
        self.norm1 = nn.LayerNorm(channels)
        self.ffn = None
        if ffn:
            self.ffn = nn.Sequential(
                nn.Linear(channels, ffn_factor * channels),
                nn.ReLU(inplace=True),
                nn.Linear(ffn_factor * channels, channels),
            )
            self.norm2 = nn.LayerNorm(channels)

    def forward(
        self,
        query: torch.Tensor,
        key: torch.Tensor,
        value: torch.Tensor,
        query_pos: Optional[torch.Tensor] = None,
        key_pos: Optional[torch.Tensor] = None,
        key_padding_mask: Optional[torch.Tensor] = None,
    ) -> Tuple[torch.Tensor, torch.Tensor]:
        """Returns the updated queries and the head-averaged (B, Lq, Lk) attention weights."""
        q = query if query_pos is None else query + query_pos
        k = key if key_pos is None else key + key_pos
        attended, weights = self.attn(
            q, k, value, key_padding_mask=key_padding_mask, need_weights=True, average_attn_weights=True
        )
        out = self.norm1(query + attended)
        if self.ffn is not None:
            out = self.norm2(out + self.ffn(out))
        return out, weights


class FusionLayer(nn.Module):
    """
    One feature-fusion layer: self-attention inside every stream, then the
    search stream attends to all template cells and every template attends to
    the search stream. Template streams share weights.
    """

    def __init__(self, channels: int, heads: int, ffn_factor: int = 4):
        super().__init__()
        self.template_self = AttentionBlock(channels, heads, ffn=False)
        self.search_self = AttentionBlock(channels, heads, ffn=False)
        self.search_cross = AttentionBlock(channels, heads, ffn_factor)
        self.template_cross = AttentionBlock(channels, heads, ffn_factor)

    def forward(
        self,
        templates: Sequence[torch.Tensor],
        search: torch.Tensor,
        pos: torch.Tensor,
    ) -> Tuple[List[torch.Tensor], torch.Tensor, List[torch.Tensor]]:
        attentions: List[torch.Tensor] = []

        # self attention
        templates = list(templates)
        for i, t in enumerate(templates):
            templates[i], w = self.template_self(t, t, t, pos, pos)
            attentions.append(w)
        search, w = self.search_self(search, search, search, pos, pos)
        attentions.append(w)

        # cross attention
        keys = torch.cat(templates, dim=1)
        key_pos = pos.repeat(len(templates), 1)
        new_search, w = self.search_cross(search, keys, keys, pos, key_pos)
        attentions.append(w)
        new_templates = []
        for t in templates:
            fused, w = self.template_cross(t, search, search, pos, pos)
            new_templates.append(fused)
            attentions.append(w)
        return new_templates, new_search, attentions
