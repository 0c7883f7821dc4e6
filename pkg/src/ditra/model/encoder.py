# model/encoder.py
import logging
from typing import List, Sequence, Tuple, Union

import numpy as np
import torch
import torch.nn as nn

from ditra.errors import DomainError
from ditra.model.backbone import build_backbone
from ditra.model.attention import FusionLayer
from ditra.model.config import ModelConfig
from ditra.model.positional import sine_embedding
from ditra.model.types import FeatureGrid

IMAGENET_MEAN = (0.485, 0.456, 0.406)
IMAGENET_STD = (0.229, 0.224, 0.225)


def preprocess_patches(patches: Union[np.ndarray, torch.Tensor], dtype: torch.dtype = torch.float32) -> torch.Tensor:
    """(B, H, W, 3) or (H, W, 3) patches in [0, 255] to normalised (B, 3, H, W) tensors."""
    x = torch.as_tensor(np.asarray(patches) if not torch.is_tensor(patches) else patches)
    if x.dim() == 3:
        x = x.unsqueeze(0)
    x = x.to(dtype).permute(0, 3, 1, 2) / 255.0
    mean = torch.tensor(IMAGENET_MEAN, dtype=dtype).view(1, 3, 1, 1)
    std = torch.tensor(IMAGENET_STD, dtype=dtype).view(1, 3, 1, 1)
    return (x - mean) / std


class ImageEncoder(nn.Module):
    """Backbone, 1x1 reduction to C channels, then the feature-fusion layers."""

    def __init__(self, cfg: ModelConfig):
        super().__init__()
        self.cfg = cfg
        self.backbone = build_backbone(cfg)
        self.reduce = nn.Conv2d(self.backbone.out_channels, cfg.channels, kernel_size=1)
        self.fusion = nn.ModuleList(
            FusionLayer(cfg.channels, cfg.heads, cfg.ffn_factor) for _ in range(cfg.fusion_layers)
        )

    def positional(self, reference: torch.Tensor) -> torch.Tensor:
        height, width = self.cfg.spatial
        return sine_embedding(height, width, self.cfg.channels, reference.device, reference.dtype)

    def embed(self, patches: torch.Tensor) -> torch.Tensor:
        """(B, 3, H_im, W_im) patches to reduced (B, HW, C) backbone features."""
        if patches.dim() != 4 or tuple(patches.shape[-2:]) != (self.cfg.input_size, self.cfg.input_size):
            error_msg = f"Expected (B, 3, {self.cfg.input_size}, {self.cfg.input_size}) patches, got {tuple(patches.shape)}"
            logging.error(error_msg)
            raise DomainError(error_msg)
        feature_map = self.reduce(self.backbone(patches))
        return feature_map.flatten(2).transpose(1, 2)

    def fuse(
        self, templates: Sequence[torch.Tensor], search: torch.Tensor
    ) -> Tuple[List[torch.Tensor], torch.Tensor, List[torch.Tensor]]:
        """Run the fusion layers over embedded templates and search; also returns every attention map."""
        for t in templates:
            if t.shape != search.shape:
                error_msg = f"Template features {tuple(t.shape)} do not match search {tuple(search.shape)}"
                logging.error(error_msg)
                raise DomainError(error_msg)

        pos = self.positional(search)
        templates = list(templates)
        attentions: List[torch.Tensor] = []
        for layer in self.fusion:
            templates, search, weights = layer(templates, search, pos)
            attentions.extend(weights)
        return templates, search, attentions

    def forward(self, templates: Sequence[torch.Tensor], search: torch.Tensor) -> Tuple[List[FeatureGrid], FeatureGrid]:
        fused_templates, fused_search, _ = self.fuse([self.embed(t) for t in templates], self.embed(search))
        spatial = self.cfg.spatial
        return [FeatureGrid(data=t, spatial=spatial) for t in fused_templates], FeatureGrid(data=fused_search, spatial=spatial)


def iem_encode(
    encoder: ImageEncoder, templates: Sequence[torch.Tensor], search: torch.Tensor
) -> Tuple[List[FeatureGrid], FeatureGrid]:
    """Encode template patches and a search patch into fused (HW, C) feature grids."""
    return encoder(templates, search)
