# model/network.py
import logging
from typing import Dict, List, Optional, Sequence

import torch
import torch.nn as nn
from pydantic import BaseModel, ConfigDict

from ditra.errors import DomainError
from ditra.model.branches import DistractorBranch, PoseBranch, TemplateEncoder, crop_batch
from ditra.model.config import ModelConfig
from ditra.model.encoder import ImageEncoder
from ditra.model.heads import AuxMaskHead, CornerHead
from ditra.model.spm import ScorePredictor
from ditra.model.types import FeatureGrid, TemplateFeatures


class TemplateInput(BaseModel):
    """An embedded template: (B, HW, C) backbone features, (B, 4) patch box and an id for logging."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    embedding: torch.Tensor
    box: torch.Tensor
    ident: int = 0


class NetworkOutput(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    boxes: torch.Tensor
    degenerate: torch.Tensor
    aux_logits: torch.Tensor
    search: FeatureGrid
    templates: List[TemplateFeatures]
    initial_cropped: List[torch.Tensor]
    prob_tl: torch.Tensor
    prob_br: torch.Tensor
    branch_log: Dict[str, List[int]]
    attention: Dict[str, object] = {}


class DiTraNetwork(nn.Module):
    """Image encoder, distractor-aware and pose-aware branches, corner head, aux mask head and SPM."""

    def __init__(self, cfg: ModelConfig):
        super().__init__()
        self.cfg = cfg
        self.encoder = ImageEncoder(cfg)
        self.template_encoder = TemplateEncoder(cfg.channels, cfg.stride)
        self.distractor = DistractorBranch(cfg.channels, cfg.heads, cfg.ffn_factor)
        self.pose = PoseBranch(cfg.channels, cfg.heads, cfg.ffn_factor)
        self.head = CornerHead(cfg.channels, cfg.stride)
        self.aux = AuxMaskHead(cfg.channels)
        self.spm = ScorePredictor(cfg.channels, cfg.heads, cfg.stride)

    def spm_parameters(self) -> List[nn.Parameter]:
        return list(self.spm.parameters())

    def non_spm_modules(self) -> List[nn.Module]:
        return [self.encoder, self.template_encoder, self.distractor, self.pose, self.head, self.aux]

    def embed(self, patches: torch.Tensor) -> torch.Tensor:
        return self.encoder.embed(patches)

    def forward(
        self,
        templates: Sequence[TemplateInput],
        search_embedding: torch.Tensor,
        recent: Optional[TemplateInput] = None,
        return_attention: bool = False,
    ) -> NetworkOutput:
        """
        Localise the target in one search region. `templates[0]` is the
        initial template; `recent` only feeds the distractor branch and is
        dropped when the recent-template ablation is on.
        """
        if not templates:
            error_msg = "At least the initial template is required"
            logging.error(error_msg)
            raise DomainError(error_msg)

        cfg = self.cfg
        spatial = cfg.spatial
        use_recent = recent is not None and not cfg.disable_recent
        streams = list(templates) + ([recent] if use_recent else [])

        fused, search, fusion_attn = self.encoder.fuse([t.embedding for t in templates], search_embedding)
        if use_recent:
            # the recent template sees the search but its updated search tokens are dropped
            recent_fused, _, recent_attn = self.encoder.fuse([recent.embedding], search_embedding)
            fused = list(fused) + recent_fused
            fusion_attn = list(fusion_attn) + recent_attn
        pos = self.encoder.positional(search)

        features: List[TemplateFeatures] = []
        for entry, grid in zip(streams, fused):
            encoding = self.template_encoder(entry.box, spatial)
            features.append(
                TemplateFeatures(
                    full=FeatureGrid(data=grid, spatial=spatial),
                    cropped=crop_batch(grid, entry.box, spatial, cfg.stride),
                    encoding=FeatureGrid(data=encoding, spatial=spatial),
                    box=entry.box,
                )
            )
        pose_features = features[: len(templates)]

        branch_log = {"distractor": [], "pose": []}
        attention: Dict[str, object] = {}
        if return_attention:
            attention["fusion"] = fusion_attn

        # distractor-aware features
        if cfg.disable_dis:
            f_dis = torch.zeros_like(search)
        else:
            f_dis, w = self.distractor(search, [(f.full.data, f.encoding.data) for f in features], pos)
            branch_log["distractor"] = [entry.ident for entry in streams]
            if return_attention:
                attention["distractor"] = w

        # pose-aware features, never fed by the recent template
        if cfg.disable_pos:
            f_pos = torch.zeros_like(search)
        else:
            f_pos, w = self.pose(search, [f.cropped for f in pose_features], pos)
            branch_log["pose"] = [entry.ident for entry in templates]
            if return_attention:
                attention["pose"] = w

        f_loc = FeatureGrid(data=f_pos + f_dis, spatial=spatial)
        boxes, degenerate, prob_tl, prob_br = self.head(f_loc.as_map())

        return NetworkOutput(
            boxes=boxes,
            degenerate=degenerate,
            aux_logits=self.aux(f_dis),
            search=FeatureGrid(data=search, spatial=spatial),
            templates=features,
            initial_cropped=features[0].cropped,
            prob_tl=prob_tl,
            prob_br=prob_br,
            branch_log=branch_log,
            attention=attention,
        )

    def score(self, output: NetworkOutput, boxes: Optional[torch.Tensor] = None):
        """SPM confidence for `boxes` (default: the predicted ones) in the search region of `output`."""
        boxes = output.boxes if boxes is None else boxes
        pos = self.encoder.positional(output.search.data)
        return self.spm(output.search.data, boxes, output.initial_cropped, self.cfg.spatial, pos)
