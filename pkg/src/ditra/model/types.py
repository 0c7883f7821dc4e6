# model/types.py
from typing import List, Tuple

import torch
from pydantic import BaseModel, ConfigDict, model_validator


class FeatureGrid(BaseModel):
    """A batch of flattened feature maps: data is (B, H * W, C), row-major cells."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    data: torch.Tensor
    spatial: Tuple[int, int]

    @model_validator(mode="after")
    def _check_grid(self) -> "FeatureGrid":
        height, width = self.spatial
        if self.data.dim() != 3 or self.data.shape[1] != height * width:
            raise ValueError(f"feature data {tuple(self.data.shape)} does not match spatial {self.spatial}")
        if not torch.isfinite(self.data).all():
            raise ValueError("feature grid contains non-finite values")
        return self

    @property
    def channels(self) -> int:
        return int(self.data.shape[2])

    @property
    def cells(self) -> int:
        return int(self.data.shape[1])

    def as_map(self) -> torch.Tensor:
        """(B, C, H, W) view for convolutional heads."""
        height, width = self.spatial
        return self.data.transpose(1, 2).reshape(self.data.shape[0], self.channels, height, width)

    @classmethod
    def from_map(cls, feature_map: torch.Tensor) -> "FeatureGrid":
        batch, channels, height, width = feature_map.shape
        return cls(data=feature_map.flatten(2).transpose(1, 2), spatial=(height, width))


class TemplateFeatures(BaseModel):
    """
    Everything derived from one template: the fused full grid, the cropped
    target cells (one (hw, C) tensor per batch element), the template
    encoding and the box in template-patch pixels.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True)

    full: FeatureGrid
    cropped: List[torch.Tensor]
    encoding: FeatureGrid
    box: torch.Tensor

    @model_validator(mode="after")
    def _check_template(self) -> "TemplateFeatures":
        if self.encoding.spatial != self.full.spatial:
            raise ValueError("template encoding and features disagree on spatial size")
        if len(self.cropped) != self.full.data.shape[0]:
            raise ValueError("one cropped tensor per batch element expected")
        for rows in self.cropped:
            if rows.shape[0] > self.full.cells:
                raise ValueError("cropped template has more cells than the grid")
        return self
