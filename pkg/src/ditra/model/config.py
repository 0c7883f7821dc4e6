# model/config.py
from typing import Literal

from pydantic import BaseModel, ConfigDict, Field, model_validator


class ModelConfig(BaseModel):
    """
    Network hyper-parameters. The defaults are the desk-scale model; use
    `ModelConfig.full_scale()` for the full-size one.
    """

    model_config = ConfigDict(extra="forbid", frozen=True)

    input_size: int = Field(default=128, gt=0)
    stride: int = Field(default=16, gt=0)
    channels: int = Field(default=64, gt=0)
    heads: int = Field(default=8, gt=0)
    fusion_layers: int = Field(default=2, ge=0)
    num_templates: int = Field(default=6, ge=1)
    ffn_factor: int = Field(default=4, ge=1)
    backbone: Literal["desk", "resnet50"] = "desk"
    pretrained: bool = False
    # search and template crops share one context factor
    context: float = Field(default=4.0, ge=1.0)

    disable_dis: bool = False
    disable_pos: bool = False
    disable_recent: bool = False

    @model_validator(mode="after")
    def _check_shapes(self) -> "ModelConfig":
        if self.input_size % self.stride:
            raise ValueError(f"input_size {self.input_size} is not a multiple of stride {self.stride}")
        if self.channels % self.heads:
            raise ValueError(f"channels {self.channels} not divisible by heads {self.heads}")
        if self.channels % 8:
            raise ValueError(f"channels {self.channels} must be a multiple of 8 for the corner head")
        return self

    @classmethod
    def full_scale(cls, **overrides) -> "ModelConfig":
        values = dict(input_size=320, channels=256, fusion_layers=4, backbone="resnet50")
        values.update(overrides)
        return cls(**values)

    @property
    def feature_size(self) -> int:
        return self.input_size // self.stride

    @property
    def spatial(self) -> tuple[int, int]:
        return (self.feature_size, self.feature_size)

    @property
    def cells(self) -> int:
        return self.feature_size * self.feature_size

    def ablated(self, variant: str) -> "ModelConfig":
        """Copy with one ablation switched on: `dis`, `pos`, `rec` or `full`/`trs` (no model change)."""
        flags = {"dis": "disable_dis", "pos": "disable_pos", "rec": "disable_recent"}
        if variant in ("full", "trs"):
            return self
        if variant not in flags:
            raise ValueError(f"unknown ablation '{variant}'")
        return self.model_copy(update={flags[variant]: True})
