# model/backbone.py
import logging

import torch
import torch.nn as nn

from ditra.model.config import ModelConfig


def conv_bn_relu(in_planes: int, out_planes: int, stride: int = 1) -> nn.Sequential:
    return nn.Sequential(
        nn.Conv2d(in_planes, out_planes, kernel_size=3, stride=stride, padding=1, bias=False),
        nn.BatchNorm2d(out_planes),
        nn.ReLU(inplace=True),
    )


class DeskBackbone(nn.Module):
    """Four stride-2 stages (total stride 16), trained from scratch."""

    def __init__(self, widths=(16, 32, 64, 128)):
        super().__init__()
        stages = []
        in_planes = 3
        for width in widths:
            stages.append(nn.Sequential(conv_bn_relu(in_planes, width, stride=2), conv_bn_relu(width, width)))
            in_planes = width
        self.stages = nn.Sequential(*stages)
        self.out_channels = in_planes

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        return self.stages(x)


class ResNet50Backbone(nn.Module):
    """ResNet-50 truncated after its stride-16 stage."""

    def __init__(self, pretrained: bool = False):
        super().__init__()
        from torchvision.models import ResNet50_Weights, resnet50

        weights = ResNet50_Weights.IMAGENET1K_V2 if pretrained else None
        net = resnet50(weights=weights)
        self.body = nn.Sequential(
            net.conv1, net.bn1, net.relu, net.maxpool, net.layer1, net.layer2, net.layer3
        )
        self.out_channels = 1024

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        return self.body(x)


def build_backbone(cfg: ModelConfig) -> nn.Module:
    # debug
    logging.debug(f"Building {cfg.backbone} backbone")
    if cfg.backbone == "resnet50":
        return ResNet50Backbone(pretrained=cfg.pretrained)
    return DeskBackbone()
