# training/schedule.py
from typing import Iterable

import torch
from torch.optim.lr_scheduler import MultiStepLR

from ditra.training.config import TrainConfig


def learning_rate_at(cfg: TrainConfig, phase: int, epoch: int) -> float:
    """Learning rate in effect during `epoch` (1-indexed) of a phase."""
    if epoch <= cfg.decay_epoch(phase):
        return cfg.lr
    return cfg.lr / cfg.lr_decay_factor


def make_optimizer(params: Iterable[torch.nn.Parameter], cfg: TrainConfig) -> torch.optim.Adam:
    return torch.optim.Adam(params, lr=cfg.lr)


def make_scheduler(optimizer: torch.optim.Optimizer, cfg: TrainConfig, phase: int) -> MultiStepLR:
    """Step decay, stepped once per epoch."""
    return MultiStepLR(optimizer, milestones=[cfg.decay_epoch(phase)], gamma=1.0 / cfg.lr_decay_factor)
