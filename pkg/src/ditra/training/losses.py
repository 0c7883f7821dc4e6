# training/losses.py
import logging
from typing import Dict, Tuple

import torch
import torch.nn.functional as F

from ditra.errors import DomainError
from ditra.geom.box_ops import batched_giou, box_xywh_to_xyxy, normalized_l1
from ditra.model.network import NetworkOutput
from ditra.training.config import TrainConfig


def loss_bb(pred: torch.Tensor, target: torch.Tensor, cfg: TrainConfig, norm: Tuple[float, float]) -> torch.Tensor:
    """Weighted GIoU plus normalised L1 on (B, 4) xywh boxes, averaged over the batch."""
    giou = batched_giou(box_xywh_to_xyxy(pred), box_xywh_to_xyxy(target))
    l1 = normalized_l1(pred, target, norm)
    return (cfg.lambda_giou * (1.0 - giou) + cfg.lambda_l1 * l1).mean()


def loss_aux(logits: torch.Tensor, cell_mask: torch.Tensor) -> torch.Tensor:
    """Mean per-cell binary cross-entropy between aux logits and the GT cell mask."""
    logits = logits.reshape(logits.shape[0], -1)
    target = cell_mask.reshape(cell_mask.shape[0], -1).to(logits.dtype)
    if logits.shape != target.shape:
        error_msg = f"Aux logits {tuple(logits.shape)} do not match mask {tuple(target.shape)}"
        logging.error(error_msg)
        raise DomainError(error_msg)
    return F.binary_cross_entropy_with_logits(logits, target)


def loss_phase1(
    output: NetworkOutput,
    boxes: torch.Tensor,
    cell_mask: torch.Tensor,
    cfg: TrainConfig,
    norm: Tuple[float, float],
    use_aux: bool = True,
) -> Tuple[torch.Tensor, Dict[str, float]]:
    """Localisation loss plus the aux mask loss; the aux term is 0 when `use_aux` is off."""
    bb = loss_bb(output.boxes, boxes, cfg, norm)
    aux = loss_aux(output.aux_logits, cell_mask) if use_aux else bb.new_zeros(())
    total = bb + aux
    return total, {"loss_bb": float(bb.detach()), "loss_aux": float(aux.detach())}


def loss_phase2(scores: torch.Tensor, labels: torch.Tensor) -> torch.Tensor:
    """Binary cross-entropy of predicted confidences against same-sequence labels."""
    if torch.any((scores < 0) | (scores > 1)) or not torch.isfinite(scores).all():
        error_msg = "Scores must lie in [0, 1]"
        logging.error(error_msg)
        raise DomainError(error_msg)
    return F.binary_cross_entropy(scores, labels.to(scores.dtype))
