# training/trainer.py
import csv
import logging
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

import numpy as np
import torch
from pydantic import BaseModel

from ditra.errors import UsageError
from ditra.model.checkpoint import load_checkpoint, save_checkpoint
from ditra.model.encoder import preprocess_patches
from ditra.model.network import DiTraNetwork, TemplateInput
from ditra.seqgen.render import SequenceRecord
from ditra.training.config import TrainConfig
from ditra.training.losses import loss_phase1, loss_phase2
from ditra.training.sampling import (
    Phase1Sample,
    Phase2Sample,
    TrainingPools,
    boxes_tensor,
    sample_phase1,
    sample_phase2,
)
from ditra.training.schedule import make_optimizer, make_scheduler

PHASE1_COLUMNS = ["step", "loss_bb", "loss_aux", "lr"]
PHASE2_COLUMNS = ["step", "loss_score", "lr"]


class TrainResult(BaseModel):
    checkpoint: Path
    log: Path
    steps: int
    last_loss: float


def _embed_batch(model: DiTraNetwork, patches: Sequence[np.ndarray], device: str) -> torch.Tensor:
    dtype = next(model.parameters()).dtype
    return model.embed(preprocess_patches(np.stack(patches), dtype=dtype).to(device))


def phase1_forward(model: DiTraNetwork, batch: Sequence[Phase1Sample], cfg: TrainConfig, device: str = "cpu"):
    """Forward one phase-1 batch; returns (total loss, logged parts)."""
    templates = []
    for k in range(2):
        embedding = _embed_batch(model, [s.template_patches[k] for s in batch], device)
        boxes = boxes_tensor([s.template_boxes[k] for s in batch], device)
        templates.append(TemplateInput(embedding=embedding, box=boxes, ident=k))
    search = _embed_batch(model, [s.search_patch for s in batch], device)

    output = model(templates, search)
    target = boxes_tensor([s.search_box for s in batch], device)
    cell_mask = torch.from_numpy(np.stack([s.cell_mask for s in batch])).to(device)
    size = float(model.cfg.input_size)
    return loss_phase1(output, target, cell_mask, cfg, (size, size), use_aux=not model.cfg.disable_dis)


def phase2_scores(model: DiTraNetwork, batch: Sequence[Phase2Sample], device: str = "cpu") -> Tuple[torch.Tensor, torch.Tensor]:
    """SPM confidences of the predicted boxes; only the SPM part carries gradients."""
    with torch.no_grad():
        embedding = _embed_batch(model, [s.template_patch for s in batch], device)
        template = TemplateInput(embedding=embedding, box=boxes_tensor([s.template_box for s in batch], device))
        output = model([template], _embed_batch(model, [s.search_patch for s in batch], device))
    return model.score(output)


def _freeze_for_phase(model: DiTraNetwork, phase: int) -> List[torch.nn.Parameter]:
    """Put the trained part in train mode and freeze the rest; returns the trainable parameters."""
    model.eval()
    model.spm.requires_grad_(phase == 2)
    for module in model.non_spm_modules():
        module.requires_grad_(phase == 1)
        if phase == 1:
            module.train()
    if phase == 2:
        model.spm.train()
        return model.spm_parameters()
    return [p for module in model.non_spm_modules() for p in module.parameters()]


def train_phase1(
    model: DiTraNetwork,
    pools: TrainingPools,
    cfg: TrainConfig,
    out_dir: Path,
    seed: int = 0,
    device: str = "cpu",
) -> TrainResult:
    """Train everything except the SPM on localisation and aux mask losses."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(seed)
    torch.manual_seed(seed)

    model.to(device)
    optimizer = make_optimizer(_freeze_for_phase(model, 1), cfg)
    scheduler = make_scheduler(optimizer, cfg, 1)
    size, context, stride = model.cfg.input_size, model.cfg.context, model.cfg.stride

    log_path = out_dir / "train_phase1.csv"
    step, last = 0, float("nan")
    logging.info(f"Phase 1: {cfg.phase1_epochs} epoch(s) x {cfg.steps_per_epoch} step(s), batch {cfg.batch_size}")
    with open(log_path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(PHASE1_COLUMNS)
        for epoch in range(1, cfg.phase1_epochs + 1):
            for _ in range(cfg.steps_per_epoch):
                batch = [sample_phase1(pools, rng, cfg, size, context, stride) for _ in range(cfg.batch_size)]
                loss, parts = phase1_forward(model, batch, cfg, device)

                optimizer.zero_grad()
                loss.backward()
                optimizer.step()

                step += 1
                last = float(loss.detach())
                writer.writerow([step, f"{parts['loss_bb']:.6f}", f"{parts['loss_aux']:.6f}", optimizer.param_groups[0]["lr"]])
            scheduler.step()
            logging.debug(f"Phase 1 epoch {epoch}: loss {last:.4f}")

    model.eval()
    checkpoint = save_checkpoint(out_dir / "phase1.pt", model, phase=1, extra={"steps": step, "seed": seed})
    return TrainResult(checkpoint=checkpoint, log=log_path, steps=step, last_loss=last)


def train_phase2(
    checkpoint: Optional[Path],
    records: Sequence[SequenceRecord],
    cfg: TrainConfig,
    out_dir: Path,
    seed: int = 0,
    device: str = "cpu",
) -> Tuple[DiTraNetwork, TrainResult]:
    """Train only the SPM on same-sequence versus different-sequence pairs, starting from phase 1."""
    if checkpoint is None or not Path(checkpoint).is_file():
        error_msg = f"Phase 2 needs a phase-1 checkpoint, got {checkpoint}"
        logging.error(error_msg)
        raise UsageError(error_msg)

    model, info = load_checkpoint(checkpoint)
    logging.info(f"Phase 2 starts from the phase-{info['phase']} checkpoint {checkpoint}")

    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(seed)
    torch.manual_seed(seed)

    model.to(device)
    optimizer = make_optimizer(_freeze_for_phase(model, 2), cfg)
    scheduler = make_scheduler(optimizer, cfg, 2)
    size, context = model.cfg.input_size, model.cfg.context

    log_path = out_dir / "train_phase2.csv"
    step, last = 0, float("nan")
    with open(log_path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(PHASE2_COLUMNS)
        for epoch in range(1, cfg.phase2_epochs + 1):
            for _ in range(cfg.steps_per_epoch):
                batch = [sample_phase2(records, rng, cfg, size, context) for _ in range(cfg.batch_size)]
                labels = torch.tensor([s.label for s in batch], dtype=torch.float32, device=device)
                scores, degenerate = phase2_scores(model, batch, device)

                step += 1
                keep = ~degenerate
                if not keep.any():
                    logging.warning(f"Phase 2 step {step}: every predicted box is empty, skipped")
                    writer.writerow([step, "nan", optimizer.param_groups[0]["lr"]])
                    continue
                loss = loss_phase2(scores[keep], labels[keep])
                optimizer.zero_grad()
                loss.backward()
                optimizer.step()

                last = float(loss.detach())
                writer.writerow([step, f"{last:.6f}", optimizer.param_groups[0]["lr"]])
            scheduler.step()
            logging.debug(f"Phase 2 epoch {epoch}: loss {last:.4f}")

    model.eval()
    saved = save_checkpoint(out_dir / "phase2.pt", model, phase=2, extra={"steps": step, "seed": seed})
    return model, TrainResult(checkpoint=saved, log=log_path, steps=step, last_loss=last)
