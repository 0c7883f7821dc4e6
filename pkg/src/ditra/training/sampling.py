# training/sampling.py
import logging
import math
from typing import List, Literal, Sequence, Tuple

import numpy as np
import torch
from pydantic import BaseModel, ConfigDict, Field, model_validator

from ditra.errors import DomainError
from ditra.geom.boxes import BoundingBox
from ditra.geom.cells import box_to_cell_mask
from ditra.geom.crop import crop_resize
from ditra.seqgen.render import SequenceRecord
from ditra.training.config import TrainConfig

PoolName = Literal["transparent", "opaque"]


class TrainingPools(BaseModel):
    """Transparent and opaque training sequences."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    transparent: List[SequenceRecord] = []
    opaque: List[SequenceRecord] = []


class Phase1Plan(BaseModel):
    pool: PoolName
    seq_index: int
    search_frame: int
    template_frames: Tuple[int, int]


class Phase1Sample(BaseModel):
    """
    A search patch with its target box and GT cell mask, plus two templates
    from the same sequence within the template window of the search frame.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True)

    seq_id: str
    pool: PoolName
    search_frame: int
    template_frames: Tuple[int, int]
    search_patch: np.ndarray
    search_box: BoundingBox
    cell_mask: np.ndarray
    template_patches: Tuple[np.ndarray, np.ndarray]
    template_boxes: Tuple[BoundingBox, BoundingBox]
    window: int = 200

    @model_validator(mode="after")
    def _check_window(self) -> "Phase1Sample":
        for frame in self.template_frames:
            if abs(frame - self.search_frame) > self.window:
                raise ValueError(f"template frame {frame} is more than {self.window} frames from {self.search_frame}")
        return self


class Phase2Plan(BaseModel):
    template_seq: int
    template_frame: int
    search_seq: int
    search_frame: int
    label: int = Field(ge=0, le=1)


class Phase2Sample(BaseModel):
    """A template and a search patch; label 1 iff both come from the same sequence."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    template_seq_id: str
    search_seq_id: str
    template_patch: np.ndarray
    template_box: BoundingBox
    search_patch: np.ndarray
    label: int = Field(ge=0, le=1)

    @model_validator(mode="after")
    def _check_label(self) -> "Phase2Sample":
        if (self.label == 1) != (self.template_seq_id == self.search_seq_id):
            raise ValueError("label must be 1 exactly for same-sequence pairs")
        return self


def _annotated_frames(record: SequenceRecord) -> np.ndarray:
    return np.array([i for i, box in enumerate(record.target_boxes) if box is not None])


def jittered_crop_box(box: BoundingBox, rng: np.random.Generator, cfg: TrainConfig) -> BoundingBox:
    """Box the search region is centred on: shifted by up to half the box size and log-normally rescaled."""
    size = math.sqrt(box.w * box.h)
    dx, dy = cfg.center_jitter * rng.uniform(-0.5, 0.5, size=2) * size
    scale = math.exp(cfg.scale_jitter * rng.standard_normal())
    w, h = box.w * scale, box.h * scale
    return BoundingBox(x=box.cx + dx - 0.5 * w, y=box.cy + dy - 0.5 * h, w=w, h=h)


def crop_around(
    frame: np.ndarray, box: BoundingBox, centre_box: BoundingBox, context: float, size: int
) -> Tuple[np.ndarray, BoundingBox]:
    """Crop the region around `centre_box` and return it with `box` in patch pixels."""
    patch, transform = crop_resize(frame, centre_box, context, size)
    return patch, transform.image_to_patch(box).clip_to(size, size)


def plan_phase1(pools: TrainingPools, rng: np.random.Generator, cfg: TrainConfig) -> Phase1Plan:
    """Pick the pool (by the mix ratio), the sequence, the search frame and two template frames."""
    fraction = cfg.transparent_fraction
    if fraction > 0 and not pools.transparent:
        error_msg = "Transparent training pool is empty"
        logging.error(error_msg)
        raise DomainError(error_msg)
    if fraction < 1 and not pools.opaque:
        error_msg = "Opaque training pool is empty"
        logging.error(error_msg)
        raise DomainError(error_msg)

    pool: PoolName = "transparent" if rng.random() < fraction else "opaque"
    records = pools.transparent if pool == "transparent" else pools.opaque
    seq_index = int(rng.integers(len(records)))
    frames = _annotated_frames(records[seq_index])

    search_frame = int(rng.choice(frames))
    window = frames[np.abs(frames - search_frame) <= cfg.template_window]
    first, second = (int(f) for f in rng.choice(window, size=2))
    return Phase1Plan(pool=pool, seq_index=seq_index, search_frame=search_frame, template_frames=(first, second))


def sample_phase1(
    pools: TrainingPools, rng: np.random.Generator, cfg: TrainConfig, size: int, context: float, stride: int
) -> Phase1Sample:
    plan = plan_phase1(pools, rng, cfg)
    record = (pools.transparent if plan.pool == "transparent" else pools.opaque)[plan.seq_index]

    templates, template_boxes = [], []
    for frame in plan.template_frames:
        box = record.target_boxes[frame]
        patch, patch_box = crop_around(record.frames[frame], box, box, context, size)
        templates.append(patch)
        template_boxes.append(patch_box)

    box = record.target_boxes[plan.search_frame]
    search, search_box = crop_around(record.frames[plan.search_frame], box, jittered_crop_box(box, rng, cfg), context, size)
    grid = (size // stride, size // stride)
    cell_mask = box_to_cell_mask(search_box, grid, stride, ensure_nonempty=True).numpy()

    return Phase1Sample(
        seq_id=record.seq_id,
        pool=plan.pool,
        search_frame=plan.search_frame,
        template_frames=plan.template_frames,
        search_patch=search,
        search_box=search_box,
        cell_mask=cell_mask,
        template_patches=tuple(templates),
        template_boxes=tuple(template_boxes),
        window=cfg.template_window,
    )


def plan_phase2(records: Sequence[SequenceRecord], rng: np.random.Generator) -> Phase2Plan:
    """Positive and negative pairs with equal probability; negatives pair two different sequences."""
    if len(records) < 2:
        error_msg = f"Phase-2 sampling needs at least two sequences, got {len(records)}"
        logging.error(error_msg)
        raise DomainError(error_msg)

    label = int(rng.random() < 0.5)
    template_seq = int(rng.integers(len(records)))
    if label:
        search_seq = template_seq
    else:
        search_seq = int(rng.integers(len(records) - 1))
        if search_seq >= template_seq:
            search_seq += 1
    template_frame = int(rng.choice(_annotated_frames(records[template_seq])))
    search_frame = int(rng.choice(_annotated_frames(records[search_seq])))
    return Phase2Plan(
        template_seq=template_seq,
        template_frame=template_frame,
        search_seq=search_seq,
        search_frame=search_frame,
        label=label,
    )


def sample_phase2(
    records: Sequence[SequenceRecord], rng: np.random.Generator, cfg: TrainConfig, size: int, context: float
) -> Phase2Sample:
    plan = plan_phase2(records, rng)
    template_record = records[plan.template_seq]
    search_record = records[plan.search_seq]

    box = template_record.target_boxes[plan.template_frame]
    template, template_box = crop_around(template_record.frames[plan.template_frame], box, box, context, size)
    box = search_record.target_boxes[plan.search_frame]
    search, _ = crop_around(search_record.frames[plan.search_frame], box, jittered_crop_box(box, rng, cfg), context, size)

    return Phase2Sample(
        template_seq_id=template_record.seq_id,
        search_seq_id=search_record.seq_id,
        template_patch=template,
        template_box=template_box,
        search_patch=search,
        label=plan.label,
    )


def boxes_tensor(boxes: Sequence[BoundingBox], device: str = "cpu") -> torch.Tensor:
    return torch.tensor([box.as_tuple() for box in boxes], dtype=torch.float32, device=device)
