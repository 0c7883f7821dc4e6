# tracker/state.py
import logging
from typing import Dict, List, Optional

import numpy as np
import torch
from pydantic import BaseModel, ConfigDict, Field, model_validator

from ditra.geom.boxes import BoundingBox
from ditra.geom.crop import crop_resize

CONFIDENCE_GATE = 0.5
APPEND_INTERVAL = 10


class TemplateEntry(BaseModel):
    """
    A stored target view: the square patch, the target box in patch pixels and
    the tracked frame it was cut from. `embedding` caches the backbone features
    once the tracker has computed them.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True)

    patch: np.ndarray
    box: BoundingBox
    birth_frame: int = Field(ge=0)
    embedding: Optional[torch.Tensor] = None

    @model_validator(mode="after")
    def _check_entry(self) -> "TemplateEntry":
        size = self.patch.shape[0]
        if self.patch.ndim != 3 or self.patch.shape[1] != size or self.patch.shape[2] != 3:
            raise ValueError(f"template patch must be square RGB, got {self.patch.shape}")
        if self.box.x < 0 or self.box.y < 0 or self.box.x2 > size or self.box.y2 > size:
            raise ValueError(f"template box {self.box.as_tuple()} leaves the {size}px patch")
        return self


class TrackerState(BaseModel):
    """Template set (slot 0 is the initial template), recent template and last result."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    templates: List[TemplateEntry]
    recent_template: Optional[TemplateEntry] = None
    last_box: BoundingBox
    frame_index: int = 0
    last_score: float = 1.0
    num_templates: int = Field(default=6, ge=1)
    branch_log: List[Dict[str, object]] = []

    @model_validator(mode="after")
    def _check_state(self) -> "TrackerState":
        if not self.templates:
            raise ValueError("tracker state needs the initial template")
        if len(self.templates) > self.num_templates:
            raise ValueError(f"{len(self.templates)} templates exceed the limit of {self.num_templates}")
        return self

    @property
    def birth_frames(self) -> List[int]:
        return [entry.birth_frame for entry in self.templates]


def extract_template(frame: np.ndarray, box: BoundingBox, frame_index: int, context: float, size: int) -> TemplateEntry:
    """Cut a template patch with the search-region crop geometry."""
    patch, transform = crop_resize(frame, box, context, size)
    patch_box = transform.image_to_patch(box).clip_to(size, size)
    return TemplateEntry(patch=patch, box=patch_box, birth_frame=frame_index)


def init_state(
    frame: np.ndarray, gt_box: BoundingBox, context: float, size: int, num_templates: int = 6
) -> TrackerState:
    initial = extract_template(frame, gt_box, 0, context, size)
    return TrackerState(
        templates=[initial],
        recent_template=initial,
        last_box=gt_box,
        frame_index=0,
        last_score=1.0,
        num_templates=num_templates,
    )


def update_templates(
    state: TrackerState,
    frame: np.ndarray,
    box: BoundingBox,
    score: float,
    context: float,
    size: int,
) -> TrackerState:
    """
    Score-gated template maintenance for the frame just tracked
    (`state.frame_index`). Above the gate the recent template is refreshed
    every frame and, every APPEND_INTERVAL frames, the crop joins the set; the
    oldest non-initial template goes when the set is full.
    """
    if score <= CONFIDENCE_GATE:
        # debug
        logging.debug(f"Frame {state.frame_index}: score {score:.3f} keeps the template set")
        return state

    entry = extract_template(frame, box, state.frame_index, context, size)
    state.recent_template = entry

    if state.frame_index > 0 and state.frame_index % APPEND_INTERVAL == 0:
        state.templates.append(entry)
        if len(state.templates) > state.num_templates:
            oldest = min(range(1, len(state.templates)), key=lambda i: state.templates[i].birth_frame)
            evicted = state.templates.pop(oldest)
            logging.debug(f"Frame {state.frame_index}: evicted template born at frame {evicted.birth_frame}")
    return state
