# tracker/tracker.py
import logging
from typing import Optional, Protocol, Sequence, Tuple

import numpy as np
import torch

from ditra.errors import UsageError
from ditra.geom.boxes import BoundingBox
from ditra.geom.crop import crop_resize
from ditra.model.encoder import preprocess_patches
from ditra.model.network import DiTraNetwork, TemplateInput
from ditra.tracker.state import TemplateEntry, TrackerState, init_state, update_templates

# branch_log ident of the previous-frame template
RECENT_IDENT = -1


class Tracker(Protocol):
    def init(self, frame: np.ndarray, gt_box: BoundingBox) -> object: ...

    def track_frame(self, frame: np.ndarray) -> Tuple[BoundingBox, float]: ...


class DiTraTracker:
    """Online tracking loop around a trained network; one instance per sequence at a time."""

    def __init__(self, model: DiTraNetwork, device: str = "cpu"):
        self.model = model.to(device).eval()
        self.device = device
        self.cfg = model.cfg
        self.state: Optional[TrackerState] = None

    def init(self, frame: np.ndarray, gt_box: BoundingBox) -> TrackerState:
        """Start a run from the frame-0 ground truth, dropping any earlier history."""
        self.state = init_state(frame, gt_box, self.cfg.context, self.cfg.input_size, self.cfg.num_templates)
        logging.debug(f"Tracker initialised on {gt_box.as_tuple()}")
        return self.state

    def _embed(self, patch: np.ndarray) -> torch.Tensor:
        return self.model.embed(preprocess_patches(patch).to(self.device))

    def _template_input(self, entry: TemplateEntry, ident: int) -> TemplateInput:
        # embeddings are cached on the entry; patches never change after extraction
        if entry.embedding is None:
            entry.embedding = self._embed(entry.patch)
        box = torch.tensor([entry.box.as_tuple()], dtype=torch.float32, device=self.device)
        return TemplateInput(embedding=entry.embedding, box=box, ident=ident)

    @torch.no_grad()
    def track_frame(self, frame: np.ndarray) -> Tuple[BoundingBox, float]:
        """Localise the target in the next frame; returns the image-space box and its confidence."""
        state = self.state
        if state is None:
            error_msg = "track_frame called before init"
            logging.error(error_msg)
            raise UsageError(error_msg)

        state.frame_index += 1
        height, width = frame.shape[:2]

        # search region around the last box
        patch, transform = crop_resize(frame, state.last_box, self.cfg.context, self.cfg.input_size)
        search = self._embed(patch)

        templates = [self._template_input(entry, entry.birth_frame) for entry in state.templates]
        recent = None
        if state.recent_template is not None:
            recent = self._template_input(state.recent_template, RECENT_IDENT)

        output = self.model(templates, search, recent=recent)
        scores, _ = self.model.score(output)
        score = float(scores[0])

        patch_box = BoundingBox.from_xywh(output.boxes[0].tolist())
        box = transform.patch_to_image(patch_box).clip_to(height, width)

        state.branch_log.append({"frame": state.frame_index, **output.branch_log})
        state.last_box = box
        state.last_score = score
        update_templates(state, frame, box, score, self.cfg.context, self.cfg.input_size)
        return box, score


class OracleTracker:
    """Echoes the ground truth; the upper bound for any tracker."""

    def __init__(self, boxes: Sequence[Optional[BoundingBox]]):
        self.boxes = list(boxes)
        self.frame_index = 0
        self.last_box: Optional[BoundingBox] = None

    def init(self, frame: np.ndarray, gt_box: BoundingBox) -> None:
        self.frame_index = 0
        self.last_box = gt_box

    def track_frame(self, frame: np.ndarray) -> Tuple[BoundingBox, float]:
        if self.last_box is None:
            raise UsageError("track_frame called before init")
        self.frame_index += 1
        # keep the last box through frames without ground truth
        if self.boxes[self.frame_index] is not None:
            self.last_box = self.boxes[self.frame_index]
        return self.last_box, 1.0


class StaticTracker:
    """Reports the initial box on every frame."""

    def __init__(self):
        self.box: Optional[BoundingBox] = None

    def init(self, frame: np.ndarray, gt_box: BoundingBox) -> None:
        self.box = gt_box

    def track_frame(self, frame: np.ndarray) -> Tuple[BoundingBox, float]:
        if self.box is None:
            raise UsageError("track_frame called before init")
        return self.box, 1.0
