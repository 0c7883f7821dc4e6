# seqgen/render.py
import logging
from typing import List, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, model_validator

from ditra.geom.boxes import BoundingBox
from ditra.geom.masks import BinaryMask, mask_bounding_box
from ditra.seqgen.attributes import AttributeSpec
from ditra.seqgen.backgrounds import BackgroundSource
from ditra.seqgen.compositing import apply_motion_blur, composite_layer, render_layer, render_occlusion
from ditra.seqgen.sprites import random_sprite
from ditra.seqgen.trajectory import Trajectory, hermite_trajectory


class SequenceRecord(BaseModel):
    """
    One annotated sequence. Distractor lists are empty for sequences without a
    distractor; a distractor box is None on frames where it is out of view.
    A target box is None on frames with zero-size ground truth (never frame 0).
    Mask lists are empty for sequences read without masks.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True)

    seq_id: str
    frames: List[np.ndarray]
    target_boxes: List[Optional[BoundingBox]]
    distractor_boxes: List[Optional[BoundingBox]] = []
    target_masks: List[BinaryMask] = []
    distractor_masks: List[BinaryMask] = []
    spec: Optional[AttributeSpec] = None

    @model_validator(mode="after")
    def _check_lengths(self) -> "SequenceRecord":
        n = len(self.frames)
        if len(self.target_boxes) != n:
            raise ValueError(f"{self.seq_id}: {len(self.target_boxes)} boxes for {n} frames")
        if n and self.target_boxes[0] is None:
            raise ValueError(f"{self.seq_id}: frame 0 has no target box")
        for name in ("distractor_boxes", "target_masks", "distractor_masks"):
            length = len(getattr(self, name))
            if length not in (0, n):
                raise ValueError(f"{self.seq_id}: {name} has {length} entries for {n} frames")
        return self

    @property
    def frame_count(self) -> int:
        return len(self.frames)

    @property
    def has_distractor(self) -> bool:
        return bool(self.distractor_boxes)


def rotation_angle(initial: float, spec: AttributeSpec, frame_index: int) -> float:
    """Sprite orientation in degrees at a frame, wrapped to [0, 360)."""
    return (initial + spec.rotation_degrees * frame_index) % 360.0


def distractor_offsets(
    rng: np.random.Generator, spec: AttributeSpec, target_width: float
) -> np.ndarray:
    """
    Per-frame distractor offset from the target centre: a fixed offset of
    0.5 to 1.5 target widths for `follow`, shrinking linearly through zero to
    its mirror image for `crossing`.
    """
    theta = rng.uniform(0.0, 2.0 * np.pi)
    distance = rng.uniform(0.5, 1.5) * target_width
    offset = distance * np.array([np.cos(theta), np.sin(theta)])
    if spec.distractor_mode == "crossing":
        ramp = 1.0 - 2.0 * np.linspace(0.0, 1.0, spec.frame_count)
        return ramp[:, None] * offset[None, :]
    return np.repeat(offset[None, :], spec.frame_count, axis=0)


def render_sequence(spec: AttributeSpec, backgrounds: BackgroundSource, seq_id: str = "seq") -> SequenceRecord:
    """
    Render every frame of `spec`. Ground truth is taken from the unblurred
    silhouettes before occlusion stripes are drawn.
    """
    height, width = spec.frame_height, spec.frame_width
    rng = np.random.default_rng(spec.rng_seed)

    # sprites and motion
    target = random_sprite(rng, spec.target_shape_id, (height, width))
    margin = target.radius + 1.0
    trajectory: Trajectory = hermite_trajectory(
        rng, spec.frame_count, (margin, margin, width - margin, height - margin)
    )
    directions = trajectory.directions()
    target_angle0 = float(rng.uniform(0.0, 360.0))

    distractor = None
    if spec.distractor:
        distractor = random_sprite(rng, spec.distractor_shape_id, (height, width))
        offsets = distractor_offsets(rng, spec, target.width)
        distractor_angle0 = float(rng.uniform(0.0, 360.0))

    # debug
    logging.debug(f"Rendering {seq_id}: {spec.frame_count} frames, alpha={spec.alpha}")

    rim = not spec.opaque
    frames, target_boxes, target_masks = [], [], []
    distractor_boxes, distractor_masks = [], []
    for i in range(spec.frame_count):
        image = backgrounds.frame(spec.background_id, i, height, width).astype(np.float32)

        # distractor is drawn behind the target
        if distractor is not None:
            center = trajectory.positions[i] + offsets[i]
            angle = rotation_angle(distractor_angle0, spec, i)
            layer = render_layer(distractor, spec.alpha, angle, tuple(center), height, width, rim=rim)
            if spec.blur_present:
                layer = apply_motion_blur(layer, spec.blur_level, directions[i])
            image = composite_layer(image, layer)
            distractor_masks.append(layer.mask)
            distractor_boxes.append(mask_bounding_box(layer.mask))

        angle = rotation_angle(target_angle0, spec, i)
        layer = render_layer(target, spec.alpha, angle, tuple(trajectory.positions[i]), height, width, rim=rim)
        if spec.blur_present:
            layer = apply_motion_blur(layer, spec.blur_level, directions[i])
        image = composite_layer(image, layer)
        target_masks.append(layer.mask)
        target_boxes.append(mask_bounding_box(layer.mask))

        # stripes go over everything, after ground truth is recorded
        frame = np.rint(image).astype(np.uint8)
        if spec.occlusion_present:
            frame = render_occlusion(frame, spec.occlusion_stripes, i)
        frames.append(frame)

    return SequenceRecord(
        seq_id=seq_id,
        frames=frames,
        target_boxes=target_boxes,
        distractor_boxes=distractor_boxes,
        target_masks=target_masks,
        distractor_masks=distractor_masks,
        spec=spec,
    )
