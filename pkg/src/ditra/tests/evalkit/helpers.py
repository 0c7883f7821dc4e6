# tests/evalkit/helpers.py
import numpy as np

from ditra.geom.boxes import BoundingBox
from ditra.seqgen.attributes import AttributeSpec
from ditra.seqgen.render import SequenceRecord


def moving_record(seq_id, frame_count=10, speed=6.0, distractor=False, transparency=1):
    """A box moving right over blank frames; the distractor, if any, runs 30 px below it."""
    frames = [np.zeros((64, 96, 3), dtype=np.uint8)] * frame_count
    boxes = [BoundingBox(x=4 + speed * t, y=20, w=16, h=16) for t in range(frame_count)]
    spec = AttributeSpec(
        transparency_level=transparency,
        rotation_level=1,
        distractor=distractor,
        target_shape_id="bottle",
        distractor_shape_id="vase" if distractor else None,
        background_id="proc-000000",
        frame_count=max(frame_count, 2),
        frame_height=64,
        frame_width=96,
        rng_seed=0,
    )
    distractors = [b.shift(0, 30) for b in boxes] if distractor else []
    return SequenceRecord(seq_id=seq_id, frames=frames, target_boxes=boxes, distractor_boxes=distractors, spec=spec)
