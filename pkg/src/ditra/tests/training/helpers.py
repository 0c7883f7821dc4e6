# tests/training/helpers.py
import numpy as np

from ditra.geom.boxes import BoundingBox
from ditra.seqgen.render import SequenceRecord


def long_record(seq_id, frame_count=450):
    """A long sequence of one shared frame, for sampler statistics without rendering."""
    frame = np.zeros((32, 32, 3), dtype=np.uint8)
    box = BoundingBox(x=8, y=8, w=12, h=10)
    return SequenceRecord(seq_id=seq_id, frames=[frame] * frame_count, target_boxes=[box] * frame_count)
