# tests/tracker/conftest.py
import numpy as np
import pytest
import torch

from ditra.geom.boxes import BoundingBox
from ditra.model.config import ModelConfig
from ditra.model.network import DiTraNetwork
from ditra.seqgen.render import SequenceRecord


@pytest.fixture
def small_model():
    torch.manual_seed(0)
    return DiTraNetwork(ModelConfig(input_size=64, channels=32, heads=4, fusion_layers=1)).eval()


@pytest.fixture
def moving_record():
    """A bright square drifting right over noise, 12 frames of 96 x 128."""
    rng = np.random.default_rng(3)
    frames, boxes = [], []
    for t in range(12):
        frame = rng.integers(0, 60, size=(96, 128, 3)).astype(np.uint8)
        x = 20 + 4 * t
        frame[40:60, x : x + 20] = 230
        frames.append(frame)
        boxes.append(BoundingBox(x=x, y=40, w=20, h=20))
    return SequenceRecord(seq_id="seq-0001", frames=frames, target_boxes=boxes)


@pytest.fixture
def static_record():
    """One frame of a bright square over noise, repeated 15 times."""
    rng = np.random.default_rng(4)
    frame = rng.integers(0, 60, size=(96, 128, 3)).astype(np.uint8)
    frame[36:60, 52:76] = 230
    box = BoundingBox(x=52, y=36, w=24, h=24)
    return SequenceRecord(seq_id="seq-0002", frames=[frame] * 15, target_boxes=[box] * 15)
