# tests/training/conftest.py
import pytest
import torch

from ditra.model.config import ModelConfig
from ditra.model.network import DiTraNetwork
from ditra.seqgen.attributes import AttributeSpec
from ditra.seqgen.backgrounds import ProceduralBackgrounds
from ditra.seqgen.render import render_sequence


@pytest.fixture
def tiny_cfg():
    return ModelConfig(input_size=64, channels=16, heads=2, fusion_layers=1)


@pytest.fixture
def tiny_model(tiny_cfg):
    torch.manual_seed(0)
    return DiTraNetwork(tiny_cfg)


@pytest.fixture(scope="session")
def rendered_records():
    backgrounds = ProceduralBackgrounds(seed=0)
    records = []
    for i in range(4):
        spec = AttributeSpec(
            transparency_level=1 + i % 3,
            rotation_level=1,
            target_shape_id="bottle",
            background_id=f"proc-{i:06d}",
            frame_count=6,
            frame_height=96,
            frame_width=128,
            rng_seed=100 + i,
        )
        records.append(render_sequence(spec, backgrounds, seq_id=f"seq-{i:04d}"))
    return records

