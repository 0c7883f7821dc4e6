# tests/model/conftest.py
import pytest
import torch

from ditra.model.config import ModelConfig
from ditra.model.network import DiTraNetwork, TemplateInput


@pytest.fixture
def small_cfg():
    return ModelConfig(input_size=64, channels=32, heads=4, fusion_layers=1)


@pytest.fixture
def net(small_cfg):
    torch.manual_seed(0)
    model = DiTraNetwork(small_cfg)
    model.eval()
    return model


@pytest.fixture
def make_templates():
    def _make(model, count, batch=2, seed=0):
        generator = torch.Generator().manual_seed(seed)
        size = model.cfg.input_size
        out = []
        for i in range(count):
            patches = torch.randn(batch, 3, size, size, generator=generator)
            box = torch.tensor([[16.0, 16.0, 32.0, 32.0]] * batch)
            out.append(TemplateInput(embedding=model.embed(patches), box=box, ident=i * 10))
        return out

    return _make
