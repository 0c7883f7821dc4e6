# tests/training/test_losses.py
import math

import pytest
import torch

from ditra.errors import DomainError
from ditra.model.network import NetworkOutput
from ditra.training.config import TrainConfig
from ditra.training.losses import loss_aux, loss_bb, loss_phase1, loss_phase2

CFG = TrainConfig()


def boxes(*rows):
    return torch.tensor(rows, dtype=torch.float64)


def test_loss_bb_is_zero_for_a_perfect_box():
    b = boxes([10.0, 20.0, 30.0, 40.0])
    assert loss_bb(b, b, CFG, (320, 320)).item() == pytest.approx(0.0, abs=1e-12)


def test_loss_bb_worked_example():
    value = loss_bb(boxes([0.0, 0.0, 1.0, 1.0]), boxes([2.0, 0.0, 1.0, 1.0]), CFG, (320, 320)).item()
    assert value == pytest.approx(2 * 4 / 3 + 5 * (2 / 320) / 4, abs=1e-6)


def test_loss_bb_decreases_toward_the_target():
    target = boxes([50.0, 50.0, 20.0, 20.0])
    values = [loss_bb(boxes([50.0 - d, 50.0, 20.0, 20.0]), target, CFG, (128, 128)).item() for d in range(40, -1, -2)]
    assert all(a > b for a, b in zip(values, values[1:]))


def test_loss_aux_of_zero_logits_is_ln2():
    mask = torch.rand(2, 16) > 0.5
    value = loss_aux(torch.zeros(2, 16, 1, dtype=torch.float64), mask).item()
    assert value == pytest.approx(math.log(2.0), abs=1e-9)


def test_loss_aux_vanishes_for_confident_logits():
    mask = torch.rand(2, 16) > 0.5
    logits = torch.where(mask, 50.0, -50.0).double().unsqueeze(-1)
    assert loss_aux(logits, mask).item() < 1e-12


def test_loss_aux_shape_mismatch():
    with pytest.raises(DomainError):
        loss_aux(torch.zeros(2, 16, 1), torch.zeros(2, 9, dtype=torch.bool))


def test_loss_phase1_adds_its_parts():
    pred = boxes([10.0, 12.0, 20.0, 18.0], [5.0, 5.0, 30.0, 30.0])
    target = boxes([11.0, 12.0, 22.0, 18.0], [6.0, 4.0, 28.0, 31.0])
    logits = torch.randn(2, 16, 1, dtype=torch.float64)
    mask = torch.rand(2, 16) > 0.5
    output = NetworkOutput.model_construct(boxes=pred, aux_logits=logits)
    total, parts = loss_phase1(output, target, mask, CFG, (64, 64))
    expected = loss_bb(pred, target, CFG, (64, 64)) + loss_aux(logits, mask)
    assert total.item() == expected.item()
    assert parts["loss_bb"] + parts["loss_aux"] == pytest.approx(total.item(), abs=1e-12)


def test_loss_phase1_is_zero_for_a_perfect_prediction():
    target = boxes([10.0, 12.0, 20.0, 18.0])
    mask = torch.rand(1, 16) > 0.5
    logits = torch.where(mask, 60.0, -60.0).double().unsqueeze(-1)
    output = NetworkOutput.model_construct(boxes=target.clone(), aux_logits=logits)
    total, _ = loss_phase1(output, target, mask, CFG, (64, 64))
    assert total.item() == pytest.approx(0.0, abs=1e-12)


def test_loss_phase1_without_aux():
    target = boxes([10.0, 12.0, 20.0, 18.0])
    output = NetworkOutput.model_construct(boxes=target.clone(), aux_logits=torch.zeros(1, 16, 1, dtype=torch.float64))
    _, parts = loss_phase1(output, target, torch.ones(1, 16, dtype=torch.bool), CFG, (64, 64), use_aux=False)
    assert parts["loss_aux"] == 0.0


@pytest.mark.parametrize("label", [0.0, 1.0])
def test_loss_phase2_at_half_is_ln2(label):
    value = loss_phase2(torch.tensor([0.5], dtype=torch.float64), torch.tensor([label])).item()
    assert value == pytest.approx(math.log(2.0), abs=1e-9)


def test_loss_phase2_is_zero_when_certain_and_right():
    assert loss_phase2(torch.tensor([1.0, 0.0]), torch.tensor([1.0, 0.0])).item() == 0.0


def test_loss_phase2_rejects_non_probabilities():
    with pytest.raises(DomainError):
        loss_phase2(torch.tensor([1.5]), torch.tensor([1.0]))


def test_losses_are_nonnegative():
    torch.manual_seed(0)
    for _ in range(20):
        xy = torch.rand(4, 2, dtype=torch.float64) * 50
        wh = torch.rand(4, 2, dtype=torch.float64) * 30 + 1
        pred = torch.cat([xy, wh], dim=1)
        target = torch.cat([torch.rand(4, 2, dtype=torch.float64) * 50, wh.flip(0)], dim=1)
        assert loss_bb(pred, target, CFG, (64, 64)).item() >= 0
        assert loss_phase2(torch.rand(4, dtype=torch.float64), (torch.rand(4) > 0.5).double()).item() >= 0
