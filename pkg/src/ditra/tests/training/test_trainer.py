# tests/training/test_trainer.py
import csv

import numpy as np
import pytest
import torch

from ditra.errors import UsageError
from ditra.geom.boxes import iou
from ditra.model.config import ModelConfig
from ditra.model.network import DiTraNetwork
from ditra.seqgen.attributes import AttributeSpec
from ditra.seqgen.backgrounds import ProceduralBackgrounds
from ditra.seqgen.render import render_sequence
from ditra.tracker.trace import track_sequence
from ditra.tracker.tracker import DiTraTracker
from ditra.training.config import TrainConfig
from ditra.training.sampling import TrainingPools, sample_phase1, sample_phase2
from ditra.training.trainer import phase1_forward, phase2_scores, train_phase1, train_phase2

QUICK = TrainConfig.desk_scale(
    phase1_epochs=3, phase1_decay_epoch=2, phase2_epochs=3, phase2_decay_epoch=2, batch_size=2
)


def read_rows(path):
    with open(path, newline="") as f:
        return list(csv.reader(f))


@pytest.fixture
def phase1_run(tiny_model, rendered_records, tmp_path):
    pools = TrainingPools(transparent=rendered_records[:2], opaque=rendered_records[2:])
    spm_before = {k: v.clone() for k, v in tiny_model.spm.state_dict().items()}
    result = train_phase1(tiny_model, pools, QUICK, tmp_path / "phase1", seed=0)
    return tiny_model, result, spm_before


def test_phase1_writes_log_and_checkpoint(phase1_run):
    _, result, _ = phase1_run
    rows = read_rows(result.log)
    assert rows[0] == ["step", "loss_bb", "loss_aux", "lr"]
    assert len(rows) == 1 + 3
    assert [int(r[0]) for r in rows[1:]] == [1, 2, 3]
    assert result.checkpoint.is_file()
    assert result.steps == 3


def test_phase1_leaves_the_spm_alone(phase1_run):
    model, _, spm_before = phase1_run
    for name, tensor in model.spm.state_dict().items():
        assert torch.equal(tensor, spm_before[name])


def test_phase2_only_moves_the_spm(phase1_run, rendered_records, tmp_path):
    model, result, _ = phase1_run
    frozen = {k: v.clone() for k, v in model.state_dict().items() if not k.startswith("spm.")}
    trained, phase2 = train_phase2(result.checkpoint, rendered_records, QUICK, tmp_path / "phase2", seed=0)
    for name, tensor in trained.state_dict().items():
        if not name.startswith("spm."):
            assert torch.equal(tensor, frozen[name]), name
    rows = read_rows(phase2.log)
    assert rows[0] == ["step", "loss_score", "lr"]
    assert len(rows) == 1 + 3


def test_phase2_needs_a_phase1_checkpoint(rendered_records, tmp_path):
    with pytest.raises(UsageError):
        train_phase2(None, rendered_records, QUICK, tmp_path)
    with pytest.raises(UsageError):
        train_phase2(tmp_path / "absent.pt", rendered_records, QUICK, tmp_path)


def test_distractor_ablation_logs_no_aux_loss(tiny_cfg, rendered_records, tmp_path):
    torch.manual_seed(0)
    model = DiTraNetwork(tiny_cfg.ablated("dis"))
    pools = TrainingPools(transparent=rendered_records, opaque=rendered_records)
    result = train_phase1(model, pools, QUICK, tmp_path, seed=0)
    assert all(float(r[2]) == 0.0 for r in read_rows(result.log)[1:])


@pytest.mark.slow
def test_single_sample_overfit(tiny_model, rendered_records):
    pools = TrainingPools(transparent=rendered_records, opaque=rendered_records)
    cfg = TrainConfig(lr=3e-3)
    sample = sample_phase1(pools, np.random.default_rng(0), cfg, size=64, context=4.0, stride=16)
    tiny_model.train()
    optimizer = torch.optim.Adam([p for m in tiny_model.non_spm_modules() for p in m.parameters()], lr=cfg.lr)
    losses = []
    for _ in range(50):
        loss, _ = phase1_forward(tiny_model, [sample], cfg)
        optimizer.zero_grad()
        loss.backward()
        optimizer.step()
        losses.append(loss.item())
    assert losses[-1] * 10 <= losses[0]


@pytest.fixture(scope="module")
def desk_records():
    backgrounds = ProceduralBackgrounds(seed=0)
    records = []
    for i in range(8):
        spec = AttributeSpec(
            transparency_level=1 + i % 3,
            rotation_level=1,
            target_shape_id=("bottle", "goblet", "flask", "vase")[i % 4],
            background_id=f"proc-{i:06d}",
            frame_count=20,
            rng_seed=500 + i,
        )
        records.append(render_sequence(spec, backgrounds, seq_id=f"seq-{i:04d}"))
    return records


@pytest.mark.slow
def test_desk_scale_overfit(desk_records, tmp_path):
    torch.manual_seed(0)
    model = DiTraNetwork(ModelConfig())
    pools = TrainingPools(transparent=desk_records, opaque=desk_records)
    result = train_phase1(model, pools, TrainConfig.desk_scale(), tmp_path / "phase1", seed=0)

    ious = []
    for record in desk_records:
        trace = track_sequence(DiTraTracker(model), record)
        ious.extend(iou(a, b) for a, b in zip(trace.boxes[1:], record.target_boxes[1:]))
    assert np.mean(ious) >= 0.7

    pairs = desk_records
    trained, _ = train_phase2(result.checkpoint, pairs, TrainConfig.desk_scale(), tmp_path / "phase2", seed=0)
    rng = np.random.default_rng(123)
    batch = [sample_phase2(pairs, rng, TrainConfig.desk_scale(), 128, 4.0) for _ in range(64)]
    with torch.no_grad():
        scores, _ = phase2_scores(trained, batch)
    labels = np.array([s.label for s in batch])
    assert scores.numpy()[labels == 1].mean() > 0.9
    assert scores.numpy()[labels == 0].mean() < 0.1
