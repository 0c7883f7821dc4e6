# tests/model/test_branches.py
import pytest
import torch

from ditra.errors import DomainError
from ditra.model.branches import (
    DistractorBranch,
    PoseBranch,
    TemplateEncoder,
    crop_template_features,
    two_channel_cells,
)
from ditra.model.positional import sine_embedding

SPATIAL = (4, 4)
STRIDE = 16


@pytest.fixture
def pos():
    return sine_embedding(4, 4, 32)


def test_two_channel_mask_sums_to_one():
    masks = two_channel_cells(torch.tensor([[10.0, 5.0, 30.0, 40.0]]), SPATIAL, STRIDE, torch.float32)
    assert torch.all(masks.sum(dim=-1) == 1.0)


def test_whole_patch_box_gives_constant_encoding():
    torch.manual_seed(0)
    encoder = TemplateEncoder(32, STRIDE)
    encoding = encoder(torch.tensor([[0.0, 0.0, 64.0, 64.0]]), SPATIAL)
    assert torch.allclose(encoding[0], encoding[0, :1].expand(16, -1))


def test_encodings_differ_exactly_where_masks_differ():
    torch.manual_seed(0)
    encoder = TemplateEncoder(32, STRIDE)
    boxes = torch.tensor([[0.0, 0.0, 32.0, 32.0], [32.0, 32.0, 32.0, 32.0]])
    encoding = encoder(boxes, SPATIAL)
    masks = two_channel_cells(boxes, SPATIAL, STRIDE, torch.float32)[..., 0]
    differs = (encoding[0] != encoding[1]).any(dim=-1)
    assert torch.equal(differs, masks[0] != masks[1])


def test_crop_full_box_returns_every_row():
    features = torch.randn(16, 32)
    cropped = crop_template_features(features, torch.tensor([0.0, 0.0, 64.0, 64.0]), SPATIAL, STRIDE)
    assert torch.equal(cropped, features)


def test_crop_counts_and_copies_rows():
    features = torch.randn(16, 32)
    cropped = crop_template_features(features, torch.tensor([0.0, 0.0, 48.0, 32.0]), SPATIAL, STRIDE)
    assert cropped.shape == (6, 32)
    # row-major cells (0,0) (0,1) (0,2) (1,0) (1,1) (1,2)
    assert torch.equal(cropped, features[[0, 1, 2, 4, 5, 6]])


def test_crop_without_cells_is_an_error():
    with pytest.raises(DomainError):
        crop_template_features(torch.randn(16, 32), torch.tensor([0.0, 0.0, 4.0, 4.0]), SPATIAL, STRIDE)


def test_distractor_branch_shapes_and_rows(pos):
    torch.manual_seed(0)
    branch = DistractorBranch(32, 4).eval()
    search = torch.randn(2, 16, 32)
    templates = [(torch.randn(2, 16, 32), torch.randn(2, 16, 32)) for _ in range(3)]
    out, weights = branch(search, templates, pos)
    assert out.shape == search.shape
    assert weights.shape == (2, 16, 48)
    assert torch.allclose(weights.sum(dim=-1), torch.ones(2, 16), atol=1e-5)


def test_distractor_branch_uses_the_encodings(pos):
    torch.manual_seed(0)
    branch = DistractorBranch(32, 4).eval()
    encoder = TemplateEncoder(32, STRIDE)
    search = torch.randn(1, 16, 32)
    f1, f2 = torch.randn(1, 16, 32), torch.randn(1, 16, 32)
    e1 = encoder(torch.tensor([[0.0, 0.0, 32.0, 32.0]]), SPATIAL)
    e2 = encoder(torch.tensor([[32.0, 32.0, 32.0, 32.0]]), SPATIAL)
    with torch.no_grad():
        with_codes, _ = branch(search, [(f1, e1), (f2, e2)], pos)
        without, _ = branch(search, [(f1, torch.zeros_like(e1)), (f2, torch.zeros_like(e2))], pos)
    assert not torch.allclose(with_codes, without)


def test_distractor_branch_ignores_template_order(pos):
    torch.manual_seed(0)
    branch = DistractorBranch(32, 4).eval()
    search = torch.randn(1, 16, 32)
    templates = [(torch.randn(1, 16, 32), torch.randn(1, 16, 32)) for _ in range(3)]
    with torch.no_grad():
        a, _ = branch(search, templates, pos)
        b, _ = branch(search, templates[::-1], pos)
    assert torch.allclose(a, b, atol=1e-5)


def test_pose_branch_is_permutation_invariant(pos):
    torch.manual_seed(0)
    branch = PoseBranch(32, 4).eval()
    search = torch.randn(1, 16, 32)
    rows = torch.randn(7, 32)
    perm = torch.randperm(7)
    with torch.no_grad():
        a, weights = branch(search, [[rows]], pos)
        b, _ = branch(search, [[rows[perm]]], pos)
    assert a.shape == (1, 16, 32)
    assert torch.allclose(weights.sum(dim=-1), torch.ones(1, 16), atol=1e-5)
    assert torch.allclose(a, b, atol=1e-5)


def test_pose_branch_pads_uneven_batches(pos):
    torch.manual_seed(0)
    branch = PoseBranch(32, 4).eval()
    search = torch.randn(2, 16, 32)
    short, long = torch.randn(2, 32), torch.randn(5, 32)
    with torch.no_grad():
        batched, weights = branch(search, [[short, long]], pos)
        alone, _ = branch(search[:1], [[short]], pos)
    # padded keys get no attention
    assert torch.all(weights[0, :, 2:] == 0)
    assert torch.allclose(batched[:1], alone, atol=1e-5)


def test_empty_branch_inputs_are_errors(pos):
    with pytest.raises(DomainError):
        DistractorBranch(32, 4)(torch.randn(1, 16, 32), [], pos)
    with pytest.raises(DomainError):
        PoseBranch(32, 4)(torch.randn(1, 16, 32), [], pos)
