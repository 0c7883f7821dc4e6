# tests/geom/test_boxes.py
import math

import numpy as np
import pytest

from ditra.errors import DomainError
from ditra.geom.boxes import (
    BoundingBox,
    center_error,
    giou,
    giou_loss,
    iou,
    l1_box_loss,
)
from ditra.geom.masks import rasterize_box


def box(x, y, w, h):
    return BoundingBox(x=x, y=y, w=w, h=h)


def random_pair(rng):
    # boxes on a 10x10 canvas, sized so they overlap often enough to be interesting
    a = box(*rng.uniform(0, 6, 2), *rng.uniform(0.5, 4, 2))
    b = box(*rng.uniform(0, 6, 2), *rng.uniform(0.5, 4, 2))
    return a, b


def test_iou_identity_and_disjoint():
    a = box(3, 4, 5, 6)
    assert iou(a, a) == 1.0
    assert iou(box(0, 0, 1, 1), box(5, 5, 1, 1)) == 0.0


def test_iou_overlap_example():
    assert iou(box(0, 0, 2, 2), box(1, 1, 2, 2)) == pytest.approx(1 / 7, abs=1e-12)


@pytest.mark.parametrize(
    "a,b,expected",
    [
        (box(0, 0, 1, 1), box(0, 0, 1, 1), 1.0),
        (box(0, 0, 1, 1), box(2, 0, 1, 1), -1 / 3),
        (box(0, 0, 2, 2), box(1, 1, 2, 2), 1 / 7 - 2 / 9),
    ],
)
def test_giou_hand_cases(a, b, expected):
    assert giou(a, b) == pytest.approx(expected, abs=1e-9)


@pytest.mark.parametrize(
    "a,b,expected",
    [
        (box(0, 0, 1, 1), box(0, 0, 1, 1), 0.0),
        (box(0, 0, 1, 1), box(2, 0, 1, 1), 4 / 3),
        (box(0, 0, 4, 4), box(1, 1, 2, 2), 0.75),
    ],
)
def test_giou_loss_cases(a, b, expected):
    assert giou_loss(a, b) == pytest.approx(expected, abs=1e-9)


def test_l1_box_loss_examples():
    a = box(0, 0, 160, 160)
    b = box(32, 0, 160, 160)
    assert l1_box_loss(a, a, (320, 320)) == 0.0
    assert l1_box_loss(a, b, (320, 320)) == pytest.approx(0.025)


def test_l1_box_loss_is_symmetric():
    rng = np.random.default_rng(3)
    for _ in range(50):
        a, b = random_pair(rng)
        assert l1_box_loss(a, b, (10, 12)) == pytest.approx(l1_box_loss(b, a, (10, 12)))


def test_l1_box_loss_rejects_zero_norm():
    with pytest.raises(DomainError):
        l1_box_loss(box(0, 0, 1, 1), box(0, 0, 1, 1), (0, 320))


def test_center_error():
    assert center_error(box(0, 0, 2, 2), box(0, 0, 2, 2)) == 0.0
    assert center_error(box(0, 0, 2, 2), box(3, 4, 2, 2)) == pytest.approx(5.0)
    a, b = box(1, 2, 3, 4), box(7, -1, 2, 5)
    assert center_error(a.shift(11, -3), b.shift(11, -3)) == pytest.approx(center_error(a, b))


def test_non_finite_boxes_are_rejected():
    with pytest.raises(ValueError):
        box(math.nan, 0, 1, 1)
    with pytest.raises(ValueError):
        box(0, 0, math.inf, 1)
    with pytest.raises(DomainError):
        iou(BoundingBox.model_construct(x=math.nan, y=0.0, w=1.0, h=1.0), box(0, 0, 1, 1))


def test_symmetry_and_ordering_properties():
    rng = np.random.default_rng(0)
    for _ in range(500):
        a, b = random_pair(rng)
        assert iou(a, b) == pytest.approx(iou(b, a))
        assert giou(a, b) == pytest.approx(giou(b, a))
        assert giou(a, b) <= iou(a, b) + 1e-12
        assert 0.0 <= giou_loss(a, b) <= 2.0


def test_giou_equals_iou_for_nested_boxes():
    outer, inner = box(0, 0, 4, 4), box(1, 1, 2, 2)
    assert giou(outer, inner) == pytest.approx(iou(outer, inner))


def test_text_round_trip_is_exact():
    b = box(0.1, 1 / 3, 12.345678901234567, 7.0)
    assert BoundingBox.from_text(b.to_text()) == b


def test_iou_and_giou_match_pixel_counting_oracle():
    """Rasterise both boxes at 1000x1000 and count pixels."""
    rng = np.random.default_rng(1)
    resolution = 1000
    scale = resolution / 10.0
    for _ in range(1000):
        a, b = random_pair(rng)
        sa = box(a.x * scale, a.y * scale, a.w * scale, a.h * scale)
        sb = box(b.x * scale, b.y * scale, b.w * scale, b.h * scale)
        ma = rasterize_box(sa, resolution, resolution).grid.astype(bool)
        mb = rasterize_box(sb, resolution, resolution).grid.astype(bool)
        inter = np.count_nonzero(ma & mb)
        union = np.count_nonzero(ma | mb)
        hull = BoundingBox.from_xyxy(
            [min(sa.x, sb.x), min(sa.y, sb.y), max(sa.x2, sb.x2), max(sa.y2, sb.y2)]
        )
        hull_px = rasterize_box(hull, resolution, resolution).count

        assert iou(a, b) == pytest.approx(inter / union, abs=1e-2)
        assert giou(a, b) == pytest.approx(inter / union - (hull_px - union) / hull_px, abs=1e-2)
