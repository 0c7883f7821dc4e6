# tests/seqgen/test_render.py
import numpy as np
import pytest

from ditra.geom.masks import mask_bounding_box
from ditra.seqgen.attributes import AttributeSpec
from ditra.seqgen.backgrounds import TEXTURE_CACHE_SIZE, ProceduralBackgrounds
from ditra.seqgen.render import distractor_offsets, render_sequence, rotation_angle


def make_spec(**overrides):
    values = dict(
        transparency_level=2,
        rotation_level=2,
        target_shape_id="bottle",
        background_id="proc-000003",
        frame_count=8,
        frame_height=96,
        frame_width=128,
        rng_seed=1234,
    )
    values.update(overrides)
    return AttributeSpec(**values)


@pytest.fixture(scope="module")
def backgrounds():
    return ProceduralBackgrounds(seed=0)


def test_lists_share_frame_count_and_no_distractor(backgrounds):
    record = render_sequence(make_spec(), backgrounds)
    assert record.frame_count == 8
    assert len(record.target_boxes) == len(record.target_masks) == 8
    assert record.distractor_boxes == []
    assert record.distractor_masks == []
    assert record.frames[0].shape == (96, 128, 3)


def test_target_box_is_tight_hull_of_mask(backgrounds):
    record = render_sequence(make_spec(blur_present=True, blur_level=3), backgrounds)
    for box, mask in zip(record.target_boxes, record.target_masks):
        assert mask.count > 0
        assert box == mask_bounding_box(mask)


def test_ground_truth_does_not_depend_on_stripes(backgrounds):
    plain = render_sequence(make_spec(), backgrounds)
    striped = render_sequence(make_spec(occlusion_present=True, occlusion_stripes=20), backgrounds)
    assert plain.target_boxes == striped.target_boxes
    assert plain.target_masks == striped.target_masks
    assert any(not np.array_equal(a, b) for a, b in zip(plain.frames, striped.frames))


def test_rendering_is_deterministic(backgrounds):
    spec = make_spec(distractor=True, distractor_shape_id="vase")
    a = render_sequence(spec, backgrounds)
    b = render_sequence(spec, backgrounds)
    assert all(np.array_equal(x, y) for x, y in zip(a.frames, b.frames))
    assert a.distractor_boxes == b.distractor_boxes


def test_distractor_annotations_are_recorded(backgrounds):
    record = render_sequence(make_spec(distractor=True, distractor_shape_id="flask"), backgrounds)
    assert len(record.distractor_boxes) == 8
    assert len(record.distractor_masks) == 8
    for box, mask in zip(record.distractor_boxes, record.distractor_masks):
        assert box == mask_bounding_box(mask)


def test_fast_rotation_wraps_after_34_frames():
    spec = make_spec(rotation_level=3)
    delta = (rotation_angle(12.0, spec, 34) - rotation_angle(12.0, spec, 0)) % 360.0
    assert delta == pytest.approx(0.4, abs=1e-9)


def test_crossing_offset_passes_through_zero():
    spec = make_spec(frame_count=9, distractor=True, distractor_shape_id="vase", distractor_mode="crossing")
    offsets = distractor_offsets(np.random.default_rng(0), spec, 20.0)
    assert np.allclose(offsets[0], -offsets[-1])
    assert np.allclose(offsets[4], 0.0)
    assert 10.0 <= np.linalg.norm(offsets[0]) <= 30.0


def test_follow_offset_is_constant():
    spec = make_spec(distractor=True, distractor_shape_id="vase")
    offsets = distractor_offsets(np.random.default_rng(0), spec, 20.0)
    assert np.allclose(offsets, offsets[0])


def test_rendering_many_sequences_keeps_few_textures():
    backgrounds = ProceduralBackgrounds(seed=0)
    for number in range(30):
        render_sequence(make_spec(background_id=f"proc-{number:06d}", frame_count=2), backgrounds)
    assert len(backgrounds._cache) == TEXTURE_CACHE_SIZE
