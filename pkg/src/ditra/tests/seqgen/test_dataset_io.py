# tests/seqgen/test_dataset_io.py
import numpy as np
import pytest

from ditra.errors import DatasetError
from ditra.geom.boxes import BoundingBox
from ditra.geom.masks import BinaryMask
from ditra.seqgen.attributes import AttributeSpec
from ditra.seqgen.dataset_io import read_dataset, read_sequence, write_dataset, write_sequence
from ditra.seqgen.render import SequenceRecord


def make_record(seq_id="seq-0000"):
    rng = np.random.default_rng(0)
    frames = [rng.integers(0, 256, size=(16, 20, 3)).astype(np.uint8) for _ in range(3)]
    masks = [BinaryMask.from_array(rng.random((16, 20)) > 0.5) for _ in range(3)]
    spec = AttributeSpec(
        transparency_level=1,
        rotation_level=1,
        distractor=True,
        target_shape_id="ellipse",
        distractor_shape_id="bottle",
        background_id="proc-000001",
        frame_count=3,
        frame_height=32,
        frame_width=32,
        rng_seed=99,
    )
    return SequenceRecord(
        seq_id=seq_id,
        frames=frames,
        target_boxes=[BoundingBox(x=0.1 * i, y=1 / 3, w=5.25, h=7.0) for i in range(3)],
        distractor_boxes=[BoundingBox(x=1, y=2, w=3, h=4), None, BoundingBox(x=2, y=2, w=3, h=4)],
        target_masks=masks,
        distractor_masks=masks[::-1],
        spec=spec,
    )


def test_write_then_read_is_lossless(tmp_path):
    record = make_record()
    write_dataset([record], tmp_path)
    (loaded,) = read_dataset(tmp_path)

    assert loaded.seq_id == record.seq_id
    assert loaded.target_boxes == record.target_boxes
    assert loaded.distractor_boxes == record.distractor_boxes
    assert loaded.target_masks == record.target_masks
    assert loaded.distractor_masks == record.distractor_masks
    assert all(np.array_equal(a, b) for a, b in zip(loaded.frames, record.frames))
    assert loaded.spec == record.spec


def test_absent_distractor_is_written_as_zeros(tmp_path):
    seq_dir = write_sequence(make_record(), tmp_path)
    assert (seq_dir / "distractor.txt").read_text().splitlines()[1] == "0,0,0,0"


def test_missing_groundtruth_is_an_error(tmp_path):
    seq_dir = write_sequence(make_record(), tmp_path)
    (seq_dir / "groundtruth.txt").unlink()
    with pytest.raises(DatasetError, match="groundtruth.txt"):
        read_sequence(seq_dir)


def test_malformed_box_line_names_the_file(tmp_path):
    seq_dir = write_sequence(make_record(), tmp_path)
    (seq_dir / "groundtruth.txt").write_text("1,2,3,4\nnot,a,box\n5,6,7,8\n")
    with pytest.raises(DatasetError, match="groundtruth.txt:2"):
        read_sequence(seq_dir)


def test_box_count_mismatch_is_an_error(tmp_path):
    seq_dir = write_sequence(make_record(), tmp_path)
    (seq_dir / "groundtruth.txt").write_text("1,2,3,4\n")
    with pytest.raises(DatasetError):
        read_sequence(seq_dir)


def test_sequences_without_masks_are_readable(tmp_path):
    seq_dir = write_sequence(make_record(), tmp_path)
    for folder in ("masks", "distractor_masks"):
        for path in (seq_dir / folder).iterdir():
            path.unlink()
        (seq_dir / folder).rmdir()
    loaded = read_sequence(seq_dir)
    assert loaded.target_masks == []
    assert loaded.distractor_masks == []


def test_missing_root_is_an_error(tmp_path):
    with pytest.raises(DatasetError):
        read_dataset(tmp_path / "nope")


def test_zero_size_groundtruth_reads_as_absent(tmp_path):
    seq_dir = write_sequence(make_record(), tmp_path)
    (seq_dir / "groundtruth.txt").write_text("1,2,3,4\n0,0,0,0\n5,6,7,8\n")
    loaded = read_sequence(seq_dir)
    assert loaded.target_boxes[1] is None


def test_zero_size_first_frame_is_an_error(tmp_path):
    seq_dir = write_sequence(make_record(), tmp_path)
    (seq_dir / "groundtruth.txt").write_text("0,0,0,0\n1,2,3,4\n5,6,7,8\n")
    with pytest.raises(DatasetError, match="frame 0"):
        read_sequence(seq_dir)
