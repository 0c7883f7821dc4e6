# seqgen/dataset_io.py
import logging
from pathlib import Path
from typing import Iterable, List, Optional

import numpy as np
from PIL import Image
from pydantic import ValidationError

from ditra.config import parse_key_values
from ditra.errors import DatasetError
from ditra.geom.boxes import BoundingBox
from ditra.geom.masks import BinaryMask
from ditra.seqgen.attributes import AttributeSpec
from ditra.seqgen.render import SequenceRecord

ABSENT_BOX = "0,0,0,0"
FRAME_PATTERN = "{:08d}.png"


def _write_boxes(path: Path, boxes: Iterable[Optional[BoundingBox]]) -> None:
    lines = [ABSENT_BOX if box is None else box.to_text() for box in boxes]
    path.write_text("\n".join(lines) + "\n")


def _write_masks(folder: Path, masks: Iterable[BinaryMask]) -> None:
    folder.mkdir(parents=True, exist_ok=True)
    for i, mask in enumerate(masks):
        Image.fromarray((mask.grid * 255).astype(np.uint8)).save(folder / FRAME_PATTERN.format(i))


def write_sequence(record: SequenceRecord, root: Path) -> Path:
    """Write one sequence into `<root>/<seq_id>/`."""
    seq_dir = Path(root) / record.seq_id
    frames_dir = seq_dir / "frames"
    frames_dir.mkdir(parents=True, exist_ok=True)

    for i, frame in enumerate(record.frames):
        Image.fromarray(np.ascontiguousarray(frame, dtype=np.uint8)).save(frames_dir / FRAME_PATTERN.format(i))
    _write_boxes(seq_dir / "groundtruth.txt", record.target_boxes)
    if record.target_masks:
        _write_masks(seq_dir / "masks", record.target_masks)

    if record.has_distractor:
        _write_boxes(seq_dir / "distractor.txt", record.distractor_boxes)
        if record.distractor_masks:
            _write_masks(seq_dir / "distractor_masks", record.distractor_masks)

    if record.spec is not None:
        meta = record.spec.to_meta()
        (seq_dir / "meta.txt").write_text("".join(f"{k}={v}\n" for k, v in meta.items()))

    # debug
    logging.debug(f"Wrote {record.frame_count} frames to {seq_dir}")
    return seq_dir


def write_dataset(records: Iterable[SequenceRecord], root: Path) -> List[Path]:
    root = Path(root)
    root.mkdir(parents=True, exist_ok=True)
    return [write_sequence(record, root) for record in records]


def _read_boxes(path: Path, allow_absent: bool) -> List[Optional[BoundingBox]]:
    if not path.is_file():
        error_msg = f"Missing box file: {path}"
        logging.error(error_msg)
        raise DatasetError(error_msg)

    boxes: List[Optional[BoundingBox]] = []
    for number, line in enumerate(path.read_text().splitlines(), start=1):
        if not line.strip():
            continue
        try:
            values = [float(v) for v in line.split(",")]
            if allow_absent and len(values) == 4 and values[2] == 0.0 and values[3] == 0.0:
                boxes.append(None)
            else:
                boxes.append(BoundingBox.from_xywh(values))
        except (ValueError, TypeError) as e:
            error_msg = f"{path}:{number}: malformed box line {line.strip()!r} ({e})"
            logging.error(error_msg)
            raise DatasetError(error_msg)
    return boxes


def _read_images(folder: Path, mode: str) -> List[np.ndarray]:
    images = []
    for path in sorted(folder.glob("*.png")) + sorted(folder.glob("*.jpg")):
        try:
            with Image.open(path) as image:
                images.append(np.asarray(image.convert(mode), dtype=np.uint8))
        except OSError as e:
            error_msg = f"Cannot read image {path}: {e}"
            logging.error(error_msg)
            raise DatasetError(error_msg)
    return images


def _read_masks(folder: Path) -> List[BinaryMask]:
    if not folder.is_dir():
        return []
    return [BinaryMask.from_array(grid > 127) for grid in _read_images(folder, "L")]


def read_sequence(seq_dir: Path) -> SequenceRecord:
    """Read one sequence directory; masks and the distractor are optional."""
    seq_dir = Path(seq_dir)
    frames_dir = seq_dir / "frames"
    if not frames_dir.is_dir():
        error_msg = f"Missing frames directory: {frames_dir}"
        logging.error(error_msg)
        raise DatasetError(error_msg)

    frames = _read_images(frames_dir, "RGB")
    target_boxes = _read_boxes(seq_dir / "groundtruth.txt", allow_absent=True)
    if len(target_boxes) != len(frames):
        error_msg = f"{seq_dir / 'groundtruth.txt'}: {len(target_boxes)} boxes for {len(frames)} frames"
        logging.error(error_msg)
        raise DatasetError(error_msg)

    distractor_boxes: List[Optional[BoundingBox]] = []
    if (seq_dir / "distractor.txt").is_file():
        distractor_boxes = _read_boxes(seq_dir / "distractor.txt", allow_absent=True)

    spec = None
    meta_path = seq_dir / "meta.txt"
    if meta_path.is_file():
        try:
            spec = AttributeSpec.from_meta(parse_key_values(meta_path.read_text().splitlines(), str(meta_path)))
        except (ValidationError, ValueError) as e:
            error_msg = f"Malformed metadata {meta_path}: {e}"
            logging.error(error_msg)
            raise DatasetError(error_msg)

    try:
        return SequenceRecord(
            seq_id=seq_dir.name,
            frames=frames,
            target_boxes=target_boxes,
            distractor_boxes=distractor_boxes,
            target_masks=_read_masks(seq_dir / "masks"),
            distractor_masks=_read_masks(seq_dir / "distractor_masks"),
            spec=spec,
        )
    except ValidationError as e:
        error_msg = f"Inconsistent sequence {seq_dir}: {e}"
        logging.error(error_msg)
        raise DatasetError(error_msg)


def list_sequences(root: Path) -> List[Path]:
    """Sequence directories under `root`, sorted by name."""
    root = Path(root)
    if not root.is_dir():
        error_msg = f"Dataset root not found: {root}"
        logging.error(error_msg)
        raise DatasetError(error_msg)
    return sorted(p for p in root.iterdir() if p.is_dir() and (p / "frames").is_dir())


def read_dataset(root: Path) -> List[SequenceRecord]:
    return [read_sequence(seq_dir) for seq_dir in list_sequences(root)]
