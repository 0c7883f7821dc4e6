# tracker/trace.py
import logging
from pathlib import Path
from typing import Dict, List, Optional

from pydantic import BaseModel, model_validator

from ditra.errors import DatasetError
from ditra.geom.boxes import BoundingBox
from ditra.seqgen.render import SequenceRecord
from ditra.tracker.tracker import Tracker


class Trace(BaseModel):
    """One tracked box and confidence per frame; frame 0 holds the initialisation box."""

    seq_id: str
    boxes: List[BoundingBox]
    scores: List[float]
    failed: bool = False
    error: Optional[str] = None

    @model_validator(mode="after")
    def _check_lengths(self) -> "Trace":
        if len(self.boxes) != len(self.scores):
            raise ValueError(f"{self.seq_id}: {len(self.boxes)} boxes but {len(self.scores)} scores")
        return self


def track_sequence(tracker: Tracker, record: SequenceRecord) -> Trace:
    """One-pass run: init on the frame-0 ground truth, then track to the end without restarts."""
    init_box = record.target_boxes[0]
    tracker.init(record.frames[0], init_box)
    boxes, scores = [init_box], [1.0]
    for frame in record.frames[1:]:
        box, score = tracker.track_frame(frame)
        boxes.append(box)
        scores.append(score)

    # debug
    logging.debug(f"{record.seq_id}: tracked {len(boxes)} frame(s)")
    return Trace(seq_id=record.seq_id, boxes=boxes, scores=scores)


def write_trace(trace: Trace, out_dir: Path) -> Path:
    """`<seq>.txt` holds one x,y,w,h line per frame, `<seq>_scores.txt` the parallel scores."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    box_path = out_dir / f"{trace.seq_id}.txt"
    box_path.write_text("".join(box.to_text() + "\n" for box in trace.boxes))
    (out_dir / f"{trace.seq_id}_scores.txt").write_text("".join(f"{s!r}\n" for s in trace.scores))
    failed_path = out_dir / f"{trace.seq_id}.failed"
    if trace.failed:
        failed_path.write_text((trace.error or "failed") + "\n")
    elif failed_path.exists():
        failed_path.unlink()
    return box_path


def read_trace(out_dir: Path, seq_id: str) -> Trace:
    out_dir = Path(out_dir)
    box_path = out_dir / f"{seq_id}.txt"
    score_path = out_dir / f"{seq_id}_scores.txt"
    for path in (box_path, score_path):
        if not path.is_file():
            error_msg = f"Missing trace file: {path}"
            logging.error(error_msg)
            raise DatasetError(error_msg)

    try:
        boxes = [BoundingBox.from_text(line) for line in box_path.read_text().splitlines() if line.strip()]
        scores = [float(line) for line in score_path.read_text().splitlines() if line.strip()]
        failed_path = out_dir / f"{seq_id}.failed"
        error = failed_path.read_text().strip() if failed_path.is_file() else None
        return Trace(seq_id=seq_id, boxes=boxes, scores=scores, failed=error is not None, error=error)
    except ValueError as e:
        error_msg = f"Malformed trace {box_path}: {e}"
        logging.error(error_msg)
        raise DatasetError(error_msg)


def read_traces(out_dir: Path) -> Dict[str, Trace]:
    """Every trace in a directory, keyed by sequence id."""
    out_dir = Path(out_dir)
    if not out_dir.is_dir():
        error_msg = f"Trace directory not found: {out_dir}"
        logging.error(error_msg)
        raise DatasetError(error_msg)
    seq_ids = sorted(p.name[: -len("_scores.txt")] for p in out_dir.glob("*_scores.txt"))
    return {seq_id: read_trace(out_dir, seq_id) for seq_id in seq_ids}
