# evalkit/ope.py
import logging
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np
from pydantic import BaseModel

from ditra.errors import DatasetError
from ditra.evalkit.curves import auc, precision_at, precision_curve, success_curve
from ditra.geom.boxes import center_error, iou
from ditra.seqgen.render import SequenceRecord
from ditra.tracker.trace import Trace, track_sequence
from ditra.tracker.tracker import Tracker
from ditra.workers import run_in_workers

TrackerFactory = Callable[[SequenceRecord], Tracker]


class SequenceResult(BaseModel):
    seq_id: str
    n_frames: int
    ious: List[float]
    center_errors: List[float]
    excluded_frames: List[int] = []
    success: List[float]
    precision: List[float]
    auc: float
    precision_20: float
    failed: bool = False
    # final frame closer to the distractor than to the target; None without a distractor
    locked_on_distractor: Optional[bool] = None


class EvalResult(BaseModel):
    """Per-sequence results sorted by id, and their averages."""

    sequences: List[SequenceResult]
    success: List[float]
    precision: List[float]
    auc: float
    precision_20: float
    failed_count: int = 0
    lock_on_rate: Optional[float] = None

    def by_id(self) -> Dict[str, SequenceResult]:
        return {s.seq_id: s for s in self.sequences}


def _isolated_run(factory: TrackerFactory, record: SequenceRecord) -> Trace:
    try:
        return track_sequence(factory(record), record)
    except Exception as e:
        logging.error(f"{record.seq_id}: tracker failed: {e}")
        return Trace(seq_id=record.seq_id, boxes=[], scores=[], failed=True, error=str(e))


async def run_ope(factory: TrackerFactory, records: Sequence[SequenceRecord], workers: int = 1) -> Dict[str, Trace]:
    """
    Track every sequence once from its frame-0 ground truth. A tracker that
    raises marks its sequence failed without stopping the others.
    """
    traces = await run_in_workers(list(records), lambda record: _isolated_run(factory, record), workers)
    failed = sum(t.failed for t in traces)
    if failed:
        logging.warning(f"{failed} of {len(traces)} sequence(s) failed")
    return {trace.seq_id: trace for trace in sorted(traces, key=lambda t: t.seq_id)}


def score_sequence(record: SequenceRecord, trace: Trace) -> SequenceResult:
    """
    Per-frame IoU and centre error against the ground truth. Frames without
    ground truth are excluded; frames the tracker never reached score as misses.
    """
    ious, errors, excluded = [], [], []
    for t, gt in enumerate(record.target_boxes):
        if gt is None:
            excluded.append(t)
            continue
        if t < len(trace.boxes):
            ious.append(iou(trace.boxes[t], gt))
            errors.append(center_error(trace.boxes[t], gt))
        else:
            ious.append(0.0)
            errors.append(float("inf"))
    if excluded:
        logging.info(f"{record.seq_id}: {len(excluded)} frame(s) without ground truth excluded")

    locked = None
    if record.has_distractor and len(trace.boxes) == record.frame_count:
        final_target = record.target_boxes[-1]
        final_distractor = record.distractor_boxes[-1]
        if final_target is not None and final_distractor is not None:
            final = trace.boxes[-1]
            locked = iou(final, final_distractor) > iou(final, final_target)

    success = success_curve(ious)
    precision = precision_curve(errors)
    return SequenceResult(
        seq_id=record.seq_id,
        n_frames=record.frame_count,
        ious=ious,
        center_errors=errors,
        excluded_frames=excluded,
        success=success.tolist(),
        precision=precision.tolist(),
        auc=auc(success),
        precision_20=precision_at(precision),
        failed=trace.failed,
        locked_on_distractor=locked,
    )


def aggregate(results: Sequence[SequenceResult]) -> EvalResult:
    """Average per-sequence curves; the dataset AUC is the mean of per-sequence AUCs."""
    results = sorted(results, key=lambda r: r.seq_id)
    if not results:
        error_msg = "No sequences to aggregate"
        logging.error(error_msg)
        raise DatasetError(error_msg)

    success = np.mean([r.success for r in results], axis=0)
    precision = np.mean([r.precision for r in results], axis=0)
    locks = [r.locked_on_distractor for r in results if r.locked_on_distractor is not None]
    return EvalResult(
        sequences=results,
        success=success.tolist(),
        precision=precision.tolist(),
        auc=float(np.mean([r.auc for r in results])),
        precision_20=float(np.mean([r.precision_20 for r in results])),
        failed_count=sum(r.failed for r in results),
        lock_on_rate=float(np.mean(locks)) if locks else None,
    )


def evaluate_traces(records: Sequence[SequenceRecord], traces: Dict[str, Trace]) -> EvalResult:
    """Score stored traces against their sequences."""
    results = []
    for record in records:
        trace = traces.get(record.seq_id)
        if trace is None:
            error_msg = f"No trace for sequence {record.seq_id}"
            logging.error(error_msg)
            raise DatasetError(error_msg)
        results.append(score_sequence(record, trace))
    return aggregate(results)
