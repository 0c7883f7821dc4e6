# tests/evalkit/test_report.py
import numpy as np
import pytest
import torch

from ditra.evalkit.curves import auc, success_curve
from ditra.evalkit.ope import evaluate_traces
from ditra.evalkit.report import (
    SUMMARY_ID,
    attribute_breakdown,
    delta_table,
    plot_attention_maps,
    read_results_csv,
    report,
    write_delta_csv,
    write_summary_csv,
)
from ditra.geom.boxes import iou
from ditra.tracker.trace import Trace


def static_traces(records):
    return {
        r.seq_id: Trace(seq_id=r.seq_id, boxes=[r.target_boxes[0]] * r.frame_count, scores=[1.0] * r.frame_count)
        for r in records
    }


def oracle_traces(records):
    return {r.seq_id: Trace(seq_id=r.seq_id, boxes=list(r.target_boxes), scores=[1.0] * r.frame_count) for r in records}


def test_csv_has_a_row_per_sequence_and_a_summary(records, tmp_path):
    result = evaluate_traces(records, static_traces(records))
    report(result, tmp_path)
    rows = read_results_csv(tmp_path / "results.csv")
    assert len(rows) == len(records) + 1
    assert rows[-1]["seq_id"] == SUMMARY_ID
    assert list(rows[0]) == ["seq_id", "n_frames", "auc", "precision_20", "failed"]


def test_csv_auc_matches_recomputation(records, tmp_path):
    traces = static_traces(records)
    report(evaluate_traces(records, traces), tmp_path)
    rows = {row["seq_id"]: row for row in read_results_csv(tmp_path / "results.csv")}
    for record in records:
        ious = [iou(a, b) for a, b in zip(traces[record.seq_id].boxes, record.target_boxes)]
        assert abs(float(rows[record.seq_id]["auc"]) - auc(success_curve(ious))) <= 1e-9


def test_report_is_byte_identical_on_rerun(records, tmp_path):
    result = evaluate_traces(records, static_traces(records))
    report(result, tmp_path / "a")
    report(result, tmp_path / "b")
    for name in ("results.csv", "success.png", "precision.png"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_summary_lists_every_variant(records, tmp_path):
    static = evaluate_traces(records, static_traces(records))
    oracle = evaluate_traces(records, oracle_traces(records))
    path = write_summary_csv({"full": oracle, "dis": static}, tmp_path / "summary.csv")
    lines = path.read_text().splitlines()
    assert lines[0] == "variant,auc,precision_20,lock_on_rate,failed"
    assert [line.split(",")[0] for line in lines[1:]] == ["full", "dis"]


def test_delta_table(records, tmp_path):
    static = evaluate_traces(records, static_traces(records))
    oracle = evaluate_traces(records, oracle_traces(records))
    rows = delta_table(static, oracle)
    assert len(rows) == len(records) + 1
    assert rows[-1]["seq_id"] == SUMMARY_ID
    assert rows[-1]["delta_auc"] == pytest.approx(oracle.auc - static.auc)
    assert all(row["delta_auc"] > 0 for row in rows)
    path = write_delta_csv(rows, tmp_path / "delta.csv")
    assert len(path.read_text().splitlines()) == len(rows) + 1


def test_attribute_breakdown_groups_by_level(records):
    result = evaluate_traces(records, static_traces(records))
    breakdown = attribute_breakdown(result, records)
    assert set(breakdown["transparency_level"]) == {"1", "2", "3"}
    assert breakdown["blur_level"] == {"0": pytest.approx(result.auc)}
    by_id = result.by_id()
    level_one = [by_id[r.seq_id].auc for r in records if r.spec.transparency_level == 1]
    assert breakdown["transparency_level"]["1"] == pytest.approx(np.mean(level_one))


def test_attention_maps_are_rendered(tmp_path):
    patch = np.random.default_rng(0).integers(0, 255, size=(64, 64, 3)).astype(np.float32)
    attention = {
        "pose": torch.softmax(torch.randn(1, 16, 7), dim=-1),
        "distractor": torch.softmax(torch.randn(1, 16, 32), dim=-1),
    }
    path = plot_attention_maps(patch, attention, (4, 4), tmp_path / "attention.png", title="frame 3")
    assert path.is_file() and path.stat().st_size > 0
