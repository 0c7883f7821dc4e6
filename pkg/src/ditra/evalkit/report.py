# evalkit/report.py
import csv
import logging
from collections import defaultdict
from pathlib import Path
from typing import Dict, List, Mapping, Optional, Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np
import torch

from ditra.evalkit.curves import PRECISION_AT, PRECISION_THRESHOLDS, SUCCESS_THRESHOLDS
from ditra.evalkit.ope import EvalResult
from ditra.seqgen.render import SequenceRecord

RESULT_COLUMNS = ["seq_id", "n_frames", "auc", "precision_20", "failed"]
SUMMARY_ID = "ALL"
# fixed metadata keeps re-rendered PNGs byte-identical
PNG_METADATA = {"Software": None}

BREAKDOWN_ATTRIBUTES = ("transparency_level", "blur_level", "occlusion_stripes", "rotation_level", "distractor")


def write_results_csv(result: EvalResult, path: Path) -> Path:
    """One row per sequence plus a summary row with the dataset averages."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as f:
        writer = csv.DictWriter(f, fieldnames=RESULT_COLUMNS)
        writer.writeheader()
        for seq in result.sequences:
            writer.writerow(
                {
                    "seq_id": seq.seq_id,
                    "n_frames": seq.n_frames,
                    "auc": repr(seq.auc),
                    "precision_20": repr(seq.precision_20),
                    "failed": int(seq.failed),
                }
            )
        writer.writerow(
            {
                "seq_id": SUMMARY_ID,
                "n_frames": sum(s.n_frames for s in result.sequences),
                "auc": repr(result.auc),
                "precision_20": repr(result.precision_20),
                "failed": result.failed_count,
            }
        )
    return path


def read_results_csv(path: Path) -> List[Dict[str, str]]:
    with open(path, newline="") as f:
        return list(csv.DictReader(f))


def _plot(curves: Mapping[str, Sequence[float]], x: np.ndarray, xlabel: str, ylabel: str, title: str, path: Path) -> Path:
    fig, ax = plt.subplots(figsize=(5, 4), dpi=100)
    for name, curve in curves.items():
        ax.plot(x, curve, label=name, linewidth=1.5)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.set_title(title)
    ax.set_ylim(0, 1.02)
    ax.grid(True, linewidth=0.3)
    ax.legend(loc="lower left" if ylabel == "Success rate" else "lower right", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, format="png", metadata=PNG_METADATA)
    plt.close(fig)
    return path


def plot_curves(results: Mapping[str, EvalResult], out_dir: Path) -> List[Path]:
    """success.png and precision.png with one curve per tracker, AUC and precision@20 in the legend."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    success = {f"{name} [{r.auc:.3f}]": r.success for name, r in results.items()}
    precision = {f"{name} [{r.precision_20:.3f}]": r.precision for name, r in results.items()}
    return [
        _plot(success, SUCCESS_THRESHOLDS, "Overlap threshold", "Success rate", "Success plots of OPE", out_dir / "success.png"),
        _plot(
            precision,
            PRECISION_THRESHOLDS,
            "Location error threshold (px)",
            "Precision",
            f"Precision plots of OPE (@{PRECISION_AT}px)",
            out_dir / "precision.png",
        ),
    ]


def report(result: EvalResult, out_dir: Path, name: str = "tracker") -> List[Path]:
    """results.csv plus success and precision plots."""
    out_dir = Path(out_dir)
    paths = [write_results_csv(result, out_dir / "results.csv")]
    paths.extend(plot_curves({name: result}, out_dir))
    logging.info(f"Report written to {out_dir}")
    return paths


def write_summary_csv(results: Mapping[str, EvalResult], path: Path) -> Path:
    """One row per tracker or variant."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as f:
        writer = csv.DictWriter(f, fieldnames=["variant", "auc", "precision_20", "lock_on_rate", "failed"])
        writer.writeheader()
        for name, result in results.items():
            writer.writerow(
                {
                    "variant": name,
                    "auc": repr(result.auc),
                    "precision_20": repr(result.precision_20),
                    "lock_on_rate": "" if result.lock_on_rate is None else repr(result.lock_on_rate),
                    "failed": result.failed_count,
                }
            )
    return path


def attribute_breakdown(result: EvalResult, records: Sequence[SequenceRecord]) -> Dict[str, Dict[str, float]]:
    """Mean AUC grouped by each sequence attribute value; absent blur and occlusion count as level 0."""
    specs = {r.seq_id: r.spec for r in records if r.spec is not None}
    groups: Dict[str, Dict[str, List[float]]] = {a: defaultdict(list) for a in BREAKDOWN_ATTRIBUTES}
    for seq in result.sequences:
        spec = specs.get(seq.seq_id)
        if spec is None:
            continue
        for attribute in BREAKDOWN_ATTRIBUTES:
            value = getattr(spec, attribute)
            groups[attribute][str(0 if value is None else value)].append(seq.auc)
    return {
        attribute: {value: float(np.mean(aucs)) for value, aucs in sorted(values.items())}
        for attribute, values in groups.items()
        if values
    }


def write_breakdown_csv(breakdown: Mapping[str, Mapping[str, float]], path: Path) -> Path:
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(["attribute", "value", "mean_auc"])
        for attribute, values in breakdown.items():
            for value, mean_auc in values.items():
                writer.writerow([attribute, value, repr(mean_auc)])
    return path


def delta_table(a: EvalResult, b: EvalResult) -> List[Dict[str, object]]:
    """Per-sequence and aggregate AUC / precision@20 of b minus a, over the sequences both contain."""
    first, second = a.by_id(), b.by_id()
    shared = sorted(set(first) & set(second))
    missing = set(first) ^ set(second)
    if missing:
        logging.warning(f"Delta table skips {len(missing)} sequence(s) present in only one result")

    rows: List[Dict[str, object]] = []
    for seq_id in shared:
        x, y = first[seq_id], second[seq_id]
        rows.append(
            {
                "seq_id": seq_id,
                "auc_a": x.auc,
                "auc_b": y.auc,
                "delta_auc": y.auc - x.auc,
                "precision_20_a": x.precision_20,
                "precision_20_b": y.precision_20,
                "delta_precision_20": y.precision_20 - x.precision_20,
            }
        )
    if rows:
        summary = {"seq_id": SUMMARY_ID}
        for key in rows[0]:
            if key != "seq_id":
                summary[key] = float(np.mean([row[key] for row in rows]))
        rows.append(summary)
    return rows


def write_delta_csv(rows: Sequence[Mapping[str, object]], path: Path) -> Path:
    fields = ["seq_id", "auc_a", "auc_b", "delta_auc", "precision_20_a", "precision_20_b", "delta_precision_20"]
    with open(path, "w", newline="") as f:
        writer = csv.DictWriter(f, fieldnames=fields)
        writer.writeheader()
        for row in rows:
            writer.writerow({k: row[k] if k == "seq_id" else repr(float(row[k])) for k in fields})
    return path


def plot_attention_maps(
    search_patch: np.ndarray,
    attention: Mapping[str, torch.Tensor],
    spatial: Sequence[int],
    path: Path,
    title: Optional[str] = None,
) -> Path:
    """
    Overlay, for each branch, the peak attention weight of every search cell
    on the search patch. `attention` maps branch names to (B, HW, keys)
    weights; batch element 0 is drawn.
    """
    branches = [name for name in ("pose", "distractor") if name in attention]
    height, width = spatial
    size = search_patch.shape[0]

    fig, axes = plt.subplots(1, len(branches) + 1, figsize=(3 * (len(branches) + 1), 3), dpi=100)
    axes = np.atleast_1d(axes)
    axes[0].imshow(np.clip(search_patch, 0, 255).astype(np.uint8))
    axes[0].set_title("search")
    for ax, name in zip(axes[1:], branches):
        weights = attention[name][0].detach().cpu().float()
        peak = weights.max(dim=-1).values.reshape(height, width).numpy()
        ax.imshow(np.clip(search_patch, 0, 255).astype(np.uint8))
        ax.imshow(peak, cmap="jet", alpha=0.5, extent=(0, size, size, 0), interpolation="bilinear")
        ax.set_title(name)
    for ax in axes:
        ax.axis("off")
    if title:
        fig.suptitle(title)
    fig.tight_layout()
    fig.savefig(path, format="png", metadata=PNG_METADATA)
    plt.close(fig)
    return Path(path)
