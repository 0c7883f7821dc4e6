# src/ditra/__main__.py
import argparse
import functools
import logging
import sys
from pathlib import Path
from typing import Callable, Dict, List, Literal, Optional, Sequence, Type

import anyio
import torch
from pydantic import BaseModel, ConfigDict, Field

# Rich imports
from rich import print
from rich.markdown import Markdown
from rich.panel import Panel
from rich.table import Table

from ditra.config import dump_config, load_run_config
from ditra.environment import default_dataset_root, default_output_root, default_workers
from ditra.errors import DatasetError, UsageError
from ditra.evalkit.ope import EvalResult, evaluate_traces, run_ope
from ditra.evalkit.report import (
    attribute_breakdown,
    delta_table,
    plot_curves,
    report,
    write_breakdown_csv,
    write_delta_csv,
    write_summary_csv,
)
from ditra.model.checkpoint import load_checkpoint
from ditra.model.config import ModelConfig
from ditra.model.network import DiTraNetwork
from ditra.seqgen.backgrounds import DirectoryBackgrounds
from ditra.seqgen.dataset_io import read_dataset
from ditra.seqgen.generate import generate_dataset
from ditra.seqgen.render import SequenceRecord
from ditra.tracker.trace import Trace, read_traces, write_trace
from ditra.tracker.tracker import DiTraTracker, OracleTracker, StaticTracker, Tracker
from ditra.training.config import TrainConfig
from ditra.training.sampling import TrainingPools
from ditra.training.trainer import train_phase1, train_phase2

ABLATIONS = ("full", "dis", "pos", "rec", "trs")

AblationName = Literal["full", "dis", "pos", "rec", "trs"]
TrackerName = Literal["ditra", "oracle", "static"]

# Configure logging
logging.basicConfig(
    level=logging.WARNING,
    format="%(asctime)s - %(levelname)s - %(message)s",
    stream=sys.stderr,
)


def _desk_train() -> TrainConfig:
    return TrainConfig.desk_scale()


class RunConfig(BaseModel):
    """Settings shared by every command."""

    model_config = ConfigDict(extra="forbid")

    seed: int = 0
    out: Path
    workers: int = Field(default=4, ge=1)


class GenerateConfig(RunConfig):
    count: int = Field(default=8, gt=0)
    frame_count: int = Field(default=40, ge=2)
    frame_height: int = Field(default=240, gt=0)
    frame_width: int = Field(default=320, gt=0)
    opaque: bool = False
    suite: Literal["standard", "crossing"] = "standard"
    sweep: Optional[str] = None
    # directory of background images; procedural textures when unset
    backgrounds: Optional[Path] = None


class TrainRunConfig(RunConfig):
    dataset: Path
    opaque_dataset: Optional[Path] = None
    phase: int = Field(default=1, ge=1, le=2)
    ablate: AblationName = "full"
    init_checkpoint: Optional[Path] = None
    device: str = "cpu"
    model: ModelConfig = Field(default_factory=ModelConfig)
    train: TrainConfig = Field(default_factory=_desk_train)


class TrackRunConfig(RunConfig):
    dataset: Path
    checkpoint: Optional[Path] = None
    device: str = "cpu"


class EvalRunConfig(RunConfig):
    dataset: Path
    tracker: TrackerName = "ditra"
    checkpoint: Optional[Path] = None
    # stored traces to score instead of running a tracker
    traces: Optional[Path] = None
    # second trace set for a per-sequence delta table
    compare: Optional[Path] = None
    device: str = "cpu"


class AblationRunConfig(RunConfig):
    dataset: Path
    opaque_dataset: Optional[Path] = None
    # evaluation sequences; the training set when unset
    eval_dataset: Optional[Path] = None
    device: str = "cpu"
    model: ModelConfig = Field(default_factory=ModelConfig)
    train: TrainConfig = Field(default_factory=_desk_train)


CONFIG_MODELS: Dict[str, Type[RunConfig]] = {
    "generate": GenerateConfig,
    "train": TrainRunConfig,
    "track": TrackRunConfig,
    "eval": EvalRunConfig,
    "ablation": AblationRunConfig,
}


def _environment_defaults(command: str, model_cls: Type[BaseModel]) -> Dict[str, object]:
    defaults: Dict[str, object] = {"workers": default_workers()}
    if command == "generate":
        defaults["out"] = str(default_dataset_root())
    else:
        defaults["out"] = str(default_output_root() / command)
    if "dataset" in model_cls.model_fields:
        defaults["dataset"] = str(default_dataset_root())

    # train and ablation start from the desk-scale schedule
    if "train" in model_cls.model_fields:
        for key, value in _desk_train().model_dump().items():
            defaults[f"train.{key}"] = value
    return defaults


def _flag_overrides(args: argparse.Namespace) -> List[str]:
    """Dedicated flags become `key=value` overrides that win over the file and --set."""
    names = (
        "seed",
        "out",
        "workers",
        "dataset",
        "opaque_dataset",
        "eval_dataset",
        "count",
        "suite",
        "sweep",
        "backgrounds",
        "phase",
        "ablate",
        "init_checkpoint",
        "checkpoint",
        "tracker",
        "traces",
        "compare",
        "device",
    )
    overrides = [f"{name}={getattr(args, name)}" for name in names if getattr(args, name, None) is not None]
    if getattr(args, "opaque", False):
        overrides.append("opaque=true")
    return overrides


def resolve_config(args: argparse.Namespace) -> RunConfig:
    model_cls = CONFIG_MODELS[args.command]
    overrides = list(args.set or []) + _flag_overrides(args)
    return load_run_config(args.config, overrides, model_cls, _environment_defaults(args.command, model_cls))


def _load_records(root: Path) -> List[SequenceRecord]:
    records = read_dataset(root)
    if not records:
        error_msg = f"No sequences under {root}"
        logging.error(error_msg)
        raise DatasetError(error_msg)
    logging.info(f"Loaded {len(records)} sequence(s) from {root}")
    return records


def _load_model(checkpoint: Optional[Path], **overrides) -> DiTraNetwork:
    if checkpoint is None:
        error_msg = "A trained checkpoint is required (--checkpoint)"
        logging.error(error_msg)
        raise UsageError(error_msg)
    model, info = load_checkpoint(checkpoint, **overrides)
    logging.info(f"Tracking with the phase-{info['phase']} checkpoint {checkpoint}")
    return model


def _tracker_factory(kind: str, model: Optional[DiTraNetwork], device: str) -> Callable[[SequenceRecord], Tracker]:
    if kind == "oracle":
        return lambda record: OracleTracker(record.target_boxes)
    if kind == "static":
        return lambda record: StaticTracker()
    return lambda record: DiTraTracker(model, device)


def _track_all(
    factory: Callable[[SequenceRecord], Tracker], records: Sequence[SequenceRecord], out_dir: Path, workers: int
) -> Dict[str, Trace]:
    traces = anyio.run(run_ope, factory, records, workers)
    for trace in traces.values():
        write_trace(trace, out_dir)
    return traces


def _results_table(results: Dict[str, EvalResult], title: str) -> Table:
    table = Table(title=title)
    table.add_column("Tracker")
    table.add_column("AUC", justify="right")
    table.add_column("Precision@20", justify="right")
    table.add_column("Lock-on", justify="right")
    table.add_column("Failed", justify="right")
    for name, result in results.items():
        lock_on = "-" if result.lock_on_rate is None else f"{result.lock_on_rate:.3f}"
        table.add_row(name, f"{result.auc:.4f}", f"{result.precision_20:.4f}", lock_on, str(result.failed_count))
    return table


def cmd_generate(cfg: GenerateConfig) -> Path:
    """Render a dataset of sequences with ground truth under `cfg.out`."""
    backgrounds = DirectoryBackgrounds(cfg.backgrounds) if cfg.backgrounds is not None else None
    stats = anyio.run(
        functools.partial(
            generate_dataset,
            cfg.out,
            cfg.count,
            cfg.seed,
            workers=cfg.workers,
            backgrounds=backgrounds,
            frame_count=cfg.frame_count,
            frame_size=(cfg.frame_height, cfg.frame_width),
            opaque=cfg.opaque,
            distractor_mode="crossing" if cfg.suite == "crossing" else "follow",
            sweep=cfg.sweep,
        )
    )
    dump_config(cfg, cfg.out)

    table = Table(title=f"Attribute statistics ({stats['count']} sequences)")
    table.add_column("Attribute")
    table.add_column("Value")
    for key, value in stats.items():
        table.add_row(key, f"{value:.3f}" if isinstance(value, float) else str(value))
    print(table)
    return cfg.out


def _train_pools(dataset: Path, opaque_dataset: Optional[Path], train: TrainConfig) -> TrainingPools:
    transparent = _load_records(dataset) if train.transparent_fraction > 0 else []
    opaque = _load_records(opaque_dataset) if opaque_dataset is not None else []
    return TrainingPools(transparent=transparent, opaque=opaque)


def _ablated_configs(model: ModelConfig, train: TrainConfig, ablate: str):
    """Model and schedule for one variant; `trs` trains on the opaque pool only."""
    if ablate == "trs":
        train = train.model_copy(update={"transparent_finetune": False})
    return model.ablated(ablate), train


def cmd_train(cfg: TrainRunConfig) -> Path:
    """Run one training phase and return its checkpoint."""
    if cfg.phase == 2 and cfg.init_checkpoint is None:
        error_msg = "Phase 2 needs --init-checkpoint pointing at a phase-1 checkpoint"
        logging.error(error_msg)
        raise UsageError(error_msg)

    model_cfg, train_cfg = _ablated_configs(cfg.model, cfg.train, cfg.ablate)
    dump_config(cfg, cfg.out)
    torch.manual_seed(cfg.seed)

    if cfg.phase == 1:
        model = DiTraNetwork(model_cfg)
        if cfg.init_checkpoint is not None:
            model, _ = load_checkpoint(cfg.init_checkpoint, **_ablation_flags(model_cfg))
        pools = _train_pools(cfg.dataset, cfg.opaque_dataset, train_cfg)
        result = train_phase1(model, pools, train_cfg, cfg.out, seed=cfg.seed, device=cfg.device)
    else:
        records = _load_records(cfg.dataset)
        _, result = train_phase2(cfg.init_checkpoint, records, train_cfg, cfg.out, seed=cfg.seed, device=cfg.device)

    print(
        Panel(
            Markdown(
                f"## Phase {cfg.phase} done ({cfg.ablate})\n\n"
                f"- **Steps:** {result.steps}\n"
                f"- **Last loss:** {result.last_loss:.4f}\n"
                f"- **Checkpoint:** `{result.checkpoint}`\n"
                f"- **Log:** `{result.log}`"
            ),
            style="bold green",
        )
    )
    return result.checkpoint


def _ablation_flags(model_cfg: ModelConfig) -> Dict[str, bool]:
    return {
        "disable_dis": model_cfg.disable_dis,
        "disable_pos": model_cfg.disable_pos,
        "disable_recent": model_cfg.disable_recent,
    }


def cmd_track(cfg: TrackRunConfig) -> Path:
    """Track every sequence of the dataset and write one trace per sequence."""
    model = _load_model(cfg.checkpoint)
    records = _load_records(cfg.dataset)
    dump_config(cfg, cfg.out)
    torch.manual_seed(cfg.seed)

    traces = _track_all(_tracker_factory("ditra", model, cfg.device), records, cfg.out, cfg.workers)
    failed = sum(t.failed for t in traces.values())
    print(
        Panel(
            Markdown(f"## Tracking done\n\n- **Sequences:** {len(traces)}\n- **Failed:** {failed}\n- **Traces:** `{cfg.out}`"),
            style="bold red" if failed else "bold green",
        )
    )
    return cfg.out


def cmd_eval(cfg: EvalRunConfig) -> EvalResult:
    """Score a tracker (or stored traces) on the dataset and write the report."""
    model = None
    if cfg.traces is None and cfg.tracker == "ditra":
        model = _load_model(cfg.checkpoint)
    records = _load_records(cfg.dataset)
    dump_config(cfg, cfg.out)
    torch.manual_seed(cfg.seed)

    if cfg.traces is not None:
        traces = read_traces(cfg.traces)
        name = cfg.traces.name
    else:
        traces = _track_all(_tracker_factory(cfg.tracker, model, cfg.device), records, cfg.out / "traces", cfg.workers)
        name = cfg.tracker

    result = evaluate_traces(records, traces)
    report(result, cfg.out, name=name)
    write_breakdown_csv(attribute_breakdown(result, records), cfg.out / "breakdown.csv")
    print(_results_table({name: result}, "OPE results"))

    if cfg.compare is not None:
        baseline = evaluate_traces(records, read_traces(cfg.compare))
        rows = delta_table(baseline, result)
        write_delta_csv(rows, cfg.out / "delta.csv")

        table = Table(title=f"{name} minus {cfg.compare.name}")
        table.add_column("Sequence")
        table.add_column("dAUC", justify="right")
        table.add_column("dPrecision@20", justify="right")
        for row in rows:
            table.add_row(str(row["seq_id"]), f"{row['delta_auc']:+.4f}", f"{row['delta_precision_20']:+.4f}")
        print(table)
    return result


def _train_variant(cfg: AblationRunConfig, variant: str, pools: TrainingPools, records: List[SequenceRecord]) -> DiTraNetwork:
    model_cfg, train_cfg = _ablated_configs(cfg.model, cfg.train, variant)
    variant_dir = cfg.out / variant
    torch.manual_seed(cfg.seed)

    if variant == "trs":
        pools = TrainingPools(transparent=[], opaque=pools.opaque)
    phase1 = train_phase1(DiTraNetwork(model_cfg), pools, train_cfg, variant_dir, seed=cfg.seed, device=cfg.device)
    model, _ = train_phase2(phase1.checkpoint, records, train_cfg, variant_dir, seed=cfg.seed, device=cfg.device)
    return model


def cmd_ablation(cfg: AblationRunConfig) -> Dict[str, EvalResult]:
    """Train and evaluate every variant identically, then compare them."""
    records = _load_records(cfg.dataset)
    opaque = _load_records(cfg.opaque_dataset) if cfg.opaque_dataset is not None else []
    pools = TrainingPools(transparent=records, opaque=opaque)
    eval_records = _load_records(cfg.eval_dataset) if cfg.eval_dataset is not None else records
    dump_config(cfg, cfg.out)

    results: Dict[str, EvalResult] = {}
    for variant in ABLATIONS:
        print(f"[cyan]\nTraining variant '{variant}'...[/cyan]")
        model = _train_variant(cfg, variant, pools, records)

        traces = _track_all(
            _tracker_factory("ditra", model, cfg.device), eval_records, cfg.out / variant / "traces", cfg.workers
        )
        results[variant] = evaluate_traces(eval_records, traces)
        report(results[variant], cfg.out / variant, name=variant)

    write_summary_csv(results, cfg.out / "summary.csv")
    plot_curves(results, cfg.out)
    print(_results_table(results, "Ablation"))
    return results


HANDLERS = {
    "generate": cmd_generate,
    "train": cmd_train,
    "track": cmd_track,
    "eval": cmd_eval,
    "ablation": cmd_ablation,
}


def build_parser() -> argparse.ArgumentParser:
    # setup the parser
    parser = argparse.ArgumentParser(description="Distractor-aware transparent object tracking toolkit")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key=value configuration file.")
    common.add_argument("--seed", type=int, help="Random seed.")
    common.add_argument("--out", help="Output directory.")
    common.add_argument("--workers", type=int, help="Parallel per-sequence workers.")
    common.add_argument(
        "--set",
        action="append",
        metavar="KEY=VALUE",
        help="Override a config key (dotted for nested keys). Can be specified multiple times.",
    )
    common.add_argument(
        "--log-level",
        default="INFO",
        choices=["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"],
        help="Logging level. Defaults to INFO.",
    )

    sub = parser.add_subparsers(dest="command", required=True)

    generate = sub.add_parser("generate", parents=[common], help="Render a synthetic sequence dataset.")
    generate.add_argument("--count", type=int, help="Number of sequences.")
    generate.add_argument("--opaque", action="store_true", default=False, help="Render fully opaque targets.")
    generate.add_argument("--suite", choices=["standard", "crossing"], help="Distractor motion of the suite.")
    generate.add_argument("--sweep", help="Render one sequence per level of this attribute.")
    generate.add_argument("--backgrounds", help="Directory of background images.")

    train = sub.add_parser("train", parents=[common], help="Run one training phase.")
    train.add_argument("--phase", type=int, choices=[1, 2], help="Training phase. Defaults to 1.")
    train.add_argument("--ablate", choices=list(ABLATIONS), help="Ablated variant to train.")
    train.add_argument("--init-checkpoint", help="Checkpoint to start from (required for phase 2).")
    train.add_argument("--dataset", help="Transparent training sequences.")
    train.add_argument("--opaque-dataset", help="Opaque training sequences.")
    train.add_argument("--device", help="Torch device.")

    track = sub.add_parser("track", parents=[common], help="Write box traces for a dataset.")
    track.add_argument("--checkpoint", help="Trained checkpoint.")
    track.add_argument("--dataset", help="Sequences to track.")
    track.add_argument("--device", help="Torch device.")

    evaluate = sub.add_parser("eval", parents=[common], help="One-pass evaluation.")
    evaluate.add_argument("--tracker", choices=["ditra", "oracle", "static"], help="Tracker to evaluate.")
    evaluate.add_argument("--checkpoint", help="Trained checkpoint for --tracker ditra.")
    evaluate.add_argument("--traces", help="Score stored traces instead of running a tracker.")
    evaluate.add_argument("--compare", help="Second trace directory for a delta table.")
    evaluate.add_argument("--dataset", help="Sequences to evaluate on.")
    evaluate.add_argument("--device", help="Torch device.")

    ablation = sub.add_parser("ablation", parents=[common], help="Train and compare the five variants.")
    ablation.add_argument("--dataset", help="Transparent training sequences.")
    ablation.add_argument("--opaque-dataset", help="Opaque training sequences.")
    ablation.add_argument("--eval-dataset", help="Evaluation sequences.")
    ablation.add_argument("--device", help="Torch device.")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.getLogger().setLevel(args.log_level)

    try:
        cfg = resolve_config(args)
        HANDLERS[args.command](cfg)
        return 0
    except Exception as e:
        print(f"[red]Error occurred:[/red] {e}")
        return 1


def cli_main():
    sys.exit(main())


if __name__ == "__main__":
    cli_main()
