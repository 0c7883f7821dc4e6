# model/checkpoint.py
import logging
from pathlib import Path
from typing import Any, Dict, Tuple

import torch

from ditra.errors import DatasetError
from ditra.model.config import ModelConfig
from ditra.model.network import DiTraNetwork

CHECKPOINT_FORMAT = "ditra-ckpt/1"


def save_checkpoint(path: Path, model: DiTraNetwork, phase: int, extra: Dict[str, Any] | None = None) -> Path:
    """One archive: format tag, config record, training phase and named weights."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    torch.save(
        {
            "format": CHECKPOINT_FORMAT,
            "config": model.cfg.model_dump(),
            "phase": phase,
            "extra": extra or {},
            "state_dict": model.state_dict(),
        },
        path,
    )
    logging.info(f"Saved phase-{phase} checkpoint to {path}")
    return path


def load_checkpoint(path: Path, **config_overrides) -> Tuple[DiTraNetwork, Dict[str, Any]]:
    """Rebuild the network from a checkpoint; `config_overrides` may flip ablation switches."""
    path = Path(path)
    if not path.is_file():
        error_msg = f"Checkpoint not found: {path}"
        logging.error(error_msg)
        raise DatasetError(error_msg)

    try:
        archive = torch.load(path, map_location="cpu", weights_only=True)
    except Exception as e:
        error_msg = f"Cannot read checkpoint {path}: {e}"
        logging.error(error_msg)
        raise DatasetError(error_msg)

    if not isinstance(archive, dict) or archive.get("format") != CHECKPOINT_FORMAT:
        error_msg = f"{path} is not a {CHECKPOINT_FORMAT} checkpoint"
        logging.error(error_msg)
        raise DatasetError(error_msg)

    cfg = ModelConfig(**{**archive["config"], **config_overrides})
    model = DiTraNetwork(cfg)
    model.load_state_dict(archive["state_dict"])
    model.eval()

    # debug
    logging.debug(f"Loaded phase-{archive['phase']} checkpoint from {path}")
    return model, {"phase": archive["phase"], "extra": archive["extra"]}
