# tests/cli/test_config_resolution.py
from unittest.mock import patch

import pytest

from ditra.__main__ import TrainRunConfig, build_parser, cli_main, resolve_config


def resolve(argv):
    return resolve_config(build_parser().parse_args(argv))


def test_precedence_defaults_file_set_flag(tmp_path):
    config = tmp_path / "run.txt"
    config.write_text("# generation\nseed=1\ncount=2\nframe_count=9\n")
    cfg = resolve(["generate", "--config", str(config), "--set", "count=3", "--set", "frame_count=7", "--count", "4"])
    assert cfg.seed == 1
    assert cfg.count == 4
    assert cfg.frame_count == 7
    assert cfg.frame_width == 320


def test_unknown_key_is_rejected():
    with pytest.raises(ValueError, match="Invalid configuration"):
        resolve(["generate", "--set", "colour=blue"])


def test_missing_config_file_is_reported(tmp_path):
    with pytest.raises(FileNotFoundError):
        resolve(["generate", "--config", str(tmp_path / "absent.txt")])


def test_environment_sets_the_dataset_root(tmp_path):
    with patch.dict("os.environ", {"DITRA_DATASET_ROOT": str(tmp_path / "sequences"), "DITRA_WORKERS": "3"}):
        cfg = resolve(["eval", "--tracker", "oracle"])
    assert cfg.dataset == tmp_path / "sequences"
    assert cfg.workers == 3


def test_train_starts_from_the_desk_schedule():
    cfg = resolve(["train", "--set", "train.lr=0.001", "--ablate", "dis"])
    assert isinstance(cfg, TrainRunConfig)
    assert cfg.train.lr == 0.001
    assert cfg.train.phase1_epochs == 2000
    assert cfg.train.steps_per_epoch == 1
    assert cfg.ablate == "dis"


def test_cli_main_exits_nonzero_on_error(tmp_path):
    empty = tmp_path / "empty"
    empty.mkdir()
    argv = ["ditra", "eval", "--tracker", "oracle", "--dataset", str(empty), "--out", str(tmp_path / "out")]
    with patch("sys.argv", argv), pytest.raises(SystemExit) as exit_info:
        cli_main()
    assert exit_info.value.code == 1
