# tests/core/test_config.py
import pytest
from pydantic import BaseModel, ConfigDict

from ditra.config import dump_config, flatten_config, load_run_config, nest_keys, parse_key_values
from ditra.model.config import ModelConfig


class SampleConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    seed: int = 0
    name: str = "run"
    model: ModelConfig = ModelConfig()


def test_parse_skips_comments_and_blank_lines():
    lines = ["# header", "", "seed = 4", "name=a=b"]
    assert parse_key_values(lines, "cfg") == {"seed": "4", "name": "a=b"}


@pytest.mark.parametrize("line, message", [("seed", "expected key=value"), ("=3", "empty key")])
def test_parse_errors_name_the_line(line, message):
    with pytest.raises(ValueError, match=f"cfg:2: {message}"):
        parse_key_values(["seed=1", line], "cfg")


def test_nest_keys():
    assert nest_keys({"a.b": 1, "a.c": 2, "d": 3}) == {"a": {"b": 1, "c": 2}, "d": 3}
    with pytest.raises(ValueError, match="conflicts"):
        nest_keys({"a": 1, "a.b": 2})


def test_file_then_overrides(tmp_path):
    path = tmp_path / "run.txt"
    path.write_text("seed=3\nmodel.channels=32\nname=file\n")
    cfg = load_run_config(str(path), ["name=cli"], SampleConfig, defaults={"seed": 1, "name": "default"})
    assert (cfg.seed, cfg.name, cfg.model.channels) == (3, "cli", 32)
    assert cfg.model.heads == 8


def test_unknown_nested_key_is_rejected():
    with pytest.raises(ValueError, match="Invalid configuration"):
        load_run_config(None, ["model.colour=red"], SampleConfig)


def test_dump_is_sorted_dotted_and_reloadable(tmp_path):
    cfg = load_run_config(None, ["seed=9", "model.heads=4"], SampleConfig)
    path = dump_config(cfg, tmp_path)
    lines = path.read_text().splitlines()
    assert lines == sorted(lines)
    assert "model.heads=4" in lines and "seed=9" in lines
    assert load_run_config(str(path), None, SampleConfig) == cfg
    assert flatten_config(cfg)["model.backbone"] == "desk"
