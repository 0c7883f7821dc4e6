# tests/cli/conftest.py
import pytest

from ditra.__main__ import main
from ditra.tests.cli.helpers import SMALL_FRAMES, TINY_MODEL


@pytest.fixture(scope="module")
def dataset(tmp_path_factory):
    root = tmp_path_factory.mktemp("cli") / "dataset"
    code = main(["generate", "--count", "3", "--seed", "5", "--workers", "2", "--out", str(root), *SMALL_FRAMES])
    assert code == 0
    return root


@pytest.fixture(scope="module")
def opaque_dataset(tmp_path_factory):
    root = tmp_path_factory.mktemp("cli") / "opaque"
    code = main(["generate", "--opaque", "--count", "2", "--seed", "6", "--out", str(root), *SMALL_FRAMES])
    assert code == 0
    return root


@pytest.fixture(scope="module")
def phase1_checkpoint(tmp_path_factory, dataset, opaque_dataset):
    out = tmp_path_factory.mktemp("cli") / "phase1"
    args = ["train", "--phase", "1", "--dataset", str(dataset), "--opaque-dataset", str(opaque_dataset)]
    assert main([*args, "--out", str(out), *TINY_MODEL]) == 0
    return out / "phase1.pt"
