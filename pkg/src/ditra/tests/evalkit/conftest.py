# tests/evalkit/conftest.py
import pytest

from ditra.tests.evalkit.helpers import moving_record


@pytest.fixture
def records():
    return [moving_record(f"seq-{i:04d}", transparency=1 + i % 3) for i in range(4)]
