# environment.py
import os
from pathlib import Path
from typing import Optional

from dotenv import load_dotenv

# Environment variables consulted for command defaults
DEFAULT_ENV_VARS = {
    "DITRA_DATASET_ROOT": "data/desk",
    "DITRA_OUTPUT_ROOT": "runs",
    "DITRA_WORKERS": "4",
}


def get_default_environment() -> dict[str, str]:
    """
    Retrieve the ditra defaults, letting a `.env` file and the process
    environment override the built-in values.
    """

    # pull in .env without clobbering variables that are already set
    load_dotenv(override=False)

    # get the current environment
    env = {
        key: value
        for key, default in DEFAULT_ENV_VARS.items()
        if (value := os.environ.get(key, default))
    }

    # return the dictionary
    return env


def default_dataset_root(explicit: Optional[str] = None) -> Path:
    return Path(explicit or get_default_environment()["DITRA_DATASET_ROOT"])


def default_output_root(explicit: Optional[str] = None) -> Path:
    return Path(explicit or get_default_environment()["DITRA_OUTPUT_ROOT"])


def default_workers(explicit: Optional[int] = None) -> int:
    if explicit is not None:
        return max(1, int(explicit))
    return max(1, int(get_default_environment()["DITRA_WORKERS"]))
