# config.py
import logging
from pathlib import Path
from typing import Any, Dict, Iterable, Optional, Type, TypeVar

from pydantic import BaseModel, ValidationError

ConfigT = TypeVar("ConfigT", bound=BaseModel)


def parse_key_values(lines: Iterable[str], source: str) -> Dict[str, str]:
    """Parse `key=value` lines; blank lines and `#` comments are skipped."""
    values: Dict[str, str] = {}
    for number, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ValueError(f"{source}:{number}: expected key=value, got {line!r}")
        key, value = line.split("=", 1)
        key = key.strip()
        if not key:
            raise ValueError(f"{source}:{number}: empty key")
        values[key] = value.strip()
    return values


def nest_keys(flat: Dict[str, Any]) -> Dict[str, Any]:
    """Turn dotted keys (`model.channels`) into nested dictionaries."""
    nested: Dict[str, Any] = {}
    for key, value in flat.items():
        node = nested
        parts = key.split(".")
        for part in parts[:-1]:
            child = node.setdefault(part, {})
            if not isinstance(child, dict):
                raise ValueError(f"Key '{key}' conflicts with scalar '{part}'")
            node = child
        node[parts[-1]] = value
    return nested


def flatten_config(config: BaseModel) -> Dict[str, Any]:
    """Dotted-key view of a (possibly nested) config model."""
    flat: Dict[str, Any] = {}

    def walk(prefix: str, value: Any) -> None:
        if isinstance(value, dict):
            for key, item in value.items():
                walk(f"{prefix}.{key}" if prefix else key, item)
        else:
            flat[prefix] = value

    walk("", config.model_dump(mode="json"))
    return flat


def load_run_config(
    config_path: Optional[str],
    overrides: Optional[Iterable[str]],
    model_cls: Type[ConfigT],
    defaults: Optional[Dict[str, Any]] = None,
) -> ConfigT:
    """
    Resolve a run config: model defaults, then the key=value file, then the
    command-line `key=value` overrides.
    """
    flat: Dict[str, Any] = dict(defaults or {})
    try:
        if config_path:
            # debug
            logging.debug(f"Loading config from {config_path}")

            # read the configuration file
            with open(config_path, "r") as config_file:
                flat.update(parse_key_values(config_file, config_path))

        # command line wins
        if overrides:
            flat.update(parse_key_values(overrides, "--set"))

        result = model_cls.model_validate(nest_keys(flat))

        # debug
        logging.debug(f"Resolved config: {flatten_config(result)}")

        # return result
        return result

    except FileNotFoundError:
        # error
        error_msg = f"Configuration file not found: {config_path}"
        logging.error(error_msg)
        raise FileNotFoundError(error_msg)
    except ValidationError as e:
        # validation error
        error_msg = f"Invalid configuration: {e.error_count()} error(s)\n{e}"
        logging.error(error_msg)
        raise ValueError(error_msg) from e
    except ValueError as e:
        # error
        logging.error(str(e))
        raise


def _format_value(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return str(value).lower()
    return str(value)


def dump_config(config: BaseModel, out_dir: Path, name: str = "resolved_config.txt") -> Path:
    """Write the fully resolved config beside a command's outputs."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    lines = [f"{key}={_format_value(value)}" for key, value in sorted(flatten_config(config).items())]
    path = out_dir / name
    path.write_text("\n".join(lines) + "\n")
    logging.info("Resolved config:\n" + "\n".join(lines))
    return path
