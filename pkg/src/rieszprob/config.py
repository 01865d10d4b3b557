"""Experiment and verification configs: INI-style ``key = value`` sections, or JSON.

INI layout::

    [verify]
    seed = 7
    trials = 100

    [process.fair]
    weights = 1, 1
    block_of = 0, 1
    f = 1/2, 1/3
    n = 6
    representation = full

    [converge]
    experiment = lln
    n = 10, 100, 1000, 10000
    p = 1/2
    eps = 1/10

Lists are comma separated; ``a..b`` expands to an inclusive integer range.
JSON configs use the same keys with ``processes`` as a list of objects.
"""

from __future__ import annotations

import configparser
import json
from fractions import Fraction
from pathlib import Path


class ConfigError(ValueError):
    """Malformed or unusable configuration (CLI exit code 2)."""


def _split(value) -> list:
    if isinstance(value, (list, tuple)):
        return list(value)
    if isinstance(value, (int, float)):
        return [value]
    items = []
    for tok in str(value).split(","):
        tok = tok.strip()
        if not tok:
            continue
        if ".." in tok:
            lo, hi = tok.split("..", 1)
            items.extend(range(int(lo), int(hi) + 1))
        else:
            items.append(tok)
    return items


def int_list(value, key: str) -> list[int]:
    try:
        return [int(v) for v in _split(value)]
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{key}: expected a list of integers, got {value!r}") from exc


def fraction_list(value, key: str) -> list[Fraction]:
    try:
        return [Fraction(str(v).strip()) for v in _split(value)]
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        raise ConfigError(f"{key}: expected rationals, got {value!r}") from exc


def fraction(value, key: str) -> Fraction:
    vals = fraction_list(value, key)
    if len(vals) != 1:
        raise ConfigError(f"{key}: expected a single value, got {value!r}")
    return vals[0]


def integer(value, key: str) -> int:
    vals = int_list(value, key)
    if len(vals) != 1:
        raise ConfigError(f"{key}: expected a single integer, got {value!r}")
    return vals[0]


def boolean(value, key: str) -> bool:
    if isinstance(value, bool):
        return value
    s = str(value).strip().lower()
    if s in ("1", "true", "yes", "on"):
        return True
    if s in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"{key}: expected a boolean, got {value!r}")


def load_config(path: str | Path | None) -> dict:
    """Parse ``path`` into ``{"verify": {...}, "converge": {...}, "processes": [...]}``."""
    if path is None:
        return {"verify": {}, "converge": {}, "processes": []}
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if path.suffix == ".json" or text.lstrip().startswith("{"):
        return _from_json(text, path)
    return _from_ini(text, path)


def _from_json(text: str, path: Path) -> dict:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: top level must be an object")
    processes = data.get("processes", [])
    if not isinstance(processes, list) or not all(isinstance(p, dict) for p in processes):
        raise ConfigError(f"{path}: 'processes' must be a list of objects")
    for key in ("verify", "converge"):
        if not isinstance(data.get(key, {}), dict):
            raise ConfigError(f"{path}: '{key}' must be an object")
    return {
        "verify": data.get("verify", {}),
        "converge": data.get("converge", {}),
        "processes": processes,
    }


def _from_ini(text: str, path: Path) -> dict:
    parser = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    try:
        parser.read_string(text, source=str(path))
    except configparser.Error as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    out: dict = {"verify": {}, "converge": {}, "processes": []}
    for section in parser.sections():
        values = dict(parser.items(section))
        if section in ("verify", "converge"):
            out[section] = values
        elif section == "process" or section.startswith("process."):
            values.setdefault("name", section.partition(".")[2] or "process")
            out["processes"].append(values)
        else:
            raise ConfigError(f"{path}: unknown section [{section}]")
    return out
