"""Reading run configs and writing reports at full double precision."""

from __future__ import annotations

import csv
import json
import math
import sys
from typing import IO, Iterable

import jsonschema

from .errors import ConfigError


def fmt(v) -> str:
    """Seventeen significant digits; empty for absent (nan) values."""
    if v is None:
        return ""
    if isinstance(v, str):
        return v
    if isinstance(v, (bool,)):
        return "true" if v else "false"
    f = float(v)
    if math.isnan(f):
        return ""
    return format(f, ".17g")


def write_csv(fh: IO[str], header: Iterable[str], rows: Iterable[Iterable]) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(list(header))
    for row in rows:
        w.writerow([fmt(v) for v in row])


def _clean(obj):
    """NaN and infinities become ``null``; tuples become lists."""
    if isinstance(obj, float):
        return None if math.isnan(obj) or math.isinf(obj) else obj
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    return obj


def dumps(obj) -> str:
    """JSON text.  Floats use the shortest repr that round-trips exactly, so no
    digits are lost."""
    return json.dumps(_clean(obj), indent=2) + "\n"


def load_config(path: str | None, stdin: IO[str] | None = None) -> dict:
    """Parse a JSON config from ``path``; ``"-"`` reads standard input."""
    if path is None:
        return {}
    try:
        if path == "-":
            text = (stdin or sys.stdin).read()
        else:
            with open(path, encoding="utf-8") as fh:
                text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path!r}: {exc}") from exc
    try:
        cfg = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"malformed JSON in {path!r}: {exc}") from exc
    if not isinstance(cfg, dict):
        raise ConfigError("config must be a JSON object")
    return cfg


def validate(cfg: dict, schema: dict, what: str) -> None:
    try:
        jsonschema.validate(cfg, schema)
    except jsonschema.ValidationError as exc:
        where = "/".join(map(str, exc.absolute_path)) or "<root>"
        raise ConfigError(f"{what} config invalid at {where}: {exc.message}") from exc
