"""Byte-stable serialisation and the append-only run log."""

from __future__ import annotations

import datetime as _dt
import hashlib
import json
import math
import os
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import numpy as np

SCHEMA_VERSION = 1
LOG_ENV = "SPECGAP_LOG_DIR"
DEFAULT_LOG_DIR = ".specgap"
LOG_NAME = "runs.jsonl"


def _encode(obj) -> str:
    if obj is None:
        return "null"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if not math.isfinite(x):
            raise ValueError(f"cannot serialise non-finite float {x}")
        s = format(x, ".17g")
        if not any(ch in s for ch in ".en"):
            s += ".0"
        return s
    if isinstance(obj, Fraction):
        return json.dumps(f"{obj.numerator}/{obj.denominator}")
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, dict):
        items = sorted(obj.items(), key=lambda kv: str(kv[0]))
        return "{" + ",".join(json.dumps(str(k)) + ":" + _encode(v) for k, v in items) + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        return "[" + ",".join(_encode(v) for v in obj) + "]"
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def dumps_canonical(obj) -> str:
    """JSON with sorted keys, no whitespace and floats at 17 significant digits."""
    return _encode(obj)


def digest(text: str | bytes) -> str:
    if isinstance(text, str):
        text = text.encode("utf-8")
    return hashlib.sha256(text).hexdigest()


@dataclass
class RunRecord:
    command: str
    argv: list
    inputs_digest: str
    seed: int | None
    outputs: dict
    timestamp: str
    schema_version: int = SCHEMA_VERSION

    def to_json_obj(self) -> dict:
        return {"schema_version": self.schema_version, "command": self.command,
                "argv": list(self.argv), "inputs_digest": self.inputs_digest,
                "seed": self.seed, "outputs": self.outputs,
                "outputs_digest": digest(dumps_canonical(self.outputs)),
                "timestamp": self.timestamp}


def log_dir() -> Path:
    return Path(os.environ.get(LOG_ENV, DEFAULT_LOG_DIR))


def append_record(rec: RunRecord, directory: str | Path | None = None) -> Path:
    d = Path(directory) if directory is not None else log_dir()
    d.mkdir(parents=True, exist_ok=True)
    path = d / LOG_NAME
    line = dumps_canonical(rec.to_json_obj()) + "\n"
    with open(path, "a", encoding="utf-8") as fh:
        fh.write(line)
    return path


def now_utc() -> str:
    return _dt.datetime.now(_dt.timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")
