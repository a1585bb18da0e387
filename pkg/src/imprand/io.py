"""File formats: ASCII bit streams, JSON reports with an embedded run manifest, CSV tables."""
from __future__ import annotations

import csv
import hashlib
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import FormatError

_WHITESPACE = np.array([9, 10, 11, 12, 13, 32], dtype=np.uint8)


def parse_bits(data: bytes) -> np.ndarray:
    """'0'/'1' characters; whitespace is ignored, anything else is an error."""
    raw = np.frombuffer(data, dtype=np.uint8)
    raw = raw[~np.isin(raw, _WHITESPACE)]
    bad = np.flatnonzero((raw != 48) & (raw != 49))
    if bad.size:
        raise FormatError(f"bit stream contains byte {raw[bad[0]]!r} that is not '0', '1' or whitespace")
    return (raw - 48).astype(np.uint8)


def read_bits(path) -> np.ndarray:
    return parse_bits(Path(path).read_bytes())


def format_bits(bits) -> str:
    return (np.asarray(bits, dtype=np.uint8) + 48).tobytes().decode("ascii")


def write_bits(path, bits) -> None:
    Path(path).write_text(format_bits(bits), encoding="ascii")


def file_digest(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _clean(obj):
    # JSON has no infinities; -inf log capital (capital exactly 0) becomes null
    if isinstance(obj, float):
        return obj if math.isfinite(obj) else None
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.generic):
        return _clean(obj.item())
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    return obj


def dumps(doc) -> str:
    return json.dumps(_clean(doc), indent=2, sort_keys=True, allow_nan=False) + "\n"


def write_json(path, doc) -> None:
    if path is None or str(path) == "-":
        sys.stdout.write(dumps(doc))
    else:
        Path(path).write_text(dumps(doc), encoding="utf-8")


def read_json(path):
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: invalid JSON ({exc})") from None


def write_csv(path, header, rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            # repr keeps full precision; zero capital shows as -inf
            w.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in row])


@dataclass
class RunManifest:
    command: str
    params: dict
    seeds: list = field(default_factory=list)
    version: str = ""
    inputs: dict = field(default_factory=dict)

    @classmethod
    def build(cls, command: str, params: dict, seeds=(), input_files=()) -> RunManifest:
        from . import __version__
        return cls(command, dict(sorted(params.items())), list(seeds), __version__,
                   {str(p): file_digest(p) for p in input_files})

    def to_dict(self):
        return {"command": self.command, "params": self.params, "seeds": self.seeds,
                "version": self.version, "input_sha256": self.inputs}
