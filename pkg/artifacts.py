import hashlib
import json
import logging
import math
from dataclasses import dataclass, field, asdict
from enum import Enum
from pathlib import Path
from typing import Any, Dict, Mapping

import numpy as np

logger = logging.getLogger(__name__)

MANIFEST_NAME = "manifest.json"


class ArtifactWriter:
    """
    Writes CSV tables into one output directory and remembers the content hash of
    every file it wrote.

    Values are formatted with a fixed number of significant digits, so identical
    arrays always give identical bytes.
    """

    def __init__(self, out_dir, float_format: str = "%.12e"):
        self._out_dir = Path(out_dir)
        self._float_format = float_format
        self._hashes: Dict[str, str] = {}
        self._out_dir.mkdir(parents=True, exist_ok=True)

    @property
    def out_dir(self) -> Path:
        return self._out_dir

    @property
    def outputs(self) -> Dict[str, str]:
        return dict(self._hashes)

    def write_csv(self, name: str, columns: Mapping[str, Any]) -> Path:
        """One header row naming each column (with its unit suffix), then one row per sample."""
        header = ",".join(columns)
        data = np.column_stack([np.asarray(values, dtype=float) for values in columns.values()])
        path = self._out_dir / name
        with open(path, "w", encoding="utf-8", newline="\n") as f:
            f.write(header + "\n")
            np.savetxt(f, data, delimiter=",", fmt=self._float_format)
        self._record(path)
        logger.info(f"Wrote {path} ({data.shape[0]} rows)")
        return path

    def write_manifest(self, manifest: "RunManifest") -> Path:
        manifest.outputs.update(self._hashes)
        path = self._out_dir / MANIFEST_NAME
        with open(path, "w", encoding="utf-8") as f:
            json.dump(_plain(manifest.to_dict()), f, indent=2, sort_keys=True)
            f.write("\n")
        logger.info(f"Wrote {path}")
        return path

    def _record(self, path: Path):
        self._hashes[path.name] = "sha256:" + hashlib.sha256(path.read_bytes()).hexdigest()


@dataclass
class RunManifest:
    """Config snapshot, derived quantities, stage timings and output hashes of one command run."""
    command: str
    config: Dict[str, Any]
    derived: Dict[str, Any] = field(default_factory=dict)
    timings_s: Dict[str, float] = field(default_factory=dict)
    outputs: Dict[str, str] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


def _plain(value):
    """JSON-safe copy: enums by value, arrays as lists, complex as [re, im], infinities as "inf"."""
    if isinstance(value, Enum):
        return _plain(value.value)
    if isinstance(value, dict):
        return {str(key): _plain(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(item) for item in value]
    if isinstance(value, np.ndarray):
        return _plain(value.tolist())
    if isinstance(value, (np.floating, np.complexfloating, np.integer, np.bool_)):
        value = value.item()
    if isinstance(value, complex):
        return [_plain(value.real), _plain(value.imag)]
    if isinstance(value, float) and not math.isfinite(value):
        return "inf" if value > 0 else ("-inf" if value < 0 else "nan")
    if isinstance(value, (str, int, float, bool)) or value is None:
        return value
    raise TypeError(f"cannot serialize {type(value).__name__}")
