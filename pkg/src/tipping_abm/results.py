"""Run results: per-step series, CSV emission, manifests.

CSV schema (hybrid engine): t,u,pbar,wbar,S,k,bankruptcies,active,inflation
with two extra columns R_measured,mean_rate for the agent-based engine.
Floats are written as their shortest round-trip decimal (repr), header row
included, decimal point, no locale. The manifest (JSON next to the CSV)
carries everything needed to replay the run bit-identically within this
implementation: full config, seed, engine, code version, backend.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

MARK0_SCHEMA = ["t", "u", "pbar", "wbar", "S", "k", "bankruptcies", "active", "inflation"]
MARK1_SCHEMA = MARK0_SCHEMA + ["R_measured", "mean_rate"]
_INT_COLUMNS = {"t", "bankruptcies", "active"}

MANIFEST_NAME = "manifest.json"
SERIES_NAME = "series.csv"


@dataclass
class RunResult:
    """Time series of observables plus the manifest describing the run."""

    columns: dict[str, np.ndarray]
    manifest: dict[str, Any] = field(default_factory=dict)

    @property
    def schema(self) -> list[str]:
        return list(self.columns.keys())

    @property
    def n_steps(self) -> int:
        return len(self.columns["t"])

    def write(self, out_dir: str | Path) -> tuple[Path, Path]:
        """Write series.csv and manifest.json into `out_dir`."""
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        csv_path = out / SERIES_NAME
        write_series_csv(self.columns, csv_path)
        manifest_path = out / MANIFEST_NAME
        write_manifest(self.manifest, manifest_path)
        return csv_path, manifest_path


def _format_value(column: str, value: Any) -> str:
    if column in _INT_COLUMNS:
        return str(int(value))
    v = float(value)
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return repr(v)


def write_series_csv(columns: dict[str, np.ndarray], path: str | Path) -> None:
    names = list(columns.keys())
    n = len(columns[names[0]])
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(names) + "\n")
        for row in range(n):
            fh.write(
                ",".join(_format_value(c, columns[c][row]) for c in names) + "\n"
            )


def read_series_csv(path: str | Path) -> dict[str, np.ndarray]:
    """Read a series CSV back into named arrays (ints where documented)."""
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().strip()
        if not header:
            raise ValueError(f"{path}: empty CSV")
        names = header.split(",")
        rows = [line.strip().split(",") for line in fh if line.strip()]
    if any(len(r) != len(names) for r in rows):
        raise ValueError(f"{path}: ragged rows do not match header {names}")
    out: dict[str, np.ndarray] = {}
    for idx, name in enumerate(names):
        raw = [r[idx] for r in rows]
        if name in _INT_COLUMNS:
            out[name] = np.array([int(v) for v in raw], dtype=np.int64)
        else:
            out[name] = np.array([float(v) for v in raw])
    return out


def write_manifest(manifest: dict[str, Any], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


def read_manifest(path: str | Path) -> dict[str, Any]:
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)
