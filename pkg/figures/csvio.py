"""Schema-checked loading of the simulator's CSV outputs.

The figures package talks to the simulator only through its documented file
formats: per-run series CSVs (t,u,pbar,wbar,S,k,bankruptcies,active,
inflation[,R_measured,mean_rate]) and sweep phase maps
(axis1,axis2,label,mean_u,amplitude,n_ok). Nothing here ever runs a
simulation.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

SERIES_REQUIRED = ["t", "u", "pbar", "wbar", "S", "k", "bankruptcies", "active", "inflation"]
PHASEMAP_REQUIRED = ["axis1", "axis2", "label", "mean_u", "amplitude", "n_ok"]


class SchemaError(ValueError):
    """A CSV does not match the documented schema."""


def _read_table(path: Path) -> tuple[list[str], list[list[str]]]:
    text = path.read_text(encoding="utf-8")
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise SchemaError(f"{path}: empty CSV")
    header = lines[0].split(",")
    rows = [ln.split(",") for ln in lines[1:]]
    if not rows:
        raise SchemaError(f"{path}: CSV has a header but no data rows")
    for i, row in enumerate(rows):
        if len(row) != len(header):
            raise SchemaError(f"{path}: row {i + 2} has {len(row)} fields, header has {len(header)}")
    return header, rows


def load_series(path: str | Path) -> dict[str, np.ndarray]:
    """Load an engine series CSV, checking the documented columns exist."""
    path = Path(path)
    header, rows = _read_table(path)
    missing = [c for c in SERIES_REQUIRED if c not in header]
    if missing:
        raise SchemaError(
            f"{path}: missing required column(s) {', '.join(missing)}; "
            f"expected an engine series CSV (got columns {', '.join(header)})"
        )
    out: dict[str, np.ndarray] = {}
    for idx, name in enumerate(header):
        out[name] = np.array([float(r[idx]) for r in rows])
    return out


def load_phasemap(path: str | Path) -> dict[str, np.ndarray]:
    """Load a sweep phasemap CSV (axis2 may be empty for 1D sweeps)."""
    path = Path(path)
    header, rows = _read_table(path)
    missing = [c for c in PHASEMAP_REQUIRED if c not in header]
    if missing:
        raise SchemaError(
            f"{path}: missing required column(s) {', '.join(missing)}; "
            "expected a sweep phasemap CSV"
        )
    idx = {name: header.index(name) for name in PHASEMAP_REQUIRED}
    axis1 = np.array([float(r[idx["axis1"]]) for r in rows])
    axis2 = np.array(
        [float(r[idx["axis2"]]) if r[idx["axis2"]] else np.nan for r in rows]
    )
    labels = np.array([r[idx["label"]] for r in rows])
    mean_u = np.array([float(r[idx["mean_u"]]) for r in rows])
    amplitude = np.array([float(r[idx["amplitude"]]) for r in rows])
    return {
        "axis1": axis1,
        "axis2": axis2,
        "label": labels,
        "mean_u": mean_u,
        "amplitude": amplitude,
    }
