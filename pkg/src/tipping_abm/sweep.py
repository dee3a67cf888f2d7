"""Parallel phase-diagram scans over parameter grids.

A sweep is a pure function of (spec, master seed): every cell x seed gets
its own derived seed, cells run as independent tasks in a bounded process
pool, and aggregation is order-insensitive, so the resulting phase map is
identical for any worker count.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields
from pathlib import Path
import numpy as np

from .analytics import MIN_WINDOW, PhaseStats, classify_phase
from .config import ConfigError, SimConfig, with_params
from .results import write_manifest
from .rng import derive_run_seed
from .runner import run_engine

# virtual axes on top of the plain SimConfig fields
_LABEL_ORDER = ["FU", "RU", "EC", "FE", "failed"]


def apply_axis(config: SimConfig, name: str, value: float) -> SimConfig:
    """Set one swept parameter; `R` and `z` are derived-parameter axes.

    R sweeps eta_plus at fixed eta_minus (only the ratio matters);
    R_eta_minus sweeps eta_minus at fixed eta_plus for cross-checking that
    claim; z sets gamma_w = z * gamma_p.
    """
    if name == "R":
        return with_params(config, eta_plus=value * config.eta_minus)
    if name == "R_eta_minus":
        if value <= 0.0:
            raise ConfigError("R_eta_minus axis needs positive R values")
        return with_params(config, eta_minus=config.eta_plus / value)
    if name == "z":
        return with_params(config, gamma_w=value * config.gamma_p)
    if name in {f.name for f in fields(SimConfig)}:
        return with_params(config, **{name: value})
    raise ConfigError(f"unknown sweep axis {name!r}")


@dataclass(frozen=True)
class SweepAxis:
    name: str
    values: tuple[float, ...]

    def __post_init__(self) -> None:
        if len(self.values) == 0:
            raise ConfigError(f"axis {self.name!r} has no values")


@dataclass(frozen=True)
class SweepSpec:
    base: SimConfig
    engine: str
    axes: tuple[SweepAxis, ...]
    seeds_per_cell: int = 5
    master_seed: int = 0

    def __post_init__(self) -> None:
        if self.engine not in ("mark0", "mark1"):
            raise ConfigError(f"unknown engine {self.engine!r}")
        if not 1 <= len(self.axes) <= 2:
            raise ConfigError("sweeps support one or two axes")
        if self.seeds_per_cell < 1:
            raise ConfigError("seeds_per_cell must be positive")
        for axis in self.axes:
            apply_axis(self.base, axis.name, axis.values[0])  # validates name
        if any(a.name == "R" for a in self.axes) and self.base.eta_minus <= 0.0:
            raise ConfigError("R axis requires eta_minus > 0 in the base config")


@dataclass
class CellResult:
    labels: list[str]
    majority: str
    mean_u: float
    mean_amplitude: float
    n_ok: int
    seeds: list[int] = field(default_factory=list)


@dataclass
class PhaseMap:
    spec: SweepSpec
    cells: dict[tuple[int, int], CellResult]

    def cell(self, i: int, j: int = 0) -> CellResult:
        return self.cells[(i, j)]

    def majority_grid(self) -> list[list[str]]:
        n1 = len(self.spec.axes[0].values)
        n2 = len(self.spec.axes[1].values) if len(self.spec.axes) > 1 else 1
        return [[self.cells[(i, j)].majority for j in range(n2)] for i in range(n1)]

    def to_csv(self, path: str | Path) -> None:
        axis1 = self.spec.axes[0]
        axis2 = self.spec.axes[1] if len(self.spec.axes) > 1 else None
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("axis1,axis2,label,mean_u,amplitude,n_ok\n")
            for (i, j), cell in sorted(self.cells.items()):
                a2 = repr(axis2.values[j]) if axis2 else ""
                fields_ = [
                    repr(axis1.values[i]),
                    a2,
                    cell.majority,
                    repr(cell.mean_u),
                    repr(cell.mean_amplitude),
                    str(cell.n_ok),
                ]
                fh.write(",".join(fields_) + "\n")


def _classify_run(u: np.ndarray, burn_in: int) -> tuple[str, float, float, bool]:
    """Label one run; truncated (collapsed) runs ending high are FU, other
    truncations are failures excluded from the majority."""
    if len(u) > burn_in + MIN_WINDOW:
        stats: PhaseStats = classify_phase(u, burn_in)
        return stats.label, stats.u_mean, stats.amplitude, True
    if len(u) and u[-1] >= 0.8:
        tail = u[burn_in:] if len(u) > burn_in else u
        return "FU", float(np.mean(tail)), float(np.ptp(tail)), True
    return "failed", 1.0, 0.0, False


def _run_cell_seed(args: tuple) -> tuple[int, int, int, int, str, float, float, bool]:
    spec, i, j, k = args
    coords = (i, j, k)
    seed = derive_run_seed(spec.master_seed, coords)
    config = apply_axis(spec.base, spec.axes[0].name, spec.axes[0].values[i])
    if len(spec.axes) > 1:
        config = apply_axis(config, spec.axes[1].name, spec.axes[1].values[j])
    config = with_params(config, seed=seed)
    try:
        result = run_engine(spec.engine, config)
        label, u_mean, amp, ok = _classify_run(
            result.columns["u"], spec.base.burn_in
        )
    except Exception:  # individual failures never abort the sweep
        label, u_mean, amp, ok = "failed", 1.0, 0.0, False
    return i, j, k, seed, label, u_mean, amp, ok


def default_workers() -> int:
    env = os.environ.get("TIPPING_ABM_WORKERS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def run_sweep(
    spec: SweepSpec,
    workers: int | None = None,
    out_dir: str | Path | None = None,
) -> PhaseMap:
    """Run every cell x seed, classify, and aggregate by majority label.

    Deterministic given spec.master_seed regardless of worker count or
    completion order. With out_dir set, writes phasemap.csv plus one
    manifest per cell.
    """
    if workers is None:
        workers = default_workers()
    n1 = len(spec.axes[0].values)
    n2 = len(spec.axes[1].values) if len(spec.axes) > 1 else 1
    tasks = [
        (spec, i, j, k)
        for i in range(n1)
        for j in range(n2)
        for k in range(spec.seeds_per_cell)
    ]
    if workers <= 1 or len(tasks) == 1:
        raw = [_run_cell_seed(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            raw = list(pool.map(_run_cell_seed, tasks, chunksize=1))

    by_cell: dict[tuple[int, int], list] = {}
    for i, j, k, seed, label, u_mean, amp, ok in raw:
        by_cell.setdefault((i, j), []).append((k, seed, label, u_mean, amp, ok))
    cells: dict[tuple[int, int], CellResult] = {}
    for key, entries in by_cell.items():
        entries.sort()  # seed index order, independent of completion order
        labels = [e[2] for e in entries]
        oks = [e for e in entries if e[5]]
        counted = [e[2] for e in oks]
        if counted:
            majority = max(
                sorted(set(counted), key=_LABEL_ORDER.index),
                key=counted.count,
            )
        else:
            majority = "failed"
        cells[key] = CellResult(
            labels=labels,
            majority=majority,
            mean_u=float(np.mean([e[3] for e in oks])) if oks else 1.0,
            mean_amplitude=float(np.mean([e[4] for e in oks])) if oks else 0.0,
            n_ok=len(oks),
            seeds=[e[1] for e in entries],
        )
    phase_map = PhaseMap(spec=spec, cells=cells)
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        phase_map.to_csv(out / "phasemap.csv")
        cell_dir = out / "cells"
        cell_dir.mkdir(exist_ok=True)
        from .analytics import CRISIS_AMPLITUDE, FE_CUTOFF, FU_CUTOFF

        for (i, j), cell in sorted(cells.items()):
            write_manifest(
                {
                    "cell": [i, j],
                    "axis_values": [
                        spec.axes[0].values[i],
                        spec.axes[1].values[j] if len(spec.axes) > 1 else None,
                    ],
                    "engine": spec.engine,
                    "base_config": spec.base.to_dict(),
                    "master_seed": spec.master_seed,
                    "seeds": cell.seeds,
                    "labels": cell.labels,
                    "majority": cell.majority,
                    "classifier_thresholds": {
                        "fu_cutoff": FU_CUTOFF,
                        "fe_cutoff": FE_CUTOFF,
                        "crisis_amplitude": CRISIS_AMPLITUDE,
                        "burn_in": spec.base.burn_in,
                    },
                },
                cell_dir / f"cell_{i}_{j}.json",
            )
    return phase_map


def boundary_trace(
    phase_map: PhaseMap, label_pair: tuple[str, str]
) -> list[tuple[float, float | None]]:
    """First-axis location where the majority flips between the pair, per
    second-axis row; None where the pair never meets in that row."""
    spec = phase_map.spec
    axis1 = spec.axes[0].values
    n2 = len(spec.axes[1].values) if len(spec.axes) > 1 else 1
    a, b = label_pair
    out: list[tuple[float, float | None]] = []
    for j in range(n2):
        row_value = spec.axes[1].values[j] if len(spec.axes) > 1 else 0.0
        location: float | None = None
        for i in range(len(axis1) - 1):
            lo = phase_map.cells[(i, j)].majority
            hi = phase_map.cells[(i + 1, j)].majority
            if (lo, hi) == (a, b) or (lo, hi) == (b, a):
                location = axis1[i + 1]
                break
        out.append((row_value, location))
    return out


# ---------------------------------------------------------------------------
# Sweep spec files
# ---------------------------------------------------------------------------


def parse_axis_spec(raw: str) -> SweepAxis:
    """Parse 'name : v1 v2 ...', 'name : lin lo hi n' or 'name : log lo hi n'."""
    if ":" not in raw:
        raise ConfigError(f"axis spec {raw!r} missing ':'")
    name, _, rest = raw.partition(":")
    name = name.strip()
    parts = rest.split()
    if not parts:
        raise ConfigError(f"axis spec {raw!r} has no values")
    if parts[0] in ("lin", "log"):
        if len(parts) != 4:
            raise ConfigError(f"axis spec {raw!r}: expected '{parts[0]} lo hi n'")
        lo, hi, n = float(parts[1]), float(parts[2]), int(parts[3])
        if parts[0] == "lin":
            values = np.linspace(lo, hi, n)
        else:
            if lo <= 0 or hi <= 0:
                raise ConfigError("log axis needs positive bounds")
            values = np.geomspace(lo, hi, n)
        return SweepAxis(name=name, values=tuple(float(v) for v in values))
    return SweepAxis(name=name, values=tuple(float(v) for v in parts))


def load_sweep_spec(path: str | Path) -> SweepSpec:
    """Sweep file: the config grammar plus engine, seeds_per_cell,
    master_seed, axis1 and optional axis2 keys."""
    from .config import build_config, parse_config_text

    with open(path, encoding="utf-8") as fh:
        raw = parse_config_text(fh.read(), source=str(path))
    engine = raw.pop("engine", "mark0")
    seeds_per_cell = int(raw.pop("seeds_per_cell", "5"))
    master_seed = int(raw.pop("master_seed", "0"))
    axes = []
    for key in ("axis1", "axis2"):
        if key in raw:
            axes.append(parse_axis_spec(raw.pop(key)))
    if not axes:
        raise ConfigError(f"{path}: sweep spec needs at least axis1")
    base = build_config(raw, engine)
    return SweepSpec(
        base=base,
        engine=engine,
        axes=tuple(axes),
        seeds_per_cell=seeds_per_cell,
        master_seed=master_seed,
    )
