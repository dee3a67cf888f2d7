"""Figure recipes: which CSVs each figure needs and how it is drawn.

Each of the seven figures (ids 2-8) is re-rendered from the simulator's CSV
outputs found in an input directory; rendering is read-only and
deterministic (no timestamps embedded). File conventions per figure are in
each recipe's docstring; trajectory inputs are any `traj_*.csv` engine
series files, sorted by name.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from csvio import SchemaError, load_phasemap, load_series

PHASE_COLORS = {
    "FU": "#b2182b",
    "RU": "#fdae61",
    "EC": "#7b3294",
    "FE": "#2166ac",
    "failed": "#999999",
}


@dataclass
class FigureRecipe:
    figure_id: int
    kind: str  # trajectory | phase map | boundary curve | spectrum
    description: str
    draw: Callable[[Path, Path], None] = field(repr=False)

    def render(self, in_dir: str | Path, out_path: str | Path) -> Path:
        in_dir = Path(in_dir)
        out_path = Path(out_path)
        if not in_dir.is_dir():
            raise SchemaError(f"input directory {in_dir} does not exist")
        self.draw(in_dir, out_path)
        return out_path


def _trajectories(in_dir: Path) -> list[tuple[str, dict]]:
    paths = sorted(in_dir.glob("traj_*.csv"))
    if not paths:
        raise SchemaError(
            f"{in_dir}: no traj_*.csv trajectory files (engine series schema)"
        )
    return [(p.stem.removeprefix("traj_"), load_series(p)) for p in paths]


def _save(fig, out_path: Path) -> None:
    fig.savefig(out_path, dpi=150, metadata={"Software": None})
    plt.close(fig)


def _draw_trajectories(in_dir: Path, out_path: Path) -> None:
    """Overlaid unemployment trajectories (one line per traj_*.csv)."""
    fig, ax = plt.subplots(figsize=(7, 4))
    for name, cols in _trajectories(in_dir):
        ax.plot(cols["t"], cols["u"], lw=0.8, label=name)
    ax.set_xlabel("t")
    ax.set_ylabel("unemployment rate u")
    ax.set_ylim(-0.02, 1.02)
    ax.legend(loc="best", fontsize=8)
    _save(fig, out_path)


def _draw_phase_map(in_dir: Path, out_path: Path, log_axes=(False, True),
                    xlabel="R", ylabel="theta") -> None:
    """Colored majority-label map from phasemap.csv."""
    pm = load_phasemap(in_dir / "phasemap.csv")
    fig, ax = plt.subplots(figsize=(6, 5))
    for label in PHASE_COLORS:
        sel = pm["label"] == label
        if sel.any():
            ax.scatter(
                pm["axis1"][sel], pm["axis2"][sel], c=PHASE_COLORS[label],
                label=label, s=110, marker="s", edgecolors="none",
            )
    if log_axes[0]:
        ax.set_xscale("log")
    if log_axes[1] and np.isfinite(pm["axis2"]).any() and np.nanmin(pm["axis2"]) > 0:
        ax.set_yscale("log")
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.legend(loc="upper left", fontsize=8, framealpha=0.9)
    _save(fig, out_path)


def _draw_fig2(in_dir: Path, out_path: Path) -> None:
    """Interest-rate tipping point: u(t) at two rates, mean-u curve if present."""
    trajs = _trajectories(in_dir)
    transition = in_dir / "transition.csv"
    ncols = 2 if transition.exists() else 1
    fig, axes = plt.subplots(1, ncols, figsize=(6 * ncols, 4), squeeze=False)
    ax = axes[0][-1]
    for name, cols in trajs:
        ax.plot(cols["t"], cols["u"], lw=0.8, label=name)
    ax.set_xlabel("t")
    ax.set_ylabel("u")
    ax.set_ylim(-0.02, 1.02)
    ax.legend(fontsize=8)
    if transition.exists():
        left = axes[0][0]
        header, *rows = [
            ln.split(",") for ln in transition.read_text().splitlines() if ln.strip()
        ]
        if "rho0" not in header or "mean_u" not in header:
            raise SchemaError(f"{transition}: expected columns rho0,mean_u")
        rho = [float(r[header.index("rho0")]) for r in rows]
        mu = [float(r[header.index("mean_u")]) for r in rows]
        left.plot(rho, mu, "o-")
        left.set_xlabel("rho0")
        left.set_ylabel("long-run mean u")
    _save(fig, out_path)


def _draw_fig5(in_dir: Path, out_path: Path) -> None:
    """Phase-boundary locations vs the second axis, read off the phase map."""
    pm = load_phasemap(in_dir / "phasemap.csv")
    axis2_values = sorted({v for v in pm["axis2"] if not math.isnan(v)})
    if not axis2_values:
        raise SchemaError("boundary curves need a two-axis phasemap.csv")
    fig, ax = plt.subplots(figsize=(6, 4.5))
    for pair, marker in ((("RU", "EC"), "o"), (("EC", "FE"), "s")):
        xs, ys = [], []
        for v in axis2_values:
            sel = pm["axis2"] == v
            order = np.argsort(pm["axis1"][sel])
            labels = pm["label"][sel][order]
            theta = pm["axis1"][sel][order]
            for i in range(len(labels) - 1):
                if {labels[i], labels[i + 1]} == set(pair):
                    xs.append(v)
                    ys.append(theta[i + 1])
                    break
        ax.plot(xs, ys, marker + "-", label=f"{pair[0]}/{pair[1]} boundary")
    ax.set_xlabel("second axis (f or beta)")
    ax.set_ylabel("boundary location (theta)")
    ax.legend(fontsize=8)
    _save(fig, out_path)


def _draw_fig6(in_dir: Path, out_path: Path) -> None:
    """Business-cycle oscillations: u(t) zoom, price/savings phase, spectrum."""
    name, cols = _trajectories(in_dir)[0]
    u, pbar, savings = cols["u"], cols["pbar"], cols["S"]
    n = len(u)
    burn = n // 2
    fig, axes = plt.subplots(1, 3, figsize=(14, 3.6))
    window = slice(n - 300, n)
    axes[0].plot(cols["t"][window], u[window], lw=0.9)
    axes[0].set_xlabel("t")
    axes[0].set_ylabel("u")
    axes[1].plot(
        cols["t"][window],
        (pbar[window] - np.mean(pbar[burn:])) / np.std(pbar[burn:]),
        label="price (scaled)",
        lw=0.9,
    )
    axes[1].plot(
        cols["t"][window],
        (savings[window] - np.mean(savings[burn:])) / np.std(savings[burn:]),
        label="savings (scaled)",
        lw=0.9,
    )
    axes[1].set_xlabel("t")
    axes[1].legend(fontsize=8)
    tail = u[burn:] - np.mean(u[burn:])
    power = np.abs(np.fft.rfft(tail)) ** 2
    freqs = np.fft.rfftfreq(len(tail))
    axes[2].semilogy(freqs[1:], power[1:], lw=0.7)
    axes[2].set_xlabel("frequency (cycles/step)")
    axes[2].set_ylabel("power")
    _save(fig, out_path)


def _draw_fig7(in_dir: Path, out_path: Path) -> None:
    """Wage-extension phase map plus an inflation/deflation inset."""
    pm_path = in_dir / "phasemap.csv"
    fig, (ax, ax2) = plt.subplots(1, 2, figsize=(11, 4.5))
    if pm_path.exists():
        pm = load_phasemap(pm_path)
        for label in PHASE_COLORS:
            sel = pm["label"] == label
            if sel.any():
                ax.scatter(pm["axis1"][sel], pm["axis2"][sel],
                           c=PHASE_COLORS[label], label=label, s=110, marker="s")
        if np.isfinite(pm["axis2"]).any() and np.nanmin(pm["axis2"]) > 0:
            ax.set_yscale("log")
        ax.set_xlabel("R")
        ax.set_ylabel("theta")
        ax.legend(fontsize=8)
    else:
        ax.set_axis_off()
        ax.text(0.5, 0.5, "no phasemap.csv", ha="center")
    for name, cols in _trajectories(in_dir):
        ax2.plot(cols["t"], cols["pbar"], lw=0.8, label=name)
    ax2.set_xlabel("t")
    ax2.set_ylabel("average price")
    ax2.set_yscale("log")
    ax2.legend(fontsize=8)
    _save(fig, out_path)


FIGURES: dict[int, FigureRecipe] = {
    2: FigureRecipe(2, "trajectory",
                    "tipping point: u trajectories (+ optional transition curve)",
                    _draw_fig2),
    3: FigureRecipe(3, "phase map",
                    "hiring/firing phase diagram from phasemap.csv",
                    lambda d, o: _draw_phase_map(d, o, log_axes=(False, False),
                                                 xlabel="eta_plus",
                                                 ylabel="eta_minus")),
    4: FigureRecipe(4, "phase map",
                    "R-theta phase diagram from phasemap.csv",
                    lambda d, o: _draw_phase_map(d, o)),
    5: FigureRecipe(5, "boundary curve",
                    "phase-boundary locations from a two-axis phasemap.csv",
                    _draw_fig5),
    6: FigureRecipe(6, "spectrum",
                    "business-cycle oscillations from one traj_*.csv",
                    _draw_fig6),
    7: FigureRecipe(7, "phase map",
                    "wage-extension phase map + price trajectories",
                    _draw_fig7),
    8: FigureRecipe(8, "trajectory",
                    "policy experiment: overlaid u trajectories",
                    _draw_trajectories),
}
