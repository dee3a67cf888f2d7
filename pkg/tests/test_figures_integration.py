"""Secondary-component integration: render every figure id from real
simulator outputs (CSV files produced by the CLI), and check clean failure
on a schema-violating CSV."""

import shutil
import subprocess
import sys
from pathlib import Path

import pytest

from tipping_abm.config import default_config
from tipping_abm.runner import run_mark0, run_mark1
from tipping_abm.sweep import SweepAxis, SweepSpec, run_sweep

MAKE_FIG = Path(__file__).resolve().parents[1] / "figures" / "make_fig.py"


def render(figure_id: int, in_dir: Path, out_path: Path):
    return subprocess.run(
        [sys.executable, str(MAKE_FIG), "--figure", str(figure_id),
         "--in", str(in_dir), "--out", str(out_path)],
        capture_output=True, text=True,
    )


@pytest.fixture(scope="module")
def real_outputs(tmp_path_factory):
    """Small real runs covering every figure's input needs."""
    root = tmp_path_factory.mktemp("figinputs")
    # trajectories: one agent-based run, one hybrid crisis run
    m1 = run_mark1(default_config("mark1", n_firms=50, mu=8.0, horizon=600,
                                  rho0=0.019, seed=5))
    m1.write(root / "m1")
    shutil.copy(root / "m1" / "series.csv", root / "traj_rate_1.9pct.csv")
    m0 = run_mark0(default_config(
        "mark0", n_firms=300, horizon=3000, beta=2.0, gamma_p=0.1, theta=5.0,
        phi=0.1, f=1.0, eta_plus=0.5, eta_minus=0.3, c=0.5, delta=0.02, seed=6,
    ))
    m0.write(root / "m0")
    shutil.copy(root / "m0" / "series.csv", root / "traj_crisis.csv")
    # a small two-axis phase map
    spec = SweepSpec(
        base=default_config(
            "mark0", n_firms=100, horizon=1600, burn_in=400, beta=0.0,
            gamma_p=0.05, eta_minus=0.1, c=0.5, delta=0.02, phi=0.1,
        ),
        engine="mark0",
        axes=(SweepAxis("R", (0.5, 3.0)), SweepAxis("theta", (0.3, 20.0))),
        seeds_per_cell=1,
        master_seed=11,
    )
    run_sweep(spec, workers=1, out_dir=root)
    return root


@pytest.mark.slow
@pytest.mark.parametrize("figure_id", [2, 3, 4, 5, 6, 7, 8])
def test_renders_on_real_outputs(figure_id, real_outputs, tmp_path):
    out = tmp_path / f"fig{figure_id}.png"
    proc = render(figure_id, real_outputs, out)
    assert proc.returncode == 0, proc.stderr
    assert out.exists() and out.stat().st_size > 0


@pytest.mark.slow
def test_fails_cleanly_on_schema_violation(real_outputs, tmp_path):
    broken = tmp_path / "broken"
    broken.mkdir()
    (broken / "traj_bad.csv").write_text("t,u\n0,0.5\n")
    proc = render(2, broken, tmp_path / "x.png")
    assert proc.returncode == 2
    assert "missing required column" in proc.stderr
