"""Engine backend selection: compiled kernels with a pure-Python fallback.

The compiled extension is used when importable unless TIPPING_ABM_FORCE_PYTHON
is set. Both backends implement identical dynamics and draw sequences; see
scripts/benchmark.py for the speed comparison.
"""

from __future__ import annotations

import math
import os

import numpy as np

from .config import SimConfig
from .rng import RngStream

try:
    from . import _speedups

    HAVE_SPEEDUPS = True
except ImportError:  # pragma: no cover - build-dependent
    _speedups = None
    HAVE_SPEEDUPS = False


def default_backend() -> str:
    if os.environ.get("TIPPING_ABM_FORCE_PYTHON"):
        return "python"
    return "compiled" if HAVE_SPEEDUPS else "python"


def resolve_backend(backend: str | None) -> str:
    chosen = backend or default_backend()
    if chosen not in ("compiled", "python"):
        raise ValueError(f"unknown backend {chosen!r}")
    if chosen == "compiled" and not HAVE_SPEEDUPS:
        raise RuntimeError("compiled backend requested but the extension is missing")
    return chosen


def _alloc_columns(schema: list[str], horizon: int) -> dict[str, np.ndarray]:
    cols: dict[str, np.ndarray] = {"t": np.arange(horizon, dtype=np.int64)}
    for name in schema:
        if name == "t":
            continue
        if name in ("bankruptcies", "active"):
            cols[name] = np.zeros(horizon, dtype=np.int64)
        else:
            cols[name] = np.empty(horizon)
    return cols


def run_mark0_backend(
    config: SimConfig, rng: RngStream, backend: str
) -> tuple[dict[str, np.ndarray], str, float]:
    """Run the hybrid engine; returns (columns, termination, total_money)."""
    if backend == "python":
        from .accounting import audit_money
        from .mark0 import run_mark0_python

        cols, state, termination = run_mark0_python(config, rng)
        return cols, termination, audit_money(state)

    from .results import MARK0_SCHEMA

    cols = _alloc_columns(MARK0_SCHEMA, config.horizon)
    steps, terminated, draws, money = _speedups.mark0_run(
        rng.bit_generator,
        config.n_firms,
        config.mu,
        config.c,
        config.beta,
        config.gamma_p,
        config.gamma_w,
        config.eta_plus,
        config.eta_minus,
        config.delta,
        config.delta_plus if config.delta_plus is not None else 0.0,
        config.delta_plus is not None,
        config.theta,
        config.phi,
        config.f,
        config.policy is not None,
        config.policy.u_trigger if config.policy else 0.0,
        config.policy.theta_high if config.policy else math.inf,
        config.horizon,
        cols["u"],
        cols["pbar"],
        cols["wbar"],
        cols["S"],
        cols["k"],
        cols["bankruptcies"],
        cols["active"],
        cols["inflation"],
    )
    rng.add_kernel_draws(draws)
    if steps < config.horizon:
        cols = {k: v[:steps] for k, v in cols.items()}
    return cols, "economy_collapse" if terminated else "completed", money


def run_mark1_backend(
    config: SimConfig, rng: RngStream, backend: str
) -> tuple[dict[str, np.ndarray], str, float]:
    """Run the agent-based engine; returns (columns, termination, total_money)."""
    if backend == "python":
        from .accounting import audit_money
        from .mark1 import run_mark1_python

        cols, state, termination = run_mark1_python(config, rng)
        return cols, termination, audit_money(state)

    from .results import MARK1_SCHEMA

    cols = _alloc_columns(MARK1_SCHEMA, config.horizon)
    steps, terminated, draws, money = _speedups.mark1_run(
        rng.bit_generator,
        config.n_firms,
        config.n_households,
        config.c,
        config.gamma_p,
        config.gamma_y,
        config.delta,
        config.rho0,
        config.tau,
        config.m_goods,
        config.rate_noise,
        config.horizon,
        cols["u"],
        cols["pbar"],
        cols["S"],
        cols["k"],
        cols["bankruptcies"],
        cols["active"],
        cols["inflation"],
        cols["R_measured"],
        cols["mean_rate"],
    )
    rng.add_kernel_draws(draws)
    cols["wbar"].fill(1.0)  # constant wage; not computed by the kernel
    if steps < config.horizon:
        cols = {k: v[:steps] for k, v in cols.items()}
    cols = {name: cols[name] for name in MARK1_SCHEMA}
    return cols, "economy_collapse" if terminated else "completed", money
