"""Compiled kernel vs pure-Python fallback: same draws, same trajectories."""

import math

import numpy as np
import pytest

from tipping_abm.backend import (
    HAVE_SPEEDUPS,
    default_backend,
    resolve_backend,
    run_mark0_backend,
    run_mark1_backend,
)
from tipping_abm.config import default_config
from tipping_abm.rng import RngStream

needs_speedups = pytest.mark.skipif(
    not HAVE_SPEEDUPS, reason="compiled extension not built"
)


def both_backends(run_fn, config):
    rng_py, rng_c = RngStream(config.seed), RngStream(config.seed)
    cols_py, term_py, money_py = run_fn(config, rng_py, "python")
    cols_c, term_c, money_c = run_fn(config, rng_c, "compiled")
    return (cols_py, term_py, money_py, rng_py), (cols_c, term_c, money_c, rng_c)


@needs_speedups
@pytest.mark.parametrize(
    "overrides",
    [
        dict(theta=math.inf, beta=2.0, gamma_p=0.1),
        dict(theta=2.0, phi=0.2, f=0.5, beta=1.0),
        dict(theta=3.0, gamma_w=0.05, f=0.9),
        dict(theta=2.0, delta_plus=0.25),
    ],
)
def test_mark0_backends_agree(overrides):
    config = default_config(
        "mark0", n_firms=150, horizon=200, eta_plus=0.3, eta_minus=0.15,
        seed=42, **overrides,
    )
    py, cy = both_backends(run_mark0_backend, config)
    assert py[3].draw_count == cy[3].draw_count
    assert py[1] == cy[1]
    for name in py[0]:
        assert np.allclose(py[0][name], cy[0][name], rtol=1e-9, atol=1e-12), name
    assert py[2] == pytest.approx(cy[2], rel=1e-12)


@needs_speedups
@pytest.mark.parametrize("rho0", [0.0, 0.02, 0.05])
def test_mark1_backends_agree(rho0):
    config = default_config(
        "mark1", n_firms=40, mu=8.0, horizon=150, rho0=rho0, seed=13
    )
    py, cy = both_backends(run_mark1_backend, config)
    assert py[3].draw_count == cy[3].draw_count
    assert py[1] == cy[1]
    for name in py[0]:
        assert np.allclose(py[0][name], cy[0][name], rtol=1e-9, atol=1e-12), name


@needs_speedups
def test_mark0_policy_parity():
    from tipping_abm.config import PolicyRule

    config = default_config(
        "mark0", n_firms=120, horizon=250, theta=2.0, phi=0.1,
        eta_plus=0.2, eta_minus=0.1, policy=PolicyRule(0.1, 10.0), seed=77,
    )
    py, cy = both_backends(run_mark0_backend, config)
    assert py[3].draw_count == cy[3].draw_count
    assert np.allclose(py[0]["u"], cy[0]["u"], rtol=1e-9)


@needs_speedups
def test_compiled_is_default_when_available(monkeypatch):
    monkeypatch.delenv("TIPPING_ABM_FORCE_PYTHON", raising=False)
    assert default_backend() == "compiled"
    monkeypatch.setenv("TIPPING_ABM_FORCE_PYTHON", "1")
    assert default_backend() == "python"


def test_resolve_rejects_unknown():
    with pytest.raises(ValueError):
        resolve_backend("fortran")


@needs_speedups
def test_compiled_much_faster_than_python():
    # the point of the extension: a conservative 5x on a small workload
    import time

    config = default_config(
        "mark0", n_firms=400, horizon=400, theta=3.0, eta_plus=0.3,
        eta_minus=0.15, seed=1,
    )
    t0 = time.perf_counter()
    run_mark0_backend(config, RngStream(1), "python")
    t_py = time.perf_counter() - t0
    t0 = time.perf_counter()
    run_mark0_backend(config, RngStream(1), "compiled")
    t_c = time.perf_counter() - t0
    assert t_c < t_py / 5.0
