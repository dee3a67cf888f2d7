#!/usr/bin/env python3
"""Benchmark the compiled kernels against the pure-Python fallback.

Usage: python scripts/benchmark.py [--quick]

Runs the same configurations through both backends (identical draw
sequences) and reports steps/second plus the speedup factor.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from tipping_abm.backend import (
    HAVE_SPEEDUPS,
    run_mark0_backend,
    run_mark1_backend,
)
from tipping_abm.config import default_config
from tipping_abm.rng import RngStream


def time_run(fn, config, backend):
    rng = RngStream(config.seed)
    t0 = time.perf_counter()
    cols, termination, money = fn(config, rng, backend)
    dt = time.perf_counter() - t0
    return dt, len(cols["t"]), money


def bench(name, fn, config):
    t_py, steps, money_py = time_run(fn, config, "python")
    t_c, _, money_c = time_run(fn, config, "compiled")
    agree = np.isclose(money_py, money_c, rtol=1e-9)
    print(
        f"{name:<34} python {steps / t_py:10.0f} steps/s   "
        f"compiled {steps / t_c:10.0f} steps/s   "
        f"speedup {t_py / t_c:7.1f}x   audits agree: {agree}"
    )


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--quick", action="store_true", help="smaller workloads")
    args = parser.parse_args()
    if not HAVE_SPEEDUPS:
        print("compiled extension not available; nothing to compare")
        return 1

    scale = 4 if args.quick else 1
    mark0_small = default_config(
        "mark0", n_firms=200, horizon=2000 // scale, theta=3.0, phi=0.1,
        eta_plus=0.3, eta_minus=0.15, beta=2.0, gamma_p=0.1, seed=42,
    )
    mark0_large = default_config(
        "mark0", n_firms=2000, horizon=2000 // scale, theta=5.0, phi=0.1,
        eta_plus=0.5, eta_minus=0.3, beta=2.0, gamma_p=0.1, seed=42,
    )
    mark1_small = default_config(
        "mark1", n_firms=100, mu=10.0, horizon=400 // scale, rho0=0.02, seed=42
    )
    mark1_large = default_config(
        "mark1", n_firms=500, mu=10.0, horizon=400 // scale, rho0=0.02, seed=42
    )
    print(f"backends: pure Python vs compiled kernel (quick={args.quick})")
    bench("mark0  200 firms", run_mark0_backend, mark0_small)
    bench("mark0 2000 firms", run_mark0_backend, mark0_large)
    bench("mark1  100 firms x 1000 households", run_mark1_backend, mark1_small)
    bench("mark1  500 firms x 5000 households", run_mark1_backend, mark1_large)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
