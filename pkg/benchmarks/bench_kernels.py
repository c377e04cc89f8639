#!/usr/bin/env python3
"""Benchmark the compiled kernel extension against the pure-Python fallback.

Times the two hot kernels (steering evaluation and kinematic step) on
identical pre-generated argument batches, checks that both backends return
bit-identical results, and optionally times a full trial end to end under
each backend (spawned in subprocesses, since the backend is chosen at
import time via SOAR_SIM_KERNEL).

Usage:
    python benchmarks/bench_kernels.py [--calls N] [--trial]
"""

from __future__ import annotations

import argparse
import math
import os
import subprocess
import sys
import time

import numpy as np

from soar_sim._kernel import pure

try:
    from soar_sim._kernel import fast
except ImportError:
    fast = None


def build_steer_batch(n: int) -> list[tuple]:
    rng = np.random.default_rng(42)
    batch = []
    for _ in range(n):
        px, py = rng.normal(size=2)
        gx, gy = rng.normal(size=2) * 5.0
        d0 = float(rng.uniform(0.1, 4.0))
        dist = float(rng.uniform(0.0, d0))
        ang = float(rng.uniform(0.0, 2.0 * math.pi))
        batch.append((
            float(px), float(py), float(gx) + 0.5, float(gy),
            float(px) + (dist + 0.2) * math.cos(ang),
            float(py) + (dist + 0.2) * math.sin(ang),
            dist, d0, 3.0, True,
        ))
    return batch


def build_step_batch(n: int) -> list[tuple]:
    rng = np.random.default_rng(43)
    batch = []
    for _ in range(n):
        ang = float(rng.uniform(0.0, 2.0 * math.pi))
        batch.append((
            float(rng.normal()), float(rng.normal()),
            float(rng.uniform(-math.pi, math.pi)),
            math.cos(ang), math.sin(ang),
            float(rng.normal() * 10.0), float(rng.normal() * 10.0),
            1.0, 4.0, 1.0, 0.01, -0.02, 0.05,
        ))
    return batch


def time_batch(fn, batch) -> float:
    started = time.perf_counter()
    for args in batch:
        fn(*args)
    return time.perf_counter() - started


def bench_kernels(calls: int) -> None:
    steer_batch = build_steer_batch(calls)
    step_batch = build_step_batch(calls)

    rows = []
    for name, fn_batch in (("steer_core", steer_batch), ("step_core", step_batch)):
        pure_fn = getattr(pure, name)
        pure_s = time_batch(pure_fn, fn_batch)
        if fast is not None:
            fast_fn = getattr(fast, name)
            fast_s = time_batch(fast_fn, fn_batch)
            mismatches = sum(pure_fn(*a) != fast_fn(*a) for a in fn_batch[:2000])
            rows.append((name, pure_s, fast_s, pure_s / fast_s, mismatches))
        else:
            rows.append((name, pure_s, None, None, None))

    print(f"{calls} calls per kernel")
    print(f"{'kernel':<12} {'pure (s)':>10} {'compiled (s)':>13} {'speedup':>8} {'mismatches':>11}")
    for name, pure_s, fast_s, speedup, mism in rows:
        if fast_s is None:
            print(f"{name:<12} {pure_s:>10.4f} {'not built':>13}")
        else:
            print(f"{name:<12} {pure_s:>10.4f} {fast_s:>13.4f} {speedup:>7.1f}x {mism:>11d}")
    if fast is None:
        print("compiled extension not built; reinstall without SOAR_SIM_NO_EXT to compare")


def bench_trial() -> None:
    """Time one parking-lot compare under each backend via subprocesses."""
    here = os.path.dirname(os.path.abspath(__file__))
    scenario = os.path.join(here, "..", "scenarios", "parking_lot.yaml")
    code = (
        "import time, soar_sim\n"
        "from soar_sim.scenario_io import load_scenario_file\n"
        "from soar_sim.sim import run_trial\n"
        f"spec = load_scenario_file({scenario!r})\n"
        "t0 = time.perf_counter()\n"
        "for seed in range(42, 47):\n"
        "    run_trial(spec, 'soar', seed)\n"
        "    run_trial(spec, 'non_soar', seed)\n"
        "print(f'{soar_sim.KERNEL_BACKEND}: {time.perf_counter() - t0:.2f}s for 10 trials')\n"
    )
    for backend in ("compiled", "pure"):
        env = dict(os.environ, SOAR_SIM_KERNEL=backend)
        proc = subprocess.run([sys.executable, "-c", code], env=env,
                              capture_output=True, text=True)
        out = proc.stdout.strip() or proc.stderr.strip()
        print(out)


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--calls", type=int, default=200_000, help="kernel calls per benchmark")
    parser.add_argument("--trial", action="store_true", help="also time full trials per backend")
    args = parser.parse_args()
    bench_kernels(args.calls)
    if args.trial:
        print()
        bench_trial()


if __name__ == "__main__":
    main()
