#!/usr/bin/env python3
"""Time the numba kernels against the pure-numpy fallback.

Each backend runs in its own interpreter because the choice is made once, at
import time, from FLEXLOSS_DISABLE_NUMBA. A warm-up call per workload keeps JIT
compilation (or cache loading) out of the numbers.
"""

import argparse
import json
import os
import subprocess
import sys

WORKER = r"""
import json, sys, time
import numpy as np
import flexloss
from flexloss import SimConfig, SystemParams, simulate, thresholds
from flexloss.ctmc import fast_throughput

n_solve, n_thresh, horizon = (int(a) for a in sys.argv[1:4])
rng = np.random.default_rng(0)
pts = np.column_stack([rng.uniform(0.1, 10, n_solve), rng.uniform(0, 1, n_solve), rng.uniform(0.01, 1, n_solve)])


def solve_all():
    return sum(fast_throughput("full", *p) + fast_throughput("partial", *p) for p in pts)


def thresh_all():
    return [thresholds(1.0 + i % 7, 0.05 + 0.9 * i / n_thresh).gamma_r for i in range(n_thresh)]


def sim():
    return simulate(SimConfig(SystemParams(1.0, 0.5, 0.45), "full", horizon, seed=1)).mean


out = {"backend": flexloss.BACKEND}
for name, fn in (("chain solves", solve_all), ("threshold sets", thresh_all), ("simulation", sim)):
    fn()
    t0 = time.perf_counter()
    fn()
    out[name] = time.perf_counter() - t0
print(json.dumps(out))
"""


def run(disable: bool, args) -> dict:
    env = dict(os.environ, FLEXLOSS_DISABLE_NUMBA="1" if disable else "0")
    cmd = [sys.executable, "-c", WORKER, str(args.solves), str(args.thresholds), str(args.horizon)]
    res = subprocess.run(cmd, env=env, capture_output=True, text=True, check=True)
    return json.loads(res.stdout)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--solves", type=int, default=2000, help="random (rho, k, gamma) points, two chains each")
    ap.add_argument("--thresholds", type=int, default=50, help="number of (rho, k) threshold sets")
    ap.add_argument("--horizon", type=int, default=100_000, help="arrivals per simulation run")
    args = ap.parse_args()

    fast = run(False, args)
    slow = run(True, args)
    print(f"{'workload':<16}{fast['backend']:>12}{slow['backend']:>12}{'speedup':>10}")
    for name in ("chain solves", "threshold sets", "simulation"):
        print(f"{name:<16}{fast[name]:>11.4f}s{slow[name]:>11.4f}s{slow[name] / fast[name]:>9.1f}x")


if __name__ == "__main__":
    main()
