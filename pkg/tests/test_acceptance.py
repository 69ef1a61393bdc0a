"""Acceptance suite: one check per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v`` or directly as a script.
"""

from __future__ import annotations

import csv
import math
import os
import subprocess
import sys
import tempfile
import time
from pathlib import Path

import numpy as np
import pytest
from scipy.optimize import brentq

from flexloss import (
    FlexibilityDesign,
    SimConfig,
    SystemParams,
    build_generator,
    simulate,
    stationary_distribution,
    throughput,
    thresholds,
)
from flexloss.analysis import REGIMES, gamma_b, gamma_g, gamma_r
from flexloss.closed_form import (
    stationary_full_identical,
    stationary_full_symmetric,
    stationary_partial_identical,
    stationary_partial_symmetric,
)

FULL, PARTIAL, INDEP = FlexibilityDesign.FULL, FlexibilityDesign.PARTIAL, FlexibilityDesign.INDEPENDENT
DESIGNS = (INDEP, PARTIAL, FULL)
REFERENCE = Path(__file__).parent / "data" / "reference_curves_rho1.csv"
SEED = 20240611


def report(number: int, title: str, ok: bool, detail: str) -> None:
    print(f"[criterion {number}] {'PASS' if ok else 'FAIL'} {title}: {detail}", flush=True)


def _log_uniform(rng, lo, hi, size=None):
    return np.exp(rng.uniform(math.log(lo), math.log(hi), size))


# --------------------------------------------------------------------------- 1


def _max_rel(closed, solved) -> float:
    a, b = closed.probabilities, solved.probabilities
    worst = 0.0
    for x, y in zip(a, b):
        if y == 0.0:
            if x != 0.0:
                return math.inf
            continue
        worst = max(worst, abs(x - y) / abs(y))
    return worst


def criterion_1():
    rng = np.random.default_rng(SEED + 1)
    start = time.perf_counter()
    worst = 0.0
    cases = 0
    # the k = 0 end of the range is included explicitly; uniform draws never hit it
    ks = np.concatenate([[0.0, 1.0], rng.uniform(0.0, 1.0, 998)])
    for rho, k in zip(rng.uniform(0.1, 10.0, 1000), ks):
        p = SystemParams(rho, k, 1.0)
        for design, fn in ((FULL, stationary_full_identical), (PARTIAL, stationary_partial_identical)):
            worst = max(worst, _max_rel(fn(p), stationary_distribution(build_generator(design, p))))
            cases += 1
    gammas = np.concatenate([[1.0], 1.0 - rng.uniform(0.0, 1.0, 999)])  # (0, 1]
    for rho, g in zip(rng.uniform(0.1, 10.0, 1000), gammas):
        p = SystemParams(rho, 1.0, g)
        for design, fn in ((FULL, stationary_full_symmetric), (PARTIAL, stationary_partial_symmetric)):
            worst = max(worst, _max_rel(fn(p), stationary_distribution(build_generator(design, p))))
            cases += 1
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-10 and elapsed < 5.0
    return ok, f"{cases} distributions, max relative error {worst:.2e} (limit 1e-10), {elapsed:.2f} s (limit 5 s)"


# --------------------------------------------------------------------------- 2


def _reference_points():
    out = {}
    with REFERENCE.open() as fh:
        for row in csv.DictReader(fh):
            out[(row["curve"], float(row["k"]))] = float(row["gamma"])
    return out


def criterion_2():
    start = time.perf_counter()
    ref = _reference_points()
    worst = 0.0
    checked = []
    for k in (0.25687203089303, 0.5, 0.523631461725693, 1.0):
        for curve, fn in (("red", gamma_r), ("blue", gamma_b)):
            if (curve, k) not in ref:
                continue
            err = abs(fn(1.0, k) - ref[curve, k])
            worst = max(worst, err)
            checked.append(f"{curve}({k:.6g})")
    exact_green = all(gamma_g(1.0, k) == k / (k + 1.0) for k in np.linspace(0.01, 1.0, 100))
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-3 and exact_green and len(checked) == 6 and elapsed < 10.0
    return ok, (f"{len(checked)} reference points, max |error| {worst:.2e} (limit 1e-3); "
                f"green exact: {exact_green}; {elapsed:.2f} s (limit 10 s)")


# --------------------------------------------------------------------------- 3


def _predicted_regime(gamma, ts) -> int:
    if gamma < ts.gamma_g:
        return 1
    if gamma < ts.gamma_b:
        return 2
    if gamma < ts.gamma_r:
        return 3
    return 4


def criterion_3():
    rng = np.random.default_rng(SEED + 3)
    start = time.perf_counter()
    mismatches = 0
    resampled = 0
    n = 10_000
    for _ in range(n):
        while True:
            rho = float(_log_uniform(rng, 0.05, 20.0))
            k = float(rng.uniform(0.0, 1.0))
            gamma = float(rng.uniform(0.0, 1.0))
            if not (0.0 < k < 1.0 and 0.0 < gamma < 1.0):
                continue
            ts = thresholds(rho, k)
            if min(abs(gamma - t) for t in ts.as_tuple()) >= 1e-6:
                break
            resampled += 1
        predicted = REGIMES[_predicted_regime(gamma, ts)]
        p = SystemParams(rho, k, gamma)
        direct = {d: throughput(d, p, method="lu") for d in DESIGNS}
        observed = tuple(sorted(DESIGNS, key=direct.__getitem__))
        best = max(DESIGNS, key=direct.__getitem__)
        if observed != predicted or best is not predicted[-1]:
            mismatches += 1
    elapsed = time.perf_counter() - start
    ok = mismatches == 0 and elapsed < 60.0
    return ok, (f"{n} triples ({resampled} redrawn near a threshold), {mismatches} mismatches, "
                f"{elapsed:.1f} s (limit 60 s)")


# --------------------------------------------------------------------------- 4


def criterion_4():
    rng = np.random.default_rng(SEED + 4)
    violations = 0
    smallest = math.inf
    for _ in range(500):
        rho = float(_log_uniform(rng, 0.05, 20.0))
        k = float(rng.uniform(0.0, 1.0))
        while not 0.0 < k < 1.0:
            k = float(rng.uniform(0.0, 1.0))
        ts = thresholds(rho, k)
        chain = (0.0, ts.gamma_g, ts.gamma_b, ts.gamma_r, rho / (rho + 1.0))
        gaps = np.diff(chain)
        smallest = min(smallest, float(gaps.min()))
        if not np.all(gaps > 1e-9):
            violations += 1
    return violations == 0, f"500 (rho, k) pairs, {violations} violations, smallest gap {smallest:.3e} (limit 1e-9)"


# --------------------------------------------------------------------------- 5


def criterion_5():
    rng = np.random.default_rng(SEED + 5)
    violations = []
    # identical service: independent < partial < full
    for rho, k in zip(_log_uniform(rng, 0.05, 20.0, 200), 1.0 - rng.uniform(0.0, 1.0, 200)):
        p = SystemParams(rho, k, 1.0)
        t = {d: throughput(d, p) for d in DESIGNS}
        if not t[INDEP] < t[PARTIAL] < t[FULL]:
            violations.append(("gamma=1", rho, k))
    # gamma = 0: full frozen, partial is one loss server, independent best
    for rho, k in zip(_log_uniform(rng, 0.05, 20.0, 200), 1.0 - rng.uniform(0.0, 1.0, 200)):
        p = SystemParams(rho, k, 0.0)
        t = {d: throughput(d, p) for d in DESIGNS}
        frozen = t[FULL] == 0.0
        single_server = math.isclose(t[PARTIAL], rho / (rho + 1), rel_tol=1e-14)
        if not (frozen and single_server and t[PARTIAL] < t[INDEP]):
            violations.append(("gamma=0", rho, k))
    for rho in _log_uniform(rng, 0.05, 20.0, 50):
        p = SystemParams(rho, 0.0, 0.0)
        if not math.isclose(throughput(PARTIAL, p), throughput(INDEP, p), rel_tol=1e-14):
            violations.append(("gamma=0,k=0", rho, 0.0))
    # symmetric: every pairwise difference changes sign exactly at rho/(rho+1)
    worst = 0.0
    for rho in _log_uniform(rng, 0.05, 20.0, 100):
        top = rho / (rho + 1.0)
        for a, b in ((FULL, INDEP), (FULL, PARTIAL), (PARTIAL, INDEP)):
            def diff(g, a=a, b=b):
                p = SystemParams(rho, 1.0, g)
                return throughput(a, p, method="lu") - throughput(b, p, method="lu")
            lo, hi = diff(1e-6), diff(1.0)
            if not lo < 0.0 < hi:
                violations.append(("k=1 sign", rho, (a.value, b.value)))
                continue
            root = brentq(diff, 1e-6, 1.0, xtol=1e-15, rtol=4 * np.finfo(float).eps)
            worst = max(worst, abs(root - top))
            if abs(root - top) > 1e-10:
                violations.append(("k=1 root", rho, (a.value, b.value)))
    ok = not violations
    return ok, (f"{len(violations)} violations; symmetric crossover max |root - rho/(rho+1)| "
                f"{worst:.2e} (limit 1e-10)")


# --------------------------------------------------------------------------- 6


def criterion_6():
    rng = np.random.default_rng(SEED + 6)
    start = time.perf_counter()
    triples = [(float(_log_uniform(rng, 0.05, 20.0)), float(rng.uniform(0.0, 1.0)),
                float(rng.uniform(0.05, 1.0))) for _ in range(20)]
    hits = {}
    worst_z = {}
    for design in DESIGNS:
        hits[design] = 0
        worst_z[design] = 0.0
        for i, (rho, k, g) in enumerate(triples):
            p = SystemParams(rho, k, g)
            est = simulate(SimConfig(p, design, 2_000_000, seed=SEED + 100 * i + design_index(design)))
            z = abs(est.mean - throughput(design, p)) / est.std_error
            worst_z[design] = max(worst_z[design], z)
            hits[design] += z <= 3.0
    elapsed = time.perf_counter() - start
    ok = all(h >= 19 for h in hits.values()) and elapsed < 300.0
    detail = ", ".join(f"{d.value} {hits[d]}/20 (max z {worst_z[d]:.2f})" for d in DESIGNS)
    return ok, f"{detail}; {elapsed:.1f} s (limit 300 s)"


def design_index(design) -> int:
    return DESIGNS.index(design)


# --------------------------------------------------------------------------- 7


def _cli(*argv, cwd=None) -> subprocess.CompletedProcess:
    return subprocess.run([sys.executable, "-m", "flexloss", *argv], capture_output=True, cwd=cwd,
                          env=dict(os.environ), check=True)


def criterion_7():
    cfg = SimConfig(SystemParams(1.7, 0.4, 0.3), PARTIAL, 300_000, seed=42)
    same_estimate = simulate(cfg) == simulate(cfg)
    sim_args = ["simulate", "--design", "full", "--rho", "1", "--k", "0.5", "--gamma", "0.45",
                "--horizon", "200000", "--seed", "42", "--format", "csv"]
    same_sim_bytes = _cli(*sim_args).stdout == _cli(*sim_args).stdout
    outputs = []
    with tempfile.TemporaryDirectory() as tmp:
        for run in range(2):
            svg, table = Path(tmp, f"f{run}.svg"), Path(tmp, f"f{run}.csv")
            _cli("levelset", "--rho", "1", "--steps", "25", "--out-svg", str(svg), "--out-csv", str(table))
            outputs.append((svg.read_bytes(), table.read_bytes()))
    same_svg = outputs[0][0] == outputs[1][0]
    same_csv = outputs[0][1] == outputs[1][1]
    ok = same_estimate and same_sim_bytes and same_svg and same_csv
    return ok, (f"estimate identical: {same_estimate}, simulate stdout identical: {same_sim_bytes}, "
                f"SVG identical: {same_svg}, CSV identical: {same_csv}")


CRITERIA = [
    (1, "closed forms agree with the stationary solve", criterion_1),
    (2, "level-set reference coordinates at rho = 1", criterion_2),
    (3, "regime prediction matches direct throughput comparison", criterion_3),
    (4, "strict threshold chain", criterion_4),
    (5, "boundary orderings and symmetric crossover", criterion_5),
    (6, "simulation agrees with the analytic throughput", criterion_6),
    (7, "byte-identical outputs for identical inputs", criterion_7),
]


@pytest.mark.parametrize("number,title,check", CRITERIA, ids=[f"criterion_{n}" for n, _, _ in CRITERIA])
def test_acceptance(number, title, check, capsys):
    ok, detail = check()
    with capsys.disabled():
        print()
        report(number, title, ok, detail)
    assert ok, detail


if __name__ == "__main__":
    failed = 0
    for number, title, check in CRITERIA:
        ok, detail = check()
        report(number, title, ok, detail)
        failed += not ok
    sys.exit(1 if failed else 0)
