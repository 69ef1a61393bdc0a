"""Command-line interface.

Subcommands::

    flexloss solve      --design full --rho 1 --k 1 --gamma 1
    flexloss throughput --rho 1 --k 0.5 --gamma 0.45
    flexloss thresholds --rho 1 --k 0.5
    flexloss levelset   --rho 1 --k-min 0.02 --k-max 0.98 --steps 49 --out-svg fig.svg --out-csv fig.csv
    flexloss simulate   --design full --rho 1 --k 1 --gamma 1 --horizon 1000000 --seed 42
    flexloss sweep      grid.cfg

Every command writes its result to stdout in ``--format`` (table, csv or json)
and diagnostics to stderr. Exit codes: 0 ok, 2 usage or domain error, 3 I/O error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

from . import analysis
from .core import FlexibilityDesign, validate_params
from .ctmc import balance_residual, build_generator, stationary_distribution
from .closed_form import stationary_gamma_zero
from .errors import ConfigError, DomainError, FlexlossError, TieBreakUnresolved, UnsupportedDesign
from .simulate import SimConfig, simulate as run_simulation, validate_against_analytic
from .svg import render_level_sets

SCHEMA_VERSION = "1"
SIG_DIGITS = 12
EXIT_OK, EXIT_USAGE, EXIT_IO = 0, 2, 3

# CSV column orders are part of the interface
SOLVE_COLUMNS = ["state", "probability"]
THROUGHPUT_COLUMNS = ["rho", "k", "gamma", "T_is", "T_ps", "T_fs", "regime", "ordering", "optimal", "tie"]
THRESHOLD_COLUMNS = ["rho", "k", "gamma_g", "gamma_b", "gamma_r", "degenerate", "gamma_r_limit"]
LEVELSET_COLUMNS = ["k", "gamma_g", "gamma_b", "gamma_r"]
SIMULATE_COLUMNS = ["design", "rho", "k", "gamma", "horizon", "seed", "mean", "half_width_95",
                    "std_error", "accepted", "offered", "accept_frac_type1", "accept_frac_type2",
                    "analytic", "z_score", "pass"]
SWEEP_COLUMNS = THROUGHPUT_COLUMNS


class UsageError(Exception):
    pass


def fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format(value, f"#.{SIG_DIGITS}g")
    return str(value)


def _json_value(value):
    if isinstance(value, float):
        if value != value or value in (float("inf"), float("-inf")):
            return None
        return float(format(value, f".{SIG_DIGITS}g"))
    return value


def render(command: str, columns: list[str], rows: list[dict], fmt_name: str, extra: dict | None = None) -> str:
    if fmt_name == "json":
        doc = {"schema_version": SCHEMA_VERSION, "command": command}
        doc.update({k: _json_value(v) for k, v in (extra or {}).items()})
        doc["rows"] = [{c: _json_value(r.get(c)) for c in columns} for r in rows]
        return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"
    if fmt_name == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\r\n")
        writer.writerow(columns)
        for r in rows:
            writer.writerow([fmt(r.get(c)) for c in columns])
        for key, value in (extra or {}).items():
            writer.writerow([key, fmt(value)])
        return buf.getvalue()
    lines = [", ".join(columns)]
    lines += [", ".join(fmt(r.get(c)) for c in columns) for r in rows]
    lines += [f"{key}, {fmt(value)}" for key, value in (extra or {}).items()]
    return "\n".join(lines) + "\n"


def _params(args):
    return validate_params(args.rho, args.k, args.gamma)


def cmd_solve(args) -> str:
    params = _params(args)
    design = FlexibilityDesign.parse(args.design)
    if design is FlexibilityDesign.INDEPENDENT:
        raise UnsupportedDesign("independent has product form; use throughput")
    gen = build_generator(design, params)
    if params.gamma == 0.0:
        dist = stationary_gamma_zero(design, params)
    else:
        dist = stationary_distribution(gen, method=args.method)
    rows = [{"state": str(s), "probability": p} for s, p in dist]
    return render("solve", SOLVE_COLUMNS, rows, args.format,
                  extra={"residual_inf": balance_residual(gen, dist)})


def throughput_row(params) -> dict:
    values = analysis.design_throughputs(params)
    row = {"rho": params.rho, "k": params.k, "gamma": params.gamma,
           "T_is": values[analysis.IS], "T_ps": values[analysis.PS], "T_fs": values[analysis.FS]}
    try:
        regime = analysis.classify_regime(params)
    except TieBreakUnresolved as tie:
        best = max(values.values())
        winners = [d.value for d in values if best - values[d] <= analysis.TIE_TOL]
        row.update(regime="tie", ordering="", optimal="|".join(sorted(winners)),
                   tie="|".join(sorted(d.value for d in tie.tied)))
        return row
    row.update(regime=regime.regime_index, ordering=str(regime), optimal=regime.optimal.value, tie="")
    return row


def cmd_throughput(args) -> str:
    return render("throughput", THROUGHPUT_COLUMNS, [throughput_row(_params(args))], args.format)


def cmd_thresholds(args) -> str:
    ts = analysis.thresholds(args.rho, args.k, args.tol)
    row = {"rho": ts.rho, "k": ts.k, "gamma_g": ts.gamma_g, "gamma_b": ts.gamma_b,
           "gamma_r": ts.gamma_r, "degenerate": ts.degenerate, "gamma_r_limit": ts.gamma_r_limit}
    if ts.degenerate and ts.k == 0.0:
        print("k = 0: full and partial designs coincide, every gamma equalises them; "
              "gamma_r_limit is the one-sided limit k -> 0+", file=sys.stderr)
    return render("thresholds", THRESHOLD_COLUMNS, [row], args.format)


def levelset_grid(k_min: float, k_max: float, steps: int) -> list[float]:
    if not 0.0 < k_min < k_max < 1.0:
        raise UsageError("--k-min/--k-max must satisfy 0 < k_min < k_max < 1")
    if steps < 2:
        raise UsageError("--steps must be at least 2")
    return [k_min + (k_max - k_min) * i / (steps - 1) for i in range(steps)]


def levelset_csv(sets) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\r\n")
    writer.writerow(LEVELSET_COLUMNS)
    for (k, g), (_, b), (_, r) in zip(sets.green.points, sets.blue.points, sets.red.points):
        writer.writerow([fmt(k), fmt(g), fmt(b), fmt(r)])
    return buf.getvalue()


def cmd_levelset(args) -> str:
    validate_params(args.rho, 0.0, 0.0)
    grid = levelset_grid(args.k_min, args.k_max, args.steps)
    sets = analysis.trace_level_sets(args.rho, grid, args.tol)
    if args.out_csv:
        Path(args.out_csv).write_text(levelset_csv(sets), encoding="utf-8", newline="")
        print(f"wrote {args.out_csv}", file=sys.stderr)
    if args.out_svg:
        Path(args.out_svg).write_text(render_level_sets(sets), encoding="utf-8", newline="")
        print(f"wrote {args.out_svg}", file=sys.stderr)
    rows = [{"k": k, "gamma_g": g, "gamma_b": b, "gamma_r": r}
            for (k, g), (_, b), (_, r) in zip(sets.green.points, sets.blue.points, sets.red.points)]
    return render("levelset", LEVELSET_COLUMNS, rows, args.format, extra={"rho": float(args.rho)})


def cmd_simulate(args) -> str:
    params = _params(args)
    config = SimConfig(params, FlexibilityDesign.parse(args.design), args.horizon,
                       warmup_events=args.warmup, seed=args.seed, batches=args.batches)
    est = run_simulation(config)
    report = validate_against_analytic(config, est)
    row = {"design": config.design.value, "rho": params.rho, "k": params.k, "gamma": params.gamma,
           "horizon": args.horizon, "seed": args.seed, "mean": est.mean,
           "half_width_95": est.half_width_95, "std_error": est.std_error,
           "accepted": est.accepted, "offered": est.offered,
           "accept_frac_type1": est.by_type[0], "accept_frac_type2": est.by_type[1],
           "analytic": report.analytic, "z_score": report.z_score, "pass": report.passed}
    return render("simulate", SIMULATE_COLUMNS, [row], args.format)


SWEEP_KEYS = {"rho_list", "k_list", "gamma_list", "output"}


def parse_sweep_config(text: str) -> dict:
    """Parse ``key = value`` lines; ``#`` starts a comment. Duplicate keys: last wins."""
    values: dict = {}
    seen_at: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw.strip()!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in SWEEP_KEYS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in seen_at:
            print(f"warning: line {lineno}: duplicate key {key!r} overrides line {seen_at[key]}",
                  file=sys.stderr)
        seen_at[key] = lineno
        if key == "output":
            values[key] = value
            continue
        items = [v.strip() for v in value.split(",") if v.strip()]
        if not items:
            raise ConfigError(f"line {lineno}: {key} is empty")
        try:
            values[key] = [float(v) for v in items]
        except ValueError:
            raise ConfigError(f"line {lineno}: {key} must be a comma-separated list of numbers") from None
    for key in ("rho_list", "k_list", "gamma_list"):
        if key not in values:
            raise ConfigError(f"missing required key {key!r}")
    return values


def sweep_rows(config: dict) -> list[dict]:
    return [throughput_row(validate_params(rho, k, gamma))
            for rho in config["rho_list"] for k in config["k_list"] for gamma in config["gamma_list"]]


def cmd_sweep(args) -> str:
    text = Path(args.config).read_text(encoding="utf-8")
    config = parse_sweep_config(text)
    rows = sweep_rows(config)
    out = config.get("output")
    if out:
        fmt_name = "csv" if args.format == "table" else args.format
        Path(out).write_text(render("sweep", SWEEP_COLUMNS, rows, fmt_name), encoding="utf-8", newline="")
        print(f"wrote {len(rows)} rows to {out}", file=sys.stderr)
        return ""
    return render("sweep", SWEEP_COLUMNS, rows, args.format)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="flexloss",
        description="Flexibility analysis of a two-server loss system with prolonged non-dedicated service.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, gamma=True, design=False):
        if design:
            p.add_argument("--design", required=True, choices=[d.value for d in FlexibilityDesign])
        p.add_argument("--rho", type=float, required=True, help="type-1 occupation rate")
        p.add_argument("--k", type=float, required=True, help="asymmetry degree in [0, 1]")
        if gamma:
            p.add_argument("--gamma", type=float, required=True, help="prolonged coefficient in [0, 1]")
        p.add_argument("--format", choices=["table", "csv", "json"], default="table")

    p = sub.add_parser("solve", help="stationary distribution of the full or partial chain")
    common(p, design=True)
    p.add_argument("--method", choices=["gth", "lu"], default="gth")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("throughput", help="throughputs, regime and optimal design")
    common(p)
    p.set_defaults(func=cmd_throughput)

    p = sub.add_parser("thresholds", help="gamma_g < gamma_b < gamma_r for (rho, k)")
    common(p, gamma=False)
    p.add_argument("--tol", type=float, default=analysis.DEFAULT_TOL)
    p.set_defaults(func=cmd_thresholds)

    p = sub.add_parser("levelset", help="trace the crossover curves over k and plot them")
    p.add_argument("--rho", type=float, required=True)
    p.add_argument("--k-min", type=float, default=0.02)
    p.add_argument("--k-max", type=float, default=0.98)
    p.add_argument("--steps", type=int, default=49)
    p.add_argument("--out-svg")
    p.add_argument("--out-csv")
    p.add_argument("--tol", type=float, default=analysis.DEFAULT_TOL)
    p.add_argument("--format", choices=["table", "csv", "json"], default="table")
    p.set_defaults(func=cmd_levelset)

    p = sub.add_parser("simulate", help="discrete-event estimate compared with the analytic value")
    common(p, design=True)
    p.add_argument("--horizon", type=int, default=1_000_000, help="number of arrivals")
    p.add_argument("--warmup", type=int, default=None, help="warm-up arrivals (default 5%% of horizon)")
    p.add_argument("--batches", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("sweep", help="regimes and optima over a grid read from a config file")
    p.add_argument("config", help="key = value file with rho_list, k_list, gamma_list and optional output")
    p.add_argument("--format", choices=["table", "csv", "json"], default="csv")
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        out = args.func(args)
    except DomainError as exc:
        print(f"error: --{exc.field.replace('_', '-')}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (FlexlossError, UsageError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    sys.stdout.write(out)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
