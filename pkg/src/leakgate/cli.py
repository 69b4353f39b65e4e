"""Command-line entry point.

Exit codes: 0 no violation / success, 1 usage error, 2 data error,
3 violation found.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import asdict

from . import __version__
from .bootstrap import DEFAULT_B
from .detector import SCHEMA_VERSION, TestConfig, run_test
from .errors import DataError, LeakgateError, UsageError
from .ingest import UNITS, atomic_write_text, load_series, pair, write_series
from .power import PAPER_LITERAL, THEOREM_DERIVED, PowerRequest, estimate_sample_size
from .quantiles import DEFAULT_PRESET, parse_levels
from .simulate import DEFAULT_BURN_IN, DEFAULT_REPS, Ar1Spec, GridSpec, gen_ar1, rejection_grid

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_VIOLATION = 3

THREADS_ENV = "LEAKGATE_THREADS"


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _float_list(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(t) for t in text.split(",") if t.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma separated numbers, got {text!r}") from None


def _default_threads() -> int:
    try:
        return max(1, int(os.environ.get(THREADS_ENV, "1")))
    except ValueError:
        return 1


def _emit(text: str, output: str | None) -> None:
    if output:
        atomic_write_text(output, text)
    else:
        sys.stdout.write(text)


def _kind(value: str) -> str | None:
    return None if value == "auto" else value


def cmd_analyze(args) -> int:
    x = load_series(args.baseline, unit=args.unit)
    y = load_series(args.candidate, unit=args.unit)
    sample = pair(x, y, truncate=args.truncate)
    config = TestConfig(
        alpha=args.alpha,
        delta=args.delta,
        levels=tuple(parse_levels(args.levels)),
        B=args.B,
        seed=args.seed,
        kind_override=_kind(args.kind),
        threads=args.threads,
    )
    result = run_test(sample, config)
    report = result.to_dict(include_matrix=args.include_matrix)
    report["inputs"] = {"baseline": str(args.baseline), "candidate": str(args.candidate), "truncate": args.truncate}

    if args.format == "json":
        text = json.dumps(report, indent=2) + "\n"
    elif args.format == "csv":
        lines = ["# " + json.dumps({k: v for k, v in report.items() if k != "levels"})]
        lines.append("k,qx,qy,diff,sigma,in_k_sub,in_k_sub_max")
        for row in report["levels"]:
            lines.append(",".join(repr(v) if isinstance(v, float) else str(v).lower() for v in row.values()))
        text = "\n".join(lines) + "\n"
    else:
        d = result.diagnostics
        text = (
            f"decision:   {result.decision}{' (zero-variance gap above delta)' if result.forced else ''}\n"
            f"statistic:  {report['statistic']}\n"
            f"threshold:  {report['threshold']}\n"
            f"n={result.n}  m={result.m}  kind={result.kind.kind} ({result.kind.distinct_count} distinct)\n"
            f"levels: {d.levels.size} total, {int(d.in_k_sub.sum())} in K_sub, {int(d.in_k_sub_max.sum())} in K_sub_max\n"
            f"config: {json.dumps(report['config'])}\n"
        )
    _emit(text, args.output)
    return EXIT_VIOLATION if result.violation else EXIT_OK


def cmd_power(args) -> int:
    req = PowerRequest(
        mu=args.mu,
        delta=args.delta,
        p=args.p,
        alpha=args.alpha,
        shift=args.shift,
        B=args.B,
        seed=args.seed,
        formula=PAPER_LITERAL if args.formula == "literal" else THEOREM_DERIVED,
        kind_override=_kind(args.kind),
    )
    sample = pair(load_series(args.pilot_x, unit=args.unit), load_series(args.pilot_y, unit=args.unit), truncate=args.truncate)
    levels = parse_levels(args.levels)
    result = estimate_sample_size(sample, req, levels)
    config = asdict(req)
    config["levels"] = levels.tolist()
    report = {"schema_version": SCHEMA_VERSION, "seed": req.seed, "config": config, **result.to_dict()}
    if args.format == "json":
        text = json.dumps(report, indent=2) + "\n"
    elif args.format == "csv":
        keys = ["n", "n_sub_raw", "sigma_hat", "variant", "formula", "m", "pilot_n"]
        text = "# " + json.dumps(config) + "\n" + ",".join(keys) + "\n" + ",".join(str(report[k]) for k in keys) + "\n"
    else:
        c = result.sigma_candidates
        text = (
            f"estimated n: {result.n}  (raw {result.n_sub_raw:.2f}, floor 100)\n"
            f"sigma_hat:   {result.sigma_hat:.6g}  [{result.variant}, {result.formula}]\n"
            f"candidates:  min={c['min']:.6g} median={c['median']:.6g} max={c['max']:.6g}\n"
            f"pilot n={result.pilot_n}  m={result.m}\n"
            f"config: {json.dumps(config)}\n"
        )
    _emit(text, args.output)
    return EXIT_OK


def cmd_simulate(args) -> int:
    grid = GridSpec(
        phis=args.phis,
        mus=args.mus,
        n=args.n,
        delta=args.delta,
        alpha=args.alpha,
        B=args.B,
        reps=args.reps,
        seed=args.seed,
        levels=tuple(parse_levels(args.levels)),
        burn_in=args.burn_in,
    )
    surface = rejection_grid(grid, workers=args.threads)
    if args.format == "json":
        text = json.dumps({"schema_version": SCHEMA_VERSION, "seed": grid.seed, **surface.to_dict()}, indent=2) + "\n"
    elif args.format == "csv":
        g = surface.to_dict()["grid"]
        text = "# " + json.dumps(g) + "\n" + surface.to_csv()
    else:
        text = "# " + json.dumps(surface.to_dict()["grid"]) + "\n" + surface.to_csv(delimiter="\t")
    _emit(text, args.output)
    return EXIT_OK


def cmd_gen_ar1(args) -> int:
    spec = Ar1Spec(phi=args.phi, sigma=args.sigma, mu_shift=args.mu, n=args.n, burn_in=args.burn_in, seed=args.seed)
    sample = gen_ar1(spec)
    write_series(sample.x, args.x_out)
    write_series(sample.y, args.y_out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="leakgate", description="Relevant-difference timing side-channel test.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, seed_default=0):
        p.add_argument("--alpha", type=float, default=0.1, help="type-1 error rate (default 0.1)")
        p.add_argument("--levels", default=DEFAULT_PRESET, help="preset (percentiles, deciles, quartiles) or list")
        p.add_argument("--B", type=int, default=DEFAULT_B, help="bootstrap replicates (default 1000)")
        p.add_argument("--seed", type=int, default=seed_default)
        p.add_argument("--format", choices=("json", "text", "csv"), default="json")
        p.add_argument("--output", "-o", help="write the report here (atomically) instead of stdout")
        p.add_argument("--threads", type=int, default=_default_threads(), help=f"worker threads (env {THREADS_ENV})")

    a = sub.add_parser("analyze", help="test two measurement files for a relevant difference")
    a.add_argument("baseline")
    a.add_argument("candidate")
    a.add_argument("--delta", type=float, required=True, help="negligibility threshold, in measurement units")
    a.add_argument("--kind", choices=("auto", "Continuous", "Discrete"), default="auto")
    a.add_argument("--truncate", action="store_true", help="cut unequal inputs to the common prefix")
    a.add_argument("--unit", choices=UNITS, default="unitless")
    a.add_argument("--include-matrix", action="store_true", help="add the bootstrap matrix to the JSON report")
    common(a)
    a.set_defaults(func=cmd_analyze)

    p = sub.add_parser("power", help="estimate the sample size needed to detect a leak")
    p.add_argument("pilot_x")
    p.add_argument("pilot_y")
    p.add_argument("--mu", type=float, required=True, help="expected leak size")
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--p", type=float, default=0.9, help="target detection rate (default 0.9)")
    p.add_argument("--shift", action="store_true", help="leak is a shift of the whole distribution")
    p.add_argument("--formula", choices=("derived", "literal"), default="derived", help="sample-size formula (default derived)")
    p.add_argument("--kind", choices=("auto", "Continuous", "Discrete"), default="auto")
    p.add_argument("--truncate", action="store_true")
    p.add_argument("--unit", choices=UNITS, default="unitless")
    common(p)
    p.set_defaults(func=cmd_power)

    s = sub.add_parser("simulate", help="Monte Carlo rejection rates on AR(1) data")
    s.add_argument("--phis", type=_float_list, default=(0.0,))
    s.add_argument("--mus", type=_float_list, default=(0.0,))
    s.add_argument("--n", type=int, default=1000)
    s.add_argument("--delta", type=float, default=0.5)
    s.add_argument("--reps", type=int, default=DEFAULT_REPS)
    s.add_argument("--burn-in", type=int, default=DEFAULT_BURN_IN)
    common(s)
    s.set_defaults(func=cmd_simulate, format="csv")

    g = sub.add_parser("gen-ar1", help="write a synthetic AR(1) pair in the input text format")
    g.add_argument("x_out")
    g.add_argument("y_out")
    g.add_argument("--n", type=int, default=1000)
    g.add_argument("--phi", type=float, default=0.0)
    g.add_argument("--mu", type=float, default=0.0, help="shift applied to y")
    g.add_argument("--sigma", type=float, default=1.0)
    g.add_argument("--burn-in", type=int, default=DEFAULT_BURN_IN)
    g.add_argument("--seed", type=int, default=0)
    g.set_defaults(func=cmd_gen_ar1)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except DataError as exc:
        print(f"leakgate: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (UsageError, LeakgateError) as exc:
        print(f"leakgate: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
