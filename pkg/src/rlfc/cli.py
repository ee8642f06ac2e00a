"""Command line front end.

Commands: analyze (closed-form excess distributions), simulate (Monte
Carlo), compare (model vs simulation with a 3-standard-error gate), figures
(render the summary plots plus their CSV companions).

Exit codes: 0 success, 1 usage or configuration error, 2 compare gate
failure, 3 internal error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from typing import List, Optional, Sequence

from . import analytics, sim

__all__ = ["main", "run"]

_SCHEME_TOKENS = {
    "traditional": sim.SCHEME_TRADITIONAL,
    "gamma": sim.SCHEME_GAMMA,
    "gamma-blockack": sim.SCHEME_BLOCKACK,
}


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 on usage errors; 2 is taken by the
    # compare gate, so route usage problems through the exception path
    def error(self, message: str) -> None:  # type: ignore[override]
        raise _UsageError(message)


def _add_output_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--format", choices=("csv", "json"), default="csv", help="output format"
    )
    parser.add_argument(
        "--out", default="-", metavar="PATH", help="output file, - for stdout"
    )


def _build_parser() -> _Parser:
    parser = _Parser(prog="rlfc", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    pa = sub.add_parser("analyze", help="closed-form excess-codeword distribution")
    pa.add_argument("--k", required=True, type=int)
    pa.add_argument("--q", type=int, default=2)
    pa.add_argument("--gamma", type=int, default=0)
    pa.add_argument("--blockack", action="store_true")
    pa.add_argument("--delta-max", type=int, default=8)
    pa.add_argument(
        "--baseline", action="store_true", help="append unconstrained-draw rows"
    )
    _add_output_args(pa)
    pa.set_defaults(func=_cmd_analyze)

    ps = sub.add_parser("simulate", help="Monte Carlo over an erasure channel")
    ps.add_argument("--scheme", required=True, choices=sorted(_SCHEME_TOKENS))
    ps.add_argument("--k", required=True, type=int)
    ps.add_argument("--gamma", type=int, default=0)
    ps.add_argument("--p", type=float, default=0.0)
    ps.add_argument("--receivers", type=int, default=1)
    ps.add_argument("--runs", type=int, default=500)
    ps.add_argument("--seed", type=int, default=0)
    ps.add_argument("--payload-len", type=int, default=1024)
    ps.add_argument("--jobs", type=int, default=1)
    ps.add_argument(
        "--trace", metavar="PATH", help="write the codeword stream (requires --runs 1)"
    )
    _add_output_args(ps)
    ps.set_defaults(func=_cmd_simulate)

    pc = sub.add_parser("compare", help="model pmf vs simulation, gated at 3 SE")
    pc.add_argument("--k", required=True, type=int)
    pc.add_argument("--q", type=int, default=2)
    pc.add_argument("--gamma", type=int, default=0)
    pc.add_argument("--blockack", action="store_true")
    pc.add_argument("--delta-max", type=int, default=64)
    pc.add_argument("--runs", type=int, default=500)
    pc.add_argument("--seed", type=int, default=0)
    pc.add_argument("--payload-len", type=int, default=1024)
    pc.add_argument("--jobs", type=int, default=1)
    _add_output_args(pc)
    pc.set_defaults(func=_cmd_compare)

    pf = sub.add_parser("figures", help="render plots and companion CSV files")
    pf.add_argument("--out-dir", default="figures")
    pf.add_argument("--runs", type=int, default=500)
    pf.add_argument("--seed", type=int, default=0)
    pf.add_argument("--receivers", type=int, default=10)
    pf.add_argument("--jobs", type=int, default=1)
    pf.set_defaults(func=_cmd_figures)

    return parser


def _jsonable(value):
    if isinstance(value, float) and not math.isinf(value):
        return float(format(value, ".6g"))
    return value


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format(value, ".6g")
    return str(value)


def _emit(rows: List[dict], columns: Sequence[str], fmt: str, out: str) -> None:
    if fmt == "json":
        payload = [{c: _jsonable(row[c]) for c in columns} for row in rows]
        text = json.dumps(payload, indent=2) + "\n"
    else:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_cell(row[c]) for c in columns])
        text = buf.getvalue()
    if out == "-":
        sys.stdout.write(text)
    else:
        with open(out, "w", newline="") as fh:
            fh.write(text)


_ANALYZE_COLUMNS = (
    "k",
    "q",
    "gamma",
    "blockack",
    "delta",
    "pmf",
    "cdf",
    "expected_total",
    "expected_excess",
)


def _model_rows(dist, wide, gamma) -> List[dict]:
    # pmf/cdf come from the table-resolution distribution, expectations from
    # the wide one; rows past the point where the pmf is exactly zero are
    # dropped (k <= gamma+1 collapses to the single delta=0 row)
    rows = [
        {
            "k": dist.k,
            "q": dist.q,
            "gamma": gamma,
            "blockack": dist.blockack,
            "delta": d,
            "pmf": dist.pmf[d],
            "cdf": dist.cdf[d],
            "expected_total": wide.expected_total,
            "expected_excess": wide.expected_excess,
        }
        for d in range(dist.delta_max + 1)
    ]
    while len(rows) > 1 and rows[-1]["pmf"] == 0.0:
        rows.pop()
    return rows


def _cmd_analyze(args) -> int:
    wide_cap = max(64, args.delta_max)
    table = analytics.ModelParams(
        args.k, args.q, args.gamma, args.blockack, delta_max=args.delta_max
    )
    wide = analytics.ModelParams(
        args.k, args.q, args.gamma, args.blockack, delta_max=wide_cap
    )
    rows = _model_rows(
        analytics.excess_distribution(table),
        analytics.excess_distribution(wide),
        args.gamma,
    )
    if args.baseline:
        rows += _model_rows(
            analytics.baseline_traditional(args.k, q=args.q, delta_max=args.delta_max),
            analytics.baseline_traditional(args.k, q=args.q, delta_max=wide_cap),
            None,
        )
    _emit(rows, _ANALYZE_COLUMNS, args.format, args.out)
    return 0


_SIMULATE_COLUMNS = (
    "scheme",
    "k",
    "gamma",
    "p",
    "receivers",
    "runs",
    "seed",
    "mean_tx",
    "stddev",
    "ci95",
    "mean_excess",
)


def _simulate_row(report: sim.SimReport) -> dict:
    cfg = report.config
    traditional = cfg.scheme == sim.SCHEME_TRADITIONAL
    return {
        "scheme": cfg.scheme,
        "k": cfg.k,
        "gamma": None if traditional else cfg.gamma,
        "p": cfg.p,
        "receivers": cfg.receivers,
        "runs": report.runs,
        "seed": cfg.seed,
        "mean_tx": report.mean_transmissions,
        "stddev": report.stddev,
        "ci95": report.ci95_halfwidth,
        "mean_excess": report.mean_excess,
    }


def _cmd_simulate(args) -> int:
    cfg = sim.ChannelConfig(
        k=args.k,
        scheme=_SCHEME_TOKENS[args.scheme],
        gamma=args.gamma,
        p=args.p,
        receivers=args.receivers,
        payload_len=args.payload_len,
        seed=args.seed,
    )
    trace: Optional[list] = [] if args.trace else None
    report = sim.monte_carlo(cfg, args.runs, jobs=args.jobs, trace=trace)
    if args.trace:
        sim.write_trace(args.trace, cfg.k, cfg.seed, trace)
    _emit([_simulate_row(report)], _SIMULATE_COLUMNS, args.format, args.out)
    return 0


_COMPARE_COLUMNS = _ANALYZE_COLUMNS + (
    "scheme",
    "p",
    "receivers",
    "runs",
    "seed",
    "mean_tx",
    "stddev",
    "ci95",
    "mean_excess",
    "empirical_pmf",
    "abs_deviation",
    "std_err",
)


def _cmd_compare(args) -> int:
    if args.q != 2:
        raise sim.ConfigError("compare simulates the GF(2) codec; --q must be 2")
    cap = max(64, args.delta_max)
    params = analytics.ModelParams(
        args.k, 2, args.gamma, args.blockack, delta_max=cap
    )
    dist = analytics.excess_distribution(params)
    cfg = sim.ChannelConfig(
        k=args.k,
        scheme=sim.SCHEME_BLOCKACK if args.blockack else sim.SCHEME_GAMMA,
        gamma=args.gamma,
        p=0.0,
        receivers=1,
        payload_len=args.payload_len,
        seed=args.seed,
    )
    report = sim.monte_carlo(cfg, args.runs, jobs=args.jobs)
    empirical = dict(report.empirical_excess_pmf)
    observations = args.runs
    checked = []
    max_ratio = 0.0
    for delta in range(cap + 1):
        model_p = dist.pmf[delta]
        emp_p = empirical.get(delta, 0.0)
        se = math.sqrt(model_p * (1.0 - model_p) / observations)
        deviation = abs(emp_p - model_p)
        if deviation == 0.0:
            ratio = 0.0
        elif se == 0.0:
            ratio = math.inf
        else:
            ratio = deviation / se
        max_ratio = max(max_ratio, ratio)
        checked.append((delta, model_p, emp_p, deviation, se))
    emp_top = max(empirical, default=0)
    model_top = max(
        (d for d in range(cap + 1) if dist.pmf[d] > 1e-9), default=0
    )
    visible = min(max(emp_top, model_top), args.delta_max)
    base = _simulate_row(report)
    rows = []
    for delta, model_p, emp_p, deviation, se in checked[: visible + 1]:
        row = {
            "k": args.k,
            "q": 2,
            "gamma": args.gamma,
            "blockack": args.blockack,
            "delta": delta,
            "pmf": model_p,
            "cdf": dist.cdf[delta],
            "expected_total": dist.expected_total,
            "expected_excess": dist.expected_excess,
            "empirical_pmf": emp_p,
            "abs_deviation": deviation,
            "std_err": se,
        }
        row.update(
            (key, base[key])
            for key in (
                "scheme",
                "p",
                "receivers",
                "runs",
                "seed",
                "mean_tx",
                "stddev",
                "ci95",
                "mean_excess",
            )
        )
        rows.append(row)
    _emit(rows, _COMPARE_COLUMNS, args.format, args.out)
    return 0 if max_ratio <= 3.0 else 2


def _cmd_figures(args) -> int:
    from . import figures

    written = figures.render_all(
        args.out_dir,
        runs=args.runs,
        seed=args.seed,
        receivers=args.receivers,
        jobs=args.jobs,
    )
    for path in written:
        print(path)
    return 0


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (sim.ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except sim.SessionLimitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except Exception as exc:  # pragma: no cover - defensive
        print(f"internal error: {exc!r}", file=sys.stderr)
        return 3


def run() -> None:
    sys.exit(main(sys.argv[1:]))


if __name__ == "__main__":
    run()
