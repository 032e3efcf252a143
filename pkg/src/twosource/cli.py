"""Command-line front end: single-point bounds and grid sweeps as CSV or JSON.

Grids are given as ``--axis name:min:max:count`` (inclusive endpoints,
repeatable). Rows are emitted in grid order, first axis slowest. A JSON
file passed with ``--config`` supplies defaults under the flag names;
explicit flags win. ``TWOSOURCE_WORKERS`` sets the default worker count.
"""
from __future__ import annotations

import argparse
import csv
import io
import itertools
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from .asymptotics import chernoff_analytic, chernoff_numeric
from .discrimination import helstrom_m_shot, helstrom_one_shot, minimal_m
from .model import ScenarioKind, ScenarioParams, build_states
from .simulate import SimConfig, run_experiment
from .sliver import mode_probabilities, protocol_error, sliver_exponent

WORKERS_ENV = "TWOSOURCE_WORKERS"

COLUMNS = {
    "advantage": ["scenario", "q", "k", "p1", "e_guess", "e_min", "advantage_pct", "forbidden"],
    "minimal-m": ["scenario", "q", "k", "p1", "m_min"],
    "chernoff": ["scenario", "q", "k", "xi_numeric", "xi_analytic", "s_star", "xi_sliver"],
    "sliver": [
        "scenario", "k", "pr_even_h2", "pr_odd_h2", "p_err_1shot",
        "e_min_1shot", "saturation", "xi_sliver", "xi_q",
    ],
    "simulate": [
        "scenario", "k", "m", "trials", "seed", "wrong_h1", "wrong_h2",
        "p_hat", "stderr", "p_theory",
    ],
}

# axes each sweep accepts, and the ones it cannot run without
AXES = {
    "advantage": ({"k", "q", "p1"}, {"p1"}),
    "minimal-m": ({"k", "q", "p1"}, {"p1"}),
    "chernoff": ({"k", "q"}, {"k"}),
    "sliver": ({"k"}, {"k"}),
    "simulate": ({"k", "m"}, {"k"}),
}


class CliError(Exception):
    pass


# -- row builders (module level so process pools can pickle them) -------------


def _row_advantage(pt):
    params = ScenarioParams(pt["scenario"], pt["k"], pt["q"], pt["p1"])
    m = int(pt.get("m", 1))
    rep = helstrom_one_shot(params) if m == 1 else helstrom_m_shot(params, m)
    return [params.kind.value, params.q, params.k, params.p1, rep.e_guess, rep.e_min,
            rep.advantage_pct, rep.forbidden]


def _row_minimal_m(pt):
    params = ScenarioParams(pt["scenario"], pt["k"], pt["q"], pt["p1"])
    rep = minimal_m(params, pt["m_cap"])
    return [params.kind.value, params.q, params.k, params.p1, -1 if rep.exceeded else rep.m_min]


def _row_chernoff(pt):
    params = ScenarioParams(pt["scenario"], pt["k"], pt["q"])
    rep = chernoff_numeric(build_states(params))
    return [params.kind.value, params.q, params.k, rep.xi,
            chernoff_analytic(params.kind, params.k, params.q), rep.s_star,
            sliver_exponent(params.kind, params.k)]


def _row_sliver(pt):
    kind, k = ScenarioKind.parse(pt["scenario"]), pt["k"]
    probs = mode_probabilities(kind, k)
    one = protocol_error(kind, k, 1)
    e_min = helstrom_one_shot(ScenarioParams(kind, k, 0.5, 0.5)).e_min
    return [kind.value, k, probs.pr_even_h2, probs.pr_odd_h2, one.p_err, e_min,
            one.saturation, one.exponent, chernoff_analytic(kind, k, 0.5)]


def _row_simulate(pt):
    cfg = SimConfig(pt["scenario"], pt["k"], pt["m"], pt["trials"], pt["seed"])
    rep = run_experiment(cfg)
    return [cfg.kind.value, cfg.k, cfg.m, cfg.trials, cfg.seed, rep.wrong_h1, rep.wrong_h2,
            rep.p_hat, rep.stderr, rep.p_theory]


ROWS = {
    "advantage": _row_advantage,
    "minimal-m": _row_minimal_m,
    "chernoff": _row_chernoff,
    "sliver": _row_sliver,
    "simulate": _row_simulate,
}


# -- formatting -------------------------------------------------------------


def format_value(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, str):
        return v
    v = float(v) + 0.0
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return f"{v:.12g}"


def _json_value(v):
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, str):
        return v
    text = format_value(v)
    # JSON has no infinity literal; keep the CSV spelling
    return text if "inf" in text else float(text)


def render(columns, rows, fmt: str) -> str:
    if fmt == "json":
        records = [{c: _json_value(v) for c, v in zip(columns, row)} for row in rows]
        return json.dumps(records, indent=2) + "\n"
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([format_value(v) for v in row])
    return buf.getvalue()


def _emit(text: str, path: str | None) -> None:
    if path in (None, "-"):
        sys.stdout.write(text)
        return
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise CliError(f"cannot write {path}: {exc.strerror}") from None


# -- grids ------------------------------------------------------------------


def parse_axis(text: str):
    """``name:min:max:count`` -> (name, values)."""
    parts = text.split(":")
    if len(parts) != 4:
        raise CliError(f"axis {text!r} must look like name:min:max:count")
    name = parts[0].strip()
    try:
        lo, hi, count = float(parts[1]), float(parts[2]), int(parts[3])
    except ValueError:
        raise CliError(f"axis {text!r} has a non-numeric bound or count") from None
    if count < 1:
        raise CliError(f"axis {name} needs a positive count")
    if count > 1 and hi < lo:
        raise CliError(f"axis {name} has max < min")
    values = np.linspace(lo, hi, count) if count > 1 else np.array([lo])
    if name == "m":
        ints = np.rint(values)
        if np.any(np.abs(values - ints) > 1e-9):
            raise CliError("axis m must land on integers")
        return name, [int(v) for v in ints]
    return name, [float(v) for v in values]


def _scenarios(value: str) -> list[str]:
    if value == "both":
        return [ScenarioKind.ASYMMETRIC.value, ScenarioKind.SYMMETRIC.value]
    return [ScenarioKind.parse(value).value]


def build_points(command: str, args) -> list[dict]:
    allowed, required = AXES[command]
    axes = [parse_axis(a) for a in (args.axis or getattr(args, "config_axis", None) or [])]
    names = [n for n, _ in axes]
    if len(set(names)) != len(names):
        raise CliError("each axis may be given once")
    unknown = set(names) - allowed
    if unknown:
        raise CliError(f"{command} does not sweep {', '.join(sorted(unknown))}")
    missing = required - set(names)
    if missing:
        raise CliError(f"{command} needs an axis for {', '.join(sorted(missing))}")

    fixed = {n: getattr(args, n) for n in ("k", "q", "p1", "m") if getattr(args, n, None) is not None}
    for name in allowed - set(names):
        if name not in fixed:
            raise CliError(f"{command} needs --{name} or an axis over it")
    for key in ("m_cap", "trials", "seed"):
        if getattr(args, key, None) is not None:
            fixed[key] = getattr(args, key)

    points = []
    for scenario in _scenarios(args.scenario):
        for combo in itertools.product(*(vals for _, vals in axes)):
            pt = dict(fixed, scenario=scenario)
            pt.update(zip(names, combo))
            points.append(pt)
    return points


def run_sweep(command: str, points: list[dict], workers: int) -> list[list]:
    fn = ROWS[command]
    if workers > 1 and len(points) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(fn, points, chunksize=max(1, len(points) // (4 * workers))))
    return [fn(pt) for pt in points]


# -- commands ---------------------------------------------------------------


def cmd_bound(args) -> None:
    params = ScenarioParams(args.scenario, args.k, args.q, args.p1)
    m = args.m or 1
    if m == 1 and args.method in ("auto", "dense"):
        rep = helstrom_one_shot(params)
    else:
        rep = helstrom_m_shot(params, m, args.method)
    record = {
        "scenario": params.kind.value,
        "k": params.k,
        "q": params.q,
        "p1": params.p1,
        "m": m,
        "method": rep.method,
        "e_min": rep.e_min,
        "e_guess": rep.e_guess,
        "advantage": rep.advantage,
        "advantage_pct": rep.advantage_pct,
        "forbidden": rep.forbidden,
        "trace_norm": rep.trace_norm,
    }
    if args.format == "json":
        text = json.dumps({c: _json_value(v) for c, v in record.items()}, indent=2) + "\n"
    else:
        text = "".join(f"{c}: {format_value(v)}\n" for c, v in record.items())
        if m == 1:
            text += "spectrum: " + " ".join(format_value(v) for v in rep.spectrum) + "\n"
    _emit(text, args.output)


def cmd_table(args) -> None:
    points = build_points(args.command, args)
    rows = run_sweep(args.command, points, args.workers)
    _emit(render(COLUMNS[args.command], rows, args.format), args.output)


# -- parser -----------------------------------------------------------------


def _default_workers() -> int:
    raw = os.environ.get(WORKERS_ENV, "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def build_parser() -> tuple[argparse.ArgumentParser, dict]:
    parser = argparse.ArgumentParser(
        prog="twosource",
        description="Error bounds and protocol analysis for one-versus-two source discrimination.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON file of defaults keyed by flag name")
    common.add_argument("--output", "-o", default="-", help="output path, '-' for stdout")

    bound = sub.add_parser("bound", parents=[common], help="one Helstrom bound")
    bound.add_argument("--scenario", required=True)
    bound.add_argument("--k", type=float, required=True)
    bound.add_argument("--q", type=float, default=0.5)
    bound.add_argument("--p1", type=float, default=0.5)
    bound.add_argument("--m", type=int, default=1)
    bound.add_argument("--method", choices=["auto", "fast", "dense"], default="auto")
    bound.add_argument("--format", choices=["text", "json"], default="text")
    bound.set_defaults(func=cmd_bound)

    tables = {"bound": bound}
    helps = {
        "advantage": "advantage sweep over (k, p1) or (q, p1)",
        "minimal-m": "smallest shot count beating the direct guess",
        "chernoff": "Chernoff and protocol exponents",
        "sliver": "parity protocol probabilities and saturation",
        "simulate": "Monte Carlo runs of the parity protocol",
    }
    for name, help_text in helps.items():
        p = sub.add_parser(name, parents=[common], help=help_text)
        p.add_argument("--scenario", default="both" if name in ("sliver", "simulate") else None,
                       help="asymmetric, symmetric or both")
        p.add_argument("--axis", action="append", help="name:min:max:count, repeatable")
        p.add_argument("--format", choices=["csv", "json"], default="csv")
        p.add_argument("--workers", type=int, default=_default_workers())
        if name in ("advantage", "minimal-m", "chernoff"):
            p.add_argument("--k", type=float)
            p.add_argument("--q", type=float, default=0.5 if name == "chernoff" else None)
        if name in ("advantage", "minimal-m"):
            p.add_argument("--p1", type=float)
        if name == "advantage":
            p.add_argument("--m", type=int, default=1)
        if name == "minimal-m":
            p.add_argument("--m-cap", dest="m_cap", type=int, default=50)
        if name == "simulate":
            p.add_argument("--m", type=int, default=1)
            p.add_argument("--trials", type=int, default=1000)
            p.add_argument("--seed", type=int, default=0)
        p.set_defaults(func=cmd_table)
        tables[name] = p
    return parser, tables


def _apply_config(argv, parser, subparsers) -> None:
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("command", nargs="?")
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    if not known.config or known.command not in subparsers:
        return
    try:
        with open(known.config, encoding="utf-8") as fh:
            cfg = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise CliError(f"cannot read config {known.config}: {exc}") from None
    if not isinstance(cfg, dict):
        raise CliError("config file must hold a JSON object")
    target = subparsers[known.command]
    dests = {a.dest for a in target._actions}
    cfg = {key.replace("-", "_"): value for key, value in cfg.items()}
    unknown = set(cfg) - dests
    if unknown:
        raise CliError(f"unknown config keys: {', '.join(sorted(unknown))}")
    if "axis" in cfg:
        # kept aside: an append action would add flag axes to these instead of replacing them
        axis = cfg.pop("axis")
        cfg["config_axis"] = [axis] if isinstance(axis, str) else list(axis)
    for action in target._actions:
        if action.dest in cfg:
            # a config value satisfies a required flag
            action.required = False
    target.set_defaults(**cfg)


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser, subparsers = build_parser()
    try:
        _apply_config(argv, parser, subparsers)
        args = parser.parse_args(argv)
        if getattr(args, "scenario", None) is None:
            raise CliError("--scenario is required")
        args.func(args)
    except (CliError, ValueError) as exc:
        print(f"twosource {argv[0] if argv else ''}: error: {exc}".replace("  ", " "), file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
