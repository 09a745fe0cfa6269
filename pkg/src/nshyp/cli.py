"""Command-line pipeline: fixture, sanitize, sweep, test, metrics.

All outputs are plot-ready CSV/JSON written atomically; identical inputs
and seed produce byte-identical outputs.  Infinities are rendered as
"inf"/"-inf"; floats use round-trip precision.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import tempfile

import numpy as np

from .dataio import DataError, generate_fixture, load_csv, sanitize_table, write_csv
from .expr import ExprError
from .hypotest import (ConditionalOutputRanges, RangeError, brute_force_optimum,
                       consistent_test, test_report)
from .metrics import MetricsError, histogram, kl_divergence, mean_diff
from .nset import DiscreteSet, NSet
from .privacy import (PolicyError, QuadratureError, QuadratureParams, StripPolicy,
                      epsilon_guarantee, sweep_epsilon)
from .uvar import P0, P1, FiniteWorld, WorldError


class CliError(ValueError):
    pass


_ERRORS = (CliError, DataError, ExprError, MetricsError, PolicyError,
           QuadratureError, RangeError, WorldError, ValueError, OSError)


def _fmt(x: float) -> str:
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    if math.isnan(x):
        return "nan"
    return repr(float(x))


def _write_text(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _dump_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _load_json(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise CliError(f"{path}: invalid JSON: {exc}") from exc


def _parse_columns(spec: str) -> dict[str, int]:
    out: dict[str, int] = {}
    for item in spec.split(","):
        item = item.strip()
        if not item:
            continue
        name, sep, coord = item.rpartition(":")
        if not sep or not name:
            raise CliError(f"bad --columns entry {item!r}, expected NAME:COORD")
        try:
            out[name] = int(coord)
        except ValueError:
            raise CliError(f"bad coordinate in --columns entry {item!r}") from None
    if not out:
        raise CliError("--columns must name at least one column")
    return out


def _parse_rhos(args) -> list[float]:
    if args.rho and args.rho_range:
        raise CliError("use either --rho or --rho-range, not both")
    if args.rho:
        try:
            values = [float(tok) for tok in args.rho.split(",") if tok.strip()]
        except ValueError:
            raise CliError(f"bad --rho list {args.rho!r}") from None
        if not values:
            raise CliError("--rho list is empty")
    elif args.rho_range:
        parts = args.rho_range.split(":")
        if len(parts) != 4:
            raise CliError("--rho-range must be LO:HI:STEPS:{log|lin}")
        try:
            lo, hi, steps = float(parts[0]), float(parts[1]), int(parts[2])
        except ValueError:
            raise CliError(f"bad --rho-range {args.rho_range!r}") from None
        mode = parts[3]
        if steps < 1:
            raise CliError("--rho-range needs at least one step")
        if mode == "log":
            if lo <= 0:
                raise CliError("log-spaced --rho-range needs a positive lower bound")
            values = list(np.logspace(math.log10(lo), math.log10(hi), steps))
        elif mode == "lin":
            values = list(np.linspace(lo, hi, steps))
        else:
            raise CliError(f"--rho-range mode must be 'log' or 'lin', got {mode!r}")
    else:
        raise CliError("one of --rho or --rho-range is required")
    if any(not (math.isfinite(v) and v > 0) for v in values):
        raise CliError("rho values must be positive finite numbers")
    if any(b < a for a, b in zip(values, values[1:])):
        raise CliError("rho values must be sorted ascending")
    return [float(v) for v in values]


def _policy_from_file(path: str, require_rho: bool = True) -> StripPolicy:
    return StripPolicy.from_config(_load_json(path), require_rho=require_rho)


def _quadrature(args) -> QuadratureParams:
    return QuadratureParams(seed=getattr(args, "seed", 0))


# -- subcommands -------------------------------------------------------------


def cmd_fixture(args) -> int:
    table = generate_fixture(seed=args.seed, n=args.rows,
                             missing_rate=args.missing_rate)
    write_csv(table, args.output)
    return 0


def cmd_sanitize(args) -> int:
    policy = _policy_from_file(args.config)
    table = load_csv(args.input, _parse_columns(args.columns))
    sanitized, report = sanitize_table(table, policy)
    report = report.with_epsilon(
        epsilon_guarantee(policy, _quadrature(args)).epsilon)
    write_csv(sanitized, args.output)
    _write_text(args.output + ".report.json", _dump_json(report.to_json_dict()))
    return 0


def cmd_sweep(args) -> int:
    policy = _policy_from_file(args.config, require_rho=False)
    rhos = _parse_rhos(args)
    curve = sweep_epsilon(policy, rhos, _quadrature(args))
    lines = ["rho,epsilon,strip_measure,err_estimate,epsilon_times_rho"]
    for g in curve:
        lines.append(",".join([_fmt(g.rho), _fmt(g.epsilon), _fmt(g.strip_measure),
                               _fmt(g.quadrature_error_estimate),
                               _fmt(g.epsilon * g.rho)]))
    _write_text(args.output, "\n".join(lines) + "\n")
    return 0


def _set_from_json(obj, what: str):
    if isinstance(obj, dict) and "elements" in obj:
        return DiscreteSet.from_json_dict(obj)
    if isinstance(obj, dict) and "parts" in obj:
        return NSet.from_json_dict(obj)
    if isinstance(obj, list):
        return NSet.from_intervals([tuple(map(float, iv)) for iv in obj])
    raise CliError(
        f"{what} must be an NSet object, a DiscreteSet object, or a list of "
        f"[lo, hi] intervals")


def cmd_test(args) -> int:
    spec = _load_json(args.input)
    if "world" in spec:
        world = FiniteWorld.from_json_dict(spec["world"])
        from .hypotest import ranges_from_world
        ranges = ranges_from_world(world)
    elif "p0" in spec and "p1" in spec:
        world = None
        ranges = ConditionalOutputRanges(_set_from_json(spec["p0"], "'p0'"),
                                         _set_from_json(spec["p1"], "'p1'"))
    else:
        raise CliError("test spec needs either 'world' or both 'p0' and 'p1'")
    tie = spec.get("tie_rule", P0)
    if tie not in (P0, P1):
        raise CliError(f"tie_rule must be 'p0' or 'p1', got {tie!r}")
    test = consistent_test(ranges, tie_rule=tie)
    out = test_report(test, ranges).to_json_dict()
    if world is not None and len(set(world.y)) <= args.brute_force_cap:
        best = brute_force_optimum(world, cap=args.brute_force_cap)
        from .hypotest import correct_set
        attained = correct_set(test, ranges).cardinality
        out["brute_force"] = {
            "best_cardinality": best.cardinality,
            "best_performance": _render_float(best.performance),
            "consistent_cardinality": attained,
            "consistent_matches_optimum": attained == best.cardinality,
        }
    sys.stdout.write(_dump_json(out))
    return 0


def _render_float(v: float):
    if math.isinf(v) or math.isnan(v):
        return _fmt(v)
    return v


def cmd_metrics(args) -> int:
    policy = _policy_from_file(args.config, require_rho=False)
    rhos = _parse_rhos(args)
    table = load_csv(args.input, _parse_columns(args.columns))
    if args.bins < 1:
        raise CliError("--bins must be >= 1")
    if args.alpha <= 0:
        raise CliError("--alpha must be positive")
    os.makedirs(args.output, exist_ok=True)

    i = policy.protected_index - 1
    _, before_pts = table.complete_points()
    hist_before = histogram(before_pts, policy.domain_box, args.bins)
    _write_hist(os.path.join(args.output, "hist_original.csv"), hist_before)

    rows = ["rho,mean_diff,kl"]
    points_meta = []
    for k, rho in enumerate(rhos, start=1):
        sanitized, _ = sanitize_table(table, policy.with_rho(rho))
        _, after_pts = sanitized.complete_points()
        hist_after = histogram(after_pts, policy.domain_box, args.bins)
        md = mean_diff(before_pts[:, i], after_pts[:, i])
        kl = kl_divergence(hist_before, hist_after, args.alpha)
        hist_name = f"hist_{k:02d}.csv"
        _write_hist(os.path.join(args.output, hist_name), hist_after)
        rows.append(f"{_fmt(rho)},{_fmt(md)},{_fmt(kl)}")
        points_meta.append({"rho": rho, "mean_diff": md, "kl": kl,
                            "bins": [args.bins, args.bins], "alpha": args.alpha,
                            "histogram_csv": hist_name})
    _write_text(os.path.join(args.output, "utility.csv"), "\n".join(rows) + "\n")
    _write_text(os.path.join(args.output, "metrics.json"),
                _dump_json({"points": points_meta}))
    return 0


def _write_hist(path: str, hist) -> None:
    lines = ["xbin,ybin,count"]
    nx, ny = hist.counts.shape
    for ix in range(nx):
        for iy in range(ny):
            lines.append(f"{ix},{iy},{int(hist.counts[ix, iy])}")
    _write_text(path, "\n".join(lines) + "\n")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nshyp",
        description="Set-valued hypothesis testing and strip-policy sanitization")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fixture", help="write a deterministic synthetic dataset")
    p.add_argument("--output", required=True)
    p.add_argument("--rows", type=int, default=1010)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--missing-rate", type=float, default=0.005)
    p.set_defaults(func=cmd_fixture)

    p = sub.add_parser("sanitize", help="apply a strip policy to a CSV table")
    p.add_argument("--config", required=True, help="policy JSON")
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--columns", default="Weight:1,Height:2",
                   help="NAME:COORD pairs, comma separated")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_sanitize)

    p = sub.add_parser("sweep", help="epsilon versus rho curve")
    p.add_argument("--config", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--rho", help="comma-separated ascending list")
    p.add_argument("--rho-range", help="LO:HI:STEPS:{log|lin}")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("test", help="evaluate the consistent test for a range spec")
    p.add_argument("--input", required=True, help="JSON range pair or finite world")
    p.add_argument("--brute-force-cap", type=int, default=16)
    p.set_defaults(func=cmd_test)

    p = sub.add_parser("metrics", help="utility curve and histograms")
    p.add_argument("--config", required=True)
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True, help="output directory")
    p.add_argument("--columns", default="Weight:1,Height:2")
    p.add_argument("--rho", help="comma-separated ascending list")
    p.add_argument("--rho-range", help="LO:HI:STEPS:{log|lin}")
    p.add_argument("--bins", type=int, default=50)
    p.add_argument("--alpha", type=float, default=1e-9)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_metrics)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
