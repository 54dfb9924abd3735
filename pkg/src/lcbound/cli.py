"""Command-line entry point: ``python -m lcbound <subcommand> ...``.

Exit codes: 0 success, 1 failure (a check failed or an internal error),
2 usage error, 3 the conjecture explorer found a counterexample candidate.
Any output written to a file gets a ``<file>.manifest.json`` next to it;
``replay`` reruns from that manifest.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import bounds, certify, conjecture, distributions, report
from .poly_exact import as_fraction

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_COUNTEREXAMPLE = 0, 1, 2, 3
OUT_DIR_ENV = "LCBOUND_OUT_DIR"


class UsageError(Exception):
    pass


def _rational(text: str) -> Fraction:
    try:
        return as_fraction(text.strip())
    except (ValueError, ZeroDivisionError, TypeError) as exc:
        raise UsageError(f"not an exact rational: {text!r}") from exc


def parse_grid(spec: str) -> list[Fraction]:
    """``start:stop:step``, both ends inclusive, evaluated exactly; a bare value is one point."""
    parts = spec.split(":")
    if len(parts) == 1:
        return [_rational(parts[0])]
    if len(parts) != 3:
        raise UsageError(f"grid must look like start:stop:step, got {spec!r}")
    start, stop, step = (_rational(p) for p in parts)
    if step <= 0:
        raise UsageError("grid step must be > 0")
    if start > stop:
        return []
    count = int((stop - start) // step) + 1
    return [start + i * step for i in range(count)]


def _positive_points(points: list[Fraction]) -> list[Fraction]:
    bad = [p for p in points if p <= 0]
    if bad:
        raise UsageError(f"grid values must be > 0, got {report.frac_str(bad[0])}")
    return points


def _both(x) -> str:
    return f"{report.frac_str(x)} ({report.decimal_str(x)})"


# ---------------------------------------------------------------------------
# output
# ---------------------------------------------------------------------------


def _target(args, default_name: str) -> Path | None:
    if args.out:
        return Path(args.out)
    env = os.environ.get(OUT_DIR_ENV)
    if env:
        return Path(env) / default_name
    return None


def _emit(args, text: str, default_name: str) -> None:
    path = _target(args, default_name)
    if path is None:
        sys.stdout.write(text)
        return
    report.write_text(path, text)
    flags = {k: v for k, v in vars(args).items() if k not in ("func", "out", "replay_argv")}
    report.write_manifest(path, args.command, args.replay_argv, flags, flags.get("seed"))
    print(f"wrote {path}")


def _strip_out(argv: list[str]) -> list[str]:
    out, skip = [], False
    for tok in argv:
        if skip:
            skip = False
            continue
        if tok == "--out":
            skip = True
            continue
        if tok.startswith("--out="):
            continue
        out.append(tok)
    return out


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def cmd_certify(args) -> int:
    names = [s for item in args.select for s in item.split(",") if s]
    if not names or "all" in names:
        select = None
    else:
        unknown = sorted(set(names) - set(certify.ORDER))
        if unknown:
            raise UsageError(f"unknown certificate(s) {unknown}; choose from all, {', '.join(certify.ORDER)}")
        select = names
    certs = certify.run_all(select, c=_rational(args.c))
    ok = all(c.passed for c in certs)
    if args.format == "json":
        text = report.dumps({
            "c": report.frac_str(_rational(args.c)),
            "passed": ok,
            "certificates": [c.to_dict(timings=args.timings) for c in certs],
        })
    else:
        lines = []
        for cert in certs:
            head = f"{cert.name}: {cert.status} ({len(cert.steps)} steps)"
            if args.timings:
                head += f" {cert.elapsed:.3f}s"
            lines.append(head)
            for s in cert.steps:
                if args.verbose or not s.passed:
                    mark = "ok" if s.passed else "FAIL"
                    lines.append(f"  [{mark}] {s.description}: {s.claim}")
        lines.append(f"{sum(c.passed for c in certs)}/{len(certs)} certificates passed")
        text = "\n".join(lines) + "\n"
    _emit(args, text, f"certify.{args.format}")
    return EXIT_OK if ok else EXIT_FAIL


def cmd_bounds(args) -> int:
    delta = _rational(args.delta)
    u = _rational(args.u) if args.u is not None else None
    b = _rational(args.b) if args.b is not None else None
    if delta <= 0:
        raise UsageError("--delta must be > 0")
    if u is not None and not 0 < u < delta:
        raise UsageError("--u must satisfy 0 < u < delta")
    if b is not None and b < 0:
        raise UsageError("--b must be >= 0")
    rep = bounds.bound_report(delta, u=u, b=b)
    if args.format == "json":
        payload = {
            "delta": rep.delta,
            "u": u,
            "b": b,
            "values": {k: {"exact": v, "decimal": report.decimal_str(v)} for k, v in rep.values.items()},
            "branches": rep.branches,
            "final": rep.final,
        }
        text = report.dumps(payload)
    else:
        lines = [f"delta = {_both(delta)}"]
        if u is not None:
            lines.append(f"u = {_both(u)}")
        if b is not None:
            lines.append(f"b = {_both(b)}")
        lines += [f"{k} = {_both(v)}" for k, v in rep.values.items()]
        lines += [f"branch[{k}] = {v}" for k, v in rep.branches.items()]
        text = "\n".join(lines) + "\n"
    _emit(args, text, f"bounds.{args.format}")
    return EXIT_OK


def cmd_dist(args) -> int:
    if args.family == "all":
        tags = list(distributions.FAMILIES)
    elif args.family in distributions.FAMILIES:
        tags = [args.family]
    else:
        raise UsageError(f"unknown family {args.family!r}; choose from all, {', '.join(distributions.FAMILIES)}")
    if args.grid:
        deltas = [float(x) for x in _positive_points(parse_grid(args.grid))]
    else:
        deltas = list(distributions.DEFAULT_DELTAS)
    results, observations = distributions.audit_library(deltas, tags)
    ok = all(r.passed for r in results)
    if args.format == "json":
        text = report.dumps({
            "passed": ok,
            "results": [
                {"family": r.tag, "passed": r.passed, "violations": r.violations,
                 "scalars": r.scalars, "rows": r.rows}
                for r in results
            ],
            "conjecture_observations": [
                dict(o.__dict__, counterexample=o.counterexample) for o in observations
            ],
        })
    else:
        text = report.csv_text(distributions.CSV_HEADER, (row for r in results for row in r.csv_rows()))
    _emit(args, text, f"dist.{args.format}")
    for r in results:
        for v in r.violations:
            print(f"{r.tag}: {v}", file=sys.stderr)
    return EXIT_OK if ok else EXIT_FAIL


def _support(values: list[float]) -> tuple[float, float]:
    if len(values) == 1:
        return values[0], values[0]
    if len(values) == 2:
        return values[0], values[1]
    raise UsageError("--support takes A or A B")


def _load_result(path: str, delta_flag: float | None) -> conjecture.ExplorerResult:
    """Rebuild an ExplorerResult from a saved density (knots + phi) and re-evaluate it."""
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    dens_data = data.get("density", data)
    dens = conjecture.ConcaveLogDensity(np.array(dens_data["knots"], dtype=float),
                                        np.array(dens_data["phi"], dtype=float))
    if not dens.is_concave(1e-9 * max(1.0, float(np.abs(dens.phi).max()))):
        raise UsageError(f"{path}: log-density is not concave")
    delta = delta_flag if delta_flag is not None else float(data.get("config", data).get("delta", 1.0))
    a, b = -float(dens.knots[0]), float(dens.knots[-1])
    cfg = conjecture.ExplorerConfig(delta=delta, n=max(dens.n, 8), a=max(a, 6.0), b=max(b, 6.0), restarts=1)
    value = conjecture.objective(dens, delta)
    mu, sigma = conjecture.standardization(dens)
    return conjecture.ExplorerResult(cfg, value, dens, mu, sigma, 0, [],
                                     conjecture.floor_value(delta), conjecture.conjectured_value(delta))


def cmd_conjecture(args) -> int:
    if args.load:
        res = _load_result(args.load, args.delta)
    else:
        a, b = _support(args.support)
        try:
            cfg = conjecture.ExplorerConfig(
                delta=1.0 if args.delta is None else args.delta, n=args.knots, a=a, b=b,
                restarts=args.restarts, seed=args.seed, maxiter=args.maxiter)
        except ValueError as exc:
            raise UsageError(str(exc)) from exc
        res = conjecture.minimize(cfg)
    cmp = conjecture.compare_to_conjecture(res)
    if args.format == "csv":
        text = report.csv_text(conjecture.CSV_HEADER, [conjecture.csv_row(res)])
    else:
        text = report.dumps({"result": res.to_dict(), "comparison": cmp})
    _emit(args, text, f"conjecture.{args.format}")
    print(f"delta={res.config.delta!r} best={res.best:.12g} conjectured={res.conjectured:.12g} "
          f"gap={cmp.gap:.6g} -> {cmp.classification}", file=sys.stderr)
    return EXIT_COUNTEREXAMPLE if cmp.counterexample else EXIT_OK


CURVE_HEADER = ("delta", "p", "p1", "conjectured", "p_exact", "p1_exact")


def cmd_curve(args) -> int:
    points = _positive_points(parse_grid(args.range))
    rows = []
    for d in points:
        p, p1 = bounds.p_bound(d), bounds.p1(d)
        rows.append([report.decimal_str(d), report.decimal_str(p), report.decimal_str(p1),
                     f"{conjecture.conjectured_value(float(d)):.12g}",
                     report.frac_str(p), report.frac_str(p1)])
    _emit(args, report.csv_text(CURVE_HEADER, rows), "curve.csv")
    return EXIT_OK


def cmd_replay(args) -> int:
    manifest_file = Path(args.manifest)
    try:
        m = report.read_manifest(manifest_file)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read manifest {manifest_file}: {exc}") from exc
    target = Path(args.out) if args.out else manifest_file.parent / m["outputs"][0]
    return main([*m["argv"], "--out", str(target)])


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lcbound", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_text):
        p = sub.add_parser(name, help=help_text)
        p.set_defaults(func=func)
        p.add_argument("--out", help=f"output file (default: stdout, or ${OUT_DIR_ENV}/<name>)")
        return p

    p = add("certify", cmd_certify, "run the exact polynomial certificates")
    p.add_argument("--select", action="append", default=[],
                   help="all or comma-separated names from: " + ", ".join(certify.ORDER))
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--timings", action="store_true", help="include wall-clock times (not reproducible)")
    p.add_argument("--verbose", "-v", action="store_true", help="list passing steps too")
    p.add_argument("--c", default="419/100", help="the constant c (default 419/100)")

    p = add("bounds", cmd_bounds, "evaluate the closed-form bounds exactly")
    p.add_argument("--delta", required=True)
    p.add_argument("--u")
    p.add_argument("--b")
    p.add_argument("--format", choices=("text", "json"), default="text")

    p = add("dist", cmd_dist, "audit the log-concave distribution library")
    p.add_argument("--family", default="all")
    p.add_argument("--grid", help="delta grid start:stop:step (default 0.01,0.1,0.5,1,2,4,8)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")

    p = add("conjecture", cmd_conjecture, "search for the minimizing concave log-density")
    p.add_argument("--delta", type=float)
    p.add_argument("--knots", type=int, default=64)
    p.add_argument("--support", type=float, nargs="+", default=[10.0], metavar="A [B]")
    p.add_argument("--restarts", type=int, default=8)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--maxiter", type=int, default=400)
    p.add_argument("--load", help="evaluate a saved density (JSON with knots and phi) instead of searching")
    p.add_argument("--format", choices=("json", "csv"), default="json")

    p = add("curve", cmd_curve, "tabulate p, p1 and the conjectured value over a delta range")
    p.add_argument("--range", default="1/100:10:1/100", help="start:stop:step, exact rationals allowed")

    p = sub.add_parser("replay", help="rerun a command from its manifest")
    p.set_defaults(func=cmd_replay)
    p.add_argument("manifest")
    p.add_argument("--out")
    return parser


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    args.replay_argv = _strip_out(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"lcbound {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except conjecture.ExplorerError as exc:
        print(f"lcbound {args.command}: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except Exception as exc:  # noqa: BLE001
        print(f"lcbound {args.command}: internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
