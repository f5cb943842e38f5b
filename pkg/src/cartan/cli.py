"""Command line entry point.

    cartan verify   [--level N] [--kappa K] [--seed S] [--out report.json]
    cartan curve    (--staircase LAM [--axis x4|x5] | --modification SPEC.json | --level N)
                    [--format json|csv] [--grid M] [--backend exact|float] --out FILE
    cartan eval     --level N --t T [--kappa K] [--backend exact|float]
    cartan distance --p X --q Y [--pieces P] [--restarts R] [--iterations I] [--seed S]
    cartan overlap  (--harness badintersect [--variant alpha+|beta+] | --harness lusin --level N)
                    [--family FAMILY.json] [--tau T] [--grid M] [--seed S] [--out report.csv]

Exit status: 0 success, 1 verification failure, 2 usage error. Relative
``--out`` paths resolve against ``$CARTAN_OUTPUT_DIR`` when it is set.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
from fractions import Fraction
from pathlib import Path

OUTPUT_DIR_ENV = "CARTAN_OUTPUT_DIR"


class UsageError(Exception):
    pass


def _resolve(path: str) -> Path:
    p = Path(path)
    base = os.environ.get(OUTPUT_DIR_ENV)
    if base and not p.is_absolute():
        p = Path(base) / p
    return p


def write_atomic(path: str, text: str) -> Path:
    """Write ``text`` to ``path`` via a temporary file and a rename."""
    target = _resolve(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=target.parent, prefix=f".{target.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, target)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return target


def _emit(text: str, out: str | None) -> None:
    if out:
        write_atomic(out, text)
    else:
        sys.stdout.write(text)


def _rational(text: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"not a rational number: {text!r}") from exc


def _point(text: str):
    from .algebra import parse_point

    try:
        return parse_point(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(str(exc)) from exc


# --- subcommands ---------------------------------------------------------------------

def cmd_verify(args) -> int:
    from .verify import run_all

    results = run_all(args.level, args.kappa, args.seed)
    for r in results:
        print(f"{'PASS' if r.passed else 'FAIL'}  {r.name:<13} {r.detail}  ({r.seconds:.2f}s)")
    if args.out:
        report = {"level": args.level, "kappa": args.kappa, "seed": args.seed,
                  "suites": [r.to_json() for r in results]}
        write_atomic(args.out, json.dumps(report, indent=2) + "\n")
    return 0 if all(r.passed for r in results) else 1


def _format_for(args) -> str:
    if args.format:
        return args.format
    if args.out and args.out.lower().endswith(".csv"):
        return "csv"
    return "json"


def cmd_curve(args) -> int:
    from .curves import SegmentCurve, samples_to_csv, to_descriptor
    from .limitcurve import materialize, sample_csv, sample_gamma
    from .modification import ModificationSpec, build
    from .staircase import staircase

    fmt = _format_for(args)
    chosen = [x is not None for x in (args.staircase, args.modification, args.level)]
    if sum(chosen) != 1:
        raise UsageError("choose exactly one of --staircase, --modification, --level")
    if args.staircase is not None:
        curve: SegmentCurve | None = staircase(_rational(args.staircase), args.axis)
    elif args.modification is not None:
        try:
            data = json.loads(Path(args.modification).read_text())
            curve = build(ModificationSpec.from_json(data))
        except (OSError, KeyError, ValueError) as exc:
            raise UsageError(f"bad modification spec: {exc}") from exc
    else:
        if args.level < 1:
            raise UsageError("--level must be >= 1")
        curve = materialize(args.level, args.kappa) if args.level <= 2 else None
        if fmt == "csv":
            if args.backend == "float":
                ts = [Fraction(k, args.grid - 1) for k in range(args.grid)]
                pts = sample_gamma(args.level, [float(t) for t in ts] if args.level <= 2 else ts, args.kappa)
                _emit(_float_csv(ts, pts), args.out)
            else:
                _emit(sample_csv(args.level, args.grid, args.kappa), args.out)
            return 0
        if curve is None:
            raise UsageError("levels above 2 are lazy only; export them as CSV samples")

    if fmt == "json":
        _emit(json.dumps(to_descriptor(curve), indent=2) + "\n", args.out)
    else:
        if args.grid < 2:
            raise UsageError("--grid must be at least 2")
        ts = [curve.t0 + (curve.t1 - curve.t0) * Fraction(k, args.grid - 1) for k in range(args.grid)]
        if args.backend == "float":
            _emit(_float_csv(ts, curve.sample([float(t) for t in ts])), args.out)
        else:
            _emit(samples_to_csv(ts, [curve(t) for t in ts]), args.out)
    return 0


def _float_csv(ts, pts) -> str:
    lines = ["t,x1,x2,x3,x4,x5"]
    for t, p in zip(ts, pts):
        lines.append(",".join(repr(float(v)) for v in (t, *p)))
    return "\n".join(lines) + "\n"


def cmd_eval(args) -> int:
    from .algebra import format_rational
    from .limitcurve import eval_gamma

    if args.level < 1:
        raise UsageError("--level must be >= 1")
    t = _rational(args.t)
    if not 0 <= t <= 1:
        raise UsageError("--t must lie in [0, 1]")
    p = eval_gamma(args.level, t, args.kappa)
    if args.backend == "float":
        text = "(" + ",".join(repr(float(c)) for c in p) + ")"
    else:
        text = "(" + ",".join(format_rational(c) for c in p) + ")"
    _emit(text + "\n", args.out)
    return 0


def cmd_distance(args) -> int:
    from .ccmetric import DistanceBudget, cc_upper

    p, q = _point(args.p), _point(args.q)
    try:
        budget = DistanceBudget(pieces=args.pieces, iterations=args.iterations,
                                restarts=args.restarts, seed=args.seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    result = cc_upper(p, q, budget)
    _emit(json.dumps(result.to_json(), indent=2) + "\n", args.out)
    return 0 if result.ok else 1


def cmd_overlap(args) -> int:
    from .modification import ModificationSpec, Variant
    from .overlaplab import C1HFamilySpec, badintersect_harness, lusin_experiment

    try:
        if args.family:
            family = C1HFamilySpec.from_json(json.loads(Path(args.family).read_text()))
        else:
            axis = 2 if args.variant.startswith("beta") else 1
            family = C1HFamilySpec(count=args.count, seed=args.seed, floor_axis=axis,
                                   include_gamma1=args.harness == "lusin")
    except (OSError, ValueError, TypeError) as exc:
        raise UsageError(f"bad family spec: {exc}") from exc
    if args.harness == "badintersect":
        spec = ModificationSpec(0, 1, 1, 5, Variant(args.variant))
        report = badintersect_harness(spec, family, args.tau, args.grid)
        _emit(report.to_csv(), args.out)
        worst = report.worst
        print(f"max coincidence {report.max_coincidence:.6f} (limit {report.limit}); "
              f"worst curve {worst.ident if worst else '-'}; falsifications {len(report.falsifications)}",
              file=sys.stderr)
        return 0 if report.passed else 1
    if args.level is None or args.level < 1:
        raise UsageError("--harness lusin needs --level N >= 1")
    table = lusin_experiment(list(range(1, args.level + 1)), family, args.tau, args.grid, args.kappa)
    _emit(table.to_csv(), args.out)
    return 0 if table.non_increasing else 1


# --- parser ----------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cartan", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--kappa", type=int, default=1)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--backend", choices=("exact", "float"), default="exact")
        p.add_argument("--out")

    p = sub.add_parser("verify", help="run the invariant suites")
    p.add_argument("--level", type=int, default=2)
    common(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("curve", help="build and export a curve")
    p.add_argument("--staircase")
    p.add_argument("--axis", choices=("x4", "x5"), default="x4")
    p.add_argument("--modification", help="ModificationSpec JSON file")
    p.add_argument("--level", type=int)
    p.add_argument("--format", choices=("json", "csv"))
    p.add_argument("--grid", type=int, default=101)
    common(p)
    p.set_defaults(func=cmd_curve)

    p = sub.add_parser("eval", help="evaluate gamma_n at a rational time")
    p.add_argument("--level", type=int, required=True)
    p.add_argument("--t", required=True)
    common(p)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("distance", help="bounds on the CC distance of two points")
    p.add_argument("--p", required=True)
    p.add_argument("--q", required=True)
    p.add_argument("--pieces", type=int, default=16)
    p.add_argument("--restarts", type=int, default=16)
    p.add_argument("--iterations", type=int, default=200)
    common(p)
    p.set_defaults(func=cmd_distance)

    p = sub.add_parser("overlap", help="coincidence harnesses")
    p.add_argument("--harness", choices=("badintersect", "lusin"), default="badintersect")
    p.add_argument("--variant", choices=("alpha+", "beta+"), default="alpha+")
    p.add_argument("--family", help="C1HFamilySpec JSON file")
    p.add_argument("--count", type=int, default=100)
    p.add_argument("--level", type=int)
    p.add_argument("--tau", type=float, default=1e-8)
    p.add_argument("--grid", type=int, default=100_000)
    common(p)
    p.set_defaults(func=cmd_overlap)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "kappa", 1) < 1:
        parser.error("--kappa must be >= 1")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"cartan: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
