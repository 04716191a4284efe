"""uncrel command-line interface.

Usage:
    uncrel check problem.json [--relations RS_PAIR,HR_PAIR] [--format text]
    uncrel region --r12 0.5 --step 0.005 --out region.csv
    uncrel survey --dim 3 --observables 3 --samples 10000 --seed 7 --out survey.json
    uncrel intelligent pair.json --z-re 0 --z-im 1

Exit status: 0 when everything holds, 2 when a relation is violated,
1 on any input error.
"""

from __future__ import annotations

import argparse
import os
import sys
from fractions import Fraction
from pathlib import Path

from . import __version__
from .correlations import feasibility_region, feasible_fraction, region_csv
from .ensembles import EnsembleSpec, ObservableKind, survey
from .errors import ParseError, SoundnessViolation, UncrelError
from .intelligent import scan_z
from .io import build_report, dump_json, load_problem
from .relations import RelationId
from .tolerances import Tolerances

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_VIOLATION = 2
REGION_MAX_STEP = Fraction(1, 10)


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad usage; 2 is reserved for violations here.
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _positive(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")
    if not value > 0:
        raise argparse.ArgumentTypeError(f"must be positive: {text!r}")
    return value


def _base_tol(args) -> Tolerances:
    overrides = {}
    if getattr(args, "tol", None) is not None:
        overrides["rel"] = args.tol
    if getattr(args, "eps_herm", None) is not None:
        overrides["herm"] = args.eps_herm
    if getattr(args, "eps_intel", None) is not None:
        overrides["intel"] = args.eps_intel
    return Tolerances().with_overrides(**overrides) if overrides else Tolerances()


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _parse_relations(text: str) -> list[RelationId] | None:
    if text.strip().lower() == "all":
        return None
    ids = []
    for item in text.split(","):
        item = item.strip().upper()
        try:
            ids.append(RelationId(item))
        except ValueError:
            raise ParseError("--relations", f"unknown relation {item!r}; known: {', '.join(r.value for r in RelationId)}")
    return ids


def _text_report(report: dict) -> str:
    lines = [f"uncrel {report['version']}  input {report['input_digest']}"]
    for m in report["moments"]:
        lines.append(f"  {m['name']:<12} mean {m['mean']:+.6g}  stddev {m['stddev']:.6g}")
    lines.append("")
    for v in report["verdicts"]:
        flag = "ok  " if v["holds"] else "FAIL"
        idx = ",".join(str(i) for i in v["indices"])
        note = f"  ({v['note']})" if v["note"] else ""
        lines.append(f"{flag} {v['relation']:<16} [{idx}]  lhs {v['lhs']:.10g}  rhs {v['rhs']:.10g}  slack {v['slack']:.3g}{note}")
    for s in report["skipped"]:
        lines.append(f"skip {s['relation']:<16} [{','.join(map(str, s['indices']))}]  {s['reason']}")
    cm = report["correlation_matrix"]
    if cm is not None:
        lines.append(f"\ncorrelation determinant {cm['determinant']:.10g}")
    lines.append("all relations hold" if report["all_hold"] else "VIOLATIONS FOUND")
    return "\n".join(lines) + "\n"


def cmd_check(args) -> int:
    problem = load_problem(args.input, _base_tol(args))
    relations = _parse_relations(args.relations)
    try:
        report = build_report(problem.observables, problem.state, problem.tol, relations)
    except SoundnessViolation as exc:
        print(f"soundness violation: {exc}", file=sys.stderr)
        return EXIT_VIOLATION
    _emit(dump_json(report) if args.format == "json" else _text_report(report), args.out)
    return EXIT_OK if report["all_hold"] else EXIT_VIOLATION


def cmd_region(args) -> int:
    region = feasibility_region(args.r12, args.step, cells=args.cells, max_step=REGION_MAX_STEP)
    _emit(region_csv(region), args.out)
    print(f"{len(region)} points, feasible fraction {feasible_fraction(region):.6f}", file=sys.stderr)
    return EXIT_OK


def _default_seed() -> int:
    raw = os.environ.get("UNCREL_SEED")
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise ParseError("UNCREL_SEED", f"not an integer: {raw!r}")


def cmd_survey(args) -> int:
    seed = args.seed if args.seed is not None else _default_seed()
    try:
        spec = EnsembleSpec(
            dim=args.dim,
            n_observables=args.observables,
            n_samples=args.samples,
            seed=seed,
            observable_kind=ObservableKind(args.kind),
            tol=_base_tol(args),
        )
    except ValueError as exc:
        raise ParseError("", str(exc))
    stats = survey(spec, workers=args.workers)
    _emit(dump_json(stats.to_dict()), args.out)
    n_bad = len(stats.violations)
    if n_bad:
        print(f"{n_bad} violations", file=sys.stderr)
    return EXIT_VIOLATION if n_bad else EXIT_OK


def _axis(spec: str, label: str) -> list[float]:
    parts = spec.split(":")
    if len(parts) != 3:
        raise ParseError("--z-grid", f"{label} axis must be start:stop:step, got {spec!r}")
    try:
        start, stop, step = (Fraction(p.strip()) for p in parts)
    except (ValueError, ZeroDivisionError):
        raise ParseError("--z-grid", f"{label} axis has a non-numeric bound: {spec!r}")
    if step <= 0 or stop < start:
        raise ParseError("--z-grid", f"{label} axis needs step > 0 and stop >= start")
    count = int((stop - start) / step) + 1
    return [float(start + k * step) for k in range(count)]


def parse_z_grid(text: str) -> list[complex]:
    """``re=a:b:s,im=c:d:t`` with inclusive bounds; exact decimal stepping."""
    axes = {}
    for item in text.split(","):
        key, sep, value = item.partition("=")
        key = key.strip().lower()
        if not sep or key not in ("re", "im"):
            raise ParseError("--z-grid", f"expected re=start:stop:step,im=start:stop:step, got {text!r}")
        axes[key] = _axis(value, key)
    re_axis = axes.get("re", [0.0])
    im_axis = axes.get("im", [0.0])
    return [complex(x, y) for x in re_axis for y in im_axis]


def cmd_intelligent(args) -> int:
    problem = load_problem(args.input, _base_tol(args))
    if len(problem.observables) != 2:
        raise ParseError("observables", f"intelligent needs exactly 2 observables, got {len(problem.observables)}")
    if args.z_grid is not None:
        grid = parse_z_grid(args.z_grid)
    else:
        grid = [complex(args.z_re, args.z_im)]
    a, b = problem.observables
    results = scan_z(a, b, grid, problem.tol)
    payload = {
        "tool": "uncrel",
        "version": __version__,
        "observables": [a.name, b.name],
        "z_points": len(grid),
        "results": [r.to_dict() for r in results],
    }
    _emit(dump_json(payload), args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="uncrel",
        description="Check uncertainty relations, correlation constraints and intelligent states.",
        epilog="Exit status: 0 all hold, 2 violation found, 1 input error.",
    )
    parser.add_argument("--version", action="version", version=f"uncrel {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def tol_flags(p, herm: bool = True):
        p.add_argument("--tol", type=_positive, help="relative verdict tolerance eps_rel (default 1e-9)")
        if herm:
            p.add_argument("--eps-herm", type=_positive, help="Hermiticity gate tolerance (default 1e-10)")
        p.add_argument("--eps-intel", type=_positive, help="r = 1 tolerance for intelligent states (default 1e-6)")

    p = sub.add_parser("check", help="evaluate the relation catalog on a problem file")
    p.add_argument("input", help="problem JSON: {dim, observables: [{name, matrix}], state, tol?}")
    p.add_argument("--relations", default="all", help="'all' or comma-separated relation ids")
    p.add_argument("--format", choices=["json", "text"], default="json")
    p.add_argument("--out", help="write the report here instead of stdout")
    tol_flags(p)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("region", help="write the (r13, r23) feasibility grid for fixed r12 as CSV")
    p.add_argument("--r12", required=True, help="fixed coefficient in [0, 1], read exactly")
    p.add_argument("--step", required=True, help="grid step in (0, 0.1], read exactly")
    p.add_argument("--cells", action="store_true", help="sample cell centres instead of lattice points")
    p.add_argument("--out", help="CSV path (default stdout)")
    p.set_defaults(func=cmd_region)

    p = sub.add_parser("survey", help="Monte-Carlo soundness survey over random instances")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--observables", type=int, default=3)
    p.add_argument("--samples", type=int, default=10000)
    p.add_argument("--seed", type=int, help="64-bit seed (default $UNCREL_SEED, else 0)")
    p.add_argument("--kind", choices=[k.value for k in ObservableKind if k is not ObservableKind.USER_SUPPLIED], default="gaussian_hermitian")
    p.add_argument("--workers", type=int, default=1, help="worker processes; output does not depend on it")
    p.add_argument("--out", help="JSON path (default stdout)")
    tol_flags(p, herm=False)
    p.set_defaults(func=cmd_survey)

    p = sub.add_parser("intelligent", help="solve dA phi = z dB phi for a pair of observables")
    p.add_argument("input", help="problem JSON with exactly 2 observables (state is ignored)")
    p.add_argument("--z-re", type=float, default=0.0)
    p.add_argument("--z-im", type=float, default=0.0)
    p.add_argument("--z-grid", help="grid spec 're=-1:1:0.5,im=-1:1:0.5' (inclusive); overrides --z-re/--z-im")
    p.add_argument("--out", help="JSON path (default stdout)")
    tol_flags(p)
    p.set_defaults(func=cmd_intelligent)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except UncrelError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
