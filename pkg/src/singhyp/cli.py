"""Command line front end: ``check``, ``solve``, ``sweep`` and ``example``.

Exit codes: 0 pass, 1 hypothesis or residual failure, 2 input error,
3 numerical failure.
"""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

from . import __version__
from .builtin import example_names, example_spec
from .errors import (
    HypothesisViolation,
    InadmissibleRho,
    InconsistentStep,
    InfeasibleBoundary,
    NumericalFailure,
    PencilSingular,
    PreconditionError,
    SingHypError,
    SpecError,
)
from .hypotheses import validate_all
from .oracle import cross_check
from .solver import residual_scale, scheme_residual, solve, stability_sweep
from .specfile import ProblemSpec, dumps, load_spec, parse_spec, solution_csv, write_atomic

SCHEMA_VERSION = 1

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_NUMERIC = 0, 1, 2, 3


def _exit_code(exc: BaseException) -> int:
    if isinstance(exc, (HypothesisViolation, InadmissibleRho, InfeasibleBoundary, InconsistentStep)):
        return EXIT_FAIL
    if isinstance(exc, (SpecError, PreconditionError, KeyError)):
        return EXIT_INPUT
    if isinstance(exc, (NumericalFailure, PencilSingular)):
        return EXIT_NUMERIC
    return EXIT_NUMERIC


class Run:
    """Collects the report for one command and writes it on exit."""

    def __init__(self, command: str, spec: ProblemSpec, out: Path):
        self.command = command
        self.spec = spec
        self.out = out
        self.t0 = time.perf_counter()
        self.report: dict = {"schema_version": SCHEMA_VERSION, "command": command, "name": spec.name}

    def finish(self, exit_code: int) -> int:
        self.report["exit_code"] = exit_code
        self.report["provenance"] = {
            "spec_hash": self.spec.hash,
            "tool": "singhyp",
            "version": __version__,
            "residual_tol": self.spec.options.residual_tol,
            "timing": {"wall_seconds": time.perf_counter() - self.t0},
        }
        write_atomic(self.out / "report.json", dumps(self.report))
        return exit_code


def _load(args) -> ProblemSpec:
    overrides = {"residual_tol": args.tol}
    if getattr(args, "halvings", None) is not None:
        overrides["halvings"] = args.halvings
    if args.spec and args.example:
        raise SpecError("give either --spec or --example, not both")
    if args.example:
        return parse_spec(example_spec(args.example), args.example, **overrides)
    if not args.spec:
        raise SpecError("a problem is required: --spec PATH or --example NAME")
    return load_spec(args.spec, **overrides)


def _validation(run: Run) -> bool:
    report = validate_all(run.spec.problem, run.spec.options)
    run.report["validation"] = report.to_dict()
    for name in report.failed():
        c = report[name]
        tag = "warning" if c.severity == "warning" else "FAIL"
        print(f"{tag}: {name}: {c.detail}", file=sys.stderr)
    return report.passed


def cmd_check(run: Run, args) -> int:
    ok = _validation(run)
    print(f"check {'pass' if ok else 'fail'}")
    return EXIT_OK if ok else EXIT_FAIL


def cmd_solve(run: Run, args) -> int:
    from .plotting import plot_solution_norm

    ok = _validation(run)
    if not ok and not args.force:
        print("solve: hypotheses fail (use --force to solve anyway)", file=sys.stderr)
        return EXIT_FAIL
    problem, opts = run.spec.problem, run.spec.options
    sol = solve(problem, opts)
    for w in sol.warnings:
        print(f"warning: {w}", file=sys.stderr)
    res = scheme_residual(sol, problem)
    bound = opts.residual_tol * residual_scale(problem)
    passed = res.worst <= bound
    run.report["warnings"] = sol.warnings
    run.report["residuals"] = {**res.as_dict(), "bound": bound, "passed": passed}
    try:
        run.report["cross_check"] = cross_check(problem, sol.U, opts).as_dict()
    except SingHypError as exc:
        run.report["cross_check"] = {"error": f"{type(exc).__name__}: {exc}"}
    csv = solution_csv(sol.U)
    write_atomic(run.out / "solution.csv", csv)
    plot_solution_norm(sol.U, problem.k, run.out / "solution_norm.png")
    sys.stdout.write(csv)
    print(f"# residuals {'pass' if passed else 'fail'}: worst {res.worst:.3e} bound {bound:.3e}", file=sys.stderr)
    return EXIT_OK if passed else EXIT_FAIL


def cmd_sweep(run: Run, args) -> int:
    from .plotting import gnuplot_script, plot_sweep

    opts = run.spec.options
    result = stability_sweep(run.spec.problem, opts.halvings, opts)
    run.report["sweep"] = result.as_dict()
    lines = ["k,M,max_norm,error"]
    for row in result.rows:
        lines.append(f"{row.k!r},{row.M},{row.max_norm!r},{row.error or ''}")
    csv = "\n".join(lines) + "\n"
    write_atomic(run.out / "sweep.csv", csv)
    write_atomic(run.out / "sweep.gp", gnuplot_script())
    plot_sweep(result.rows, run.out / "sweep.png")
    sys.stdout.write(csv)
    print(f"# sweep {'pass' if result.passed else 'fail'}", file=sys.stderr)
    return EXIT_OK if result.passed else EXIT_FAIL


def cmd_example(run: Run, args) -> int:
    write_atomic(run.out / f"{run.spec.name}.json", dumps(run.spec.to_json()))
    return cmd_solve(run, args)


COMMANDS = {"check": cmd_check, "solve": cmd_solve, "sweep": cmd_sweep, "example": cmd_example}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="singhyp", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--spec", metavar="PATH", help="problem specification (JSON)")
        p.add_argument("--example", metavar="NAME", help=f"built-in problem: {', '.join(example_names())}")
        p.add_argument("--out", metavar="DIR", default="singhyp-out", help="output directory (default: %(default)s)")
        p.add_argument("--tol", metavar="X", type=float, help="residual tolerance (default: $SINGHYP_TOL or 1e-8)")
        p.add_argument("--force", action="store_true", help="solve even when hypotheses fail")
        p.add_argument("--halvings", metavar="K", type=int, help="number of k-halvings for sweep")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "example" and not args.example and not args.spec:
        print("\n".join(example_names()))
        return EXIT_OK
    try:
        spec = _load(args)
    except (SingHypError, KeyError, ValueError) as exc:
        print(f"error: {exc.args[0] if isinstance(exc, KeyError) else exc}", file=sys.stderr)
        return EXIT_INPUT
    run = Run(args.command, spec, Path(args.out))
    try:
        code = COMMANDS[args.command](run, args)
    except SingHypError as exc:
        code = _exit_code(exc)
        run.report["error"] = f"{type(exc).__name__}: {exc}"
        print(f"error: {exc}", file=sys.stderr)
    return run.finish(code)


if __name__ == "__main__":
    sys.exit(main())
