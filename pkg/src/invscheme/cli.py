"""Command-line front end.

Exit codes: 0 success, 1 usage error, 2 numerical divergence (non-table runs).
"""
from __future__ import annotations

import argparse
import sys

import numpy as np

from . import bench, suites
from .errors import DivergenceError, DomainError
from .solve import march_ivp


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: error: {message}")


def _positive(text):
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"malformed number {text!r}") from None
    if not v > 0:
        raise argparse.ArgumentTypeError(f"{text!r} must be positive")
    return v


def _number(text):
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"malformed number {text!r}") from None


def _count(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"malformed integer {text!r}") from None
    if v < 0:
        raise argparse.ArgumentTypeError(f"{text!r} must be non-negative")
    return v


def build_parser():
    p = _Parser(prog="invscheme", description="Invariant finite-difference schemes: tables, solves and property suites.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, domain=True):
        sp.add_argument("--iterations", type=_count, default=100)
        sp.add_argument("--forms", type=int, choices=(3, 4), default=4)
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--out", help="CSV output path (default: stdout)")
        if domain:
            sp.add_argument("--scheme", choices=("standard", "invariant"), default="invariant")
            sp.add_argument("--solution", choices=tuple(bench.SOLUTIONS), default="secant")
            sp.add_argument("--x0", type=_number, default=1.0)
            sp.add_argument("--y0", type=_number, default=1.0)
            sp.add_argument("--width", type=_positive, default=1.0)
            sp.add_argument("--height", type=_positive, default=1.0)
            sp.add_argument("--h", type=_positive, default=0.1)
            sp.add_argument("--k", type=_positive, default=None)
            sp.add_argument("--allow-singular", action="store_true",
                            help="skip the check that the domain avoids singular lines")

    common(sub.add_parser("table1", help="mean errors on [1,2]^2 for four step sizes"), domain=False)
    common(sub.add_parser("table2", help="maximal errors approaching the singular line"), domain=False)
    common(sub.add_parser("solve-bvp", help="relax one boundary value problem"))
    ivp = sub.add_parser("solve-ivp", help="march from a corner with exact edge data")
    common(ivp)
    ivp.add_argument("--corner", choices=("BL", "BR", "TL", "TR"), default="BL")
    common(sub.add_parser("dump-solution", help="x, y, numeric, exact and error per node"))
    inv = sub.add_parser("invariance", help="invariance of the joint invariants under random actions")
    common(inv, domain=False)
    inv.add_argument("--group", choices=("G1", "G2", "G3", "all"), default="all")
    inv.add_argument("--trials", type=_count, default=100)
    common(sub.add_parser("convergence", help="observed orders against continuous limits"), domain=False)
    return p


def _emit(args, columns, records):
    if args.out:
        bench.write_csv(args.out, columns, records)
    else:
        bench.write_csv(sys.stdout, columns, records)


def _say(args, text):
    # keep stdout clean for CSV when no output file is given
    print(text, file=sys.stdout if args.out else sys.stderr)


def _config(args):
    return bench.ExperimentConfig(args.solution, args.x0, args.y0, args.width, args.height, args.h,
                                  args.k, args.scheme, args.iterations, args.seed, args.forms,
                                  allow_singular=args.allow_singular)


def _table1(args):
    rows = bench.run_table1(iterations=args.iterations, forms=args.forms)
    _emit(args, bench.TABLE1_COLUMNS, bench.table_records(rows))
    for r in rows:
        ref = bench.TABLE1_REFERENCE[(r.scheme, r.h)]
        _say(args, f"{r.scheme:9s} h={r.h:<6g} mean={r.report.mean_abs:.4e} "
                   f"(interior {r.report.mean_abs_interior:.4e}, published {ref:.3e}) {r.report.runtime_ms} ms")
    return 0


def _table2(args):
    rows = bench.run_table2(iterations=args.iterations, forms=args.forms)
    _emit(args, bench.TABLE2_COLUMNS, bench.table_records(rows))
    for r in rows:
        ref = bench.TABLE2_REFERENCE[(r.scheme, r.x0)]
        state = "diverged" if r.report.diverged else f"max={r.report.max_abs:.4e}"
        _say(args, f"{r.scheme:9s} x0={r.x0:<5g} {state} (published {ref:g}) {r.report.runtime_ms} ms")
    return 0


SOLVE_COLUMNS = ("scheme", "solution", "x0", "y0", "h", "k", "iterations_run",
                 "mean_abs_error", "mean_abs_error_interior", "max_abs_error", "diverged")


def _solve_bvp(args):
    cfg = _config(args)
    report, err = bench.run_experiment(cfg)
    rec = (cfg.scheme.value, cfg.solution, cfg.x0, cfg.y0, cfg.h, cfg.k, report.iterations_run,
           err.mean_abs, err.mean_abs_interior, err.max_abs, err.diverged)
    if args.out:
        bench.write_csv(args.out, SOLVE_COLUMNS, [rec])
    if err.diverged:
        when = (f"in sweep {report.iterations_run}" if report.iterations_run
                else "while initializing from the corner marches")
        print(f"diverged at node {report.failing_index} {when}")
        return 2
    print(f"{cfg.scheme.value} {cfg.solution}: {report.iterations_run} sweeps, "
          f"mean abs error {err.mean_abs:.6e} (interior {err.mean_abs_interior:.6e}), "
          f"max abs error {err.max_abs:.6e}, last update {report.max_update_last_sweep:.3e}, "
          f"{err.runtime_ms} ms")
    return 0


def _solve_ivp(args):
    cfg = _config(args)
    mesh = cfg.mesh()
    exact = mesh.sample(bench.get_solution(cfg.solution)).values
    i = 0 if args.corner in ("BL", "TL") else -1
    j = 0 if args.corner in ("BL", "BR") else -1
    try:
        field = march_ivp(mesh, exact[:, j], exact[i, :], cfg.scheme, args.corner)
    except DivergenceError as exc:
        print(f"diverged at node {exc.index}")
        return 2
    err = np.abs(field.values - exact)
    if args.out:
        _dump(args.out, mesh, field.values, exact)
    print(f"{cfg.scheme.value} {cfg.solution} march from {args.corner}: "
          f"mean abs error {err.mean():.6e}, max abs error {err.max():.6e}")
    return 0


def _dump(path, mesh, numeric, exact):
    X, Y = np.meshgrid(mesh.xs, mesh.ys, indexing="ij")
    recs = zip(X.ravel(), Y.ravel(), numeric.ravel(), exact.ravel(), np.abs(numeric - exact).ravel())
    bench.write_csv(path, ("x", "y", "u_numeric", "u_exact", "error"), list(recs))


def _dump_solution(args):
    cfg = _config(args)
    report, err = bench.run_experiment(cfg)
    exact = cfg.mesh().sample(bench.get_solution(cfg.solution)).values
    _dump(args.out if args.out else sys.stdout, cfg.mesh(), report.field.values, exact)
    if err.diverged:
        _say(args, f"diverged at node {report.failing_index}; dumped the last finite state")
        return 2
    return 0


def _invariance(args):
    groups = suites.GROUPS if args.group == "all" else (args.group,)
    recs = []
    for g in groups:
        s = suites.run_invariance_suite(g, trials=args.trials, seed=args.seed)
        recs.append((s.group, float(s.trials), s.worst_drift, s.passed, s.control_worst_drift, s.control_detected))
        _say(args, f"{g}: worst drift {s.worst_drift:.3e} ({'pass' if s.passed else 'FAIL'}), "
                   f"control drift {s.control_worst_drift:.3e}")
    _emit(args, ("group", "trials", "worst_drift", "passed", "control_worst_drift", "control_detected"), recs)
    return 0


def _convergence(args):
    rows = suites.run_convergence_suite()
    n = len(rows[0].orders)
    cols = ("name",) + tuple(f"order_{i + 1}" for i in range(n)) + ("finest_error",)
    _emit(args, cols, [(r.name,) + r.orders + (r.errors[-1],) for r in rows])
    for r in rows:
        _say(args, f"{r.name:32s} " + " ".join(f"{o:.3f}" for o in r.orders))
    return 0


COMMANDS = {
    "table1": _table1, "table2": _table2, "solve-bvp": _solve_bvp, "solve-ivp": _solve_ivp,
    "dump-solution": _dump_solution, "invariance": _invariance, "convergence": _convergence,
}


def main(argv=None):
    try:
        args = build_parser().parse_args(argv)
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return 1
    except (DomainError, ValueError) as exc:
        print(f"invscheme: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
