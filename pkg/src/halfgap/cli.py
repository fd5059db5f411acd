"""``halfgap`` command-line entry point.

Exit codes: 0 on success (a NO decision included), 2 for usage or input
errors, 3 when an internal invariant fails.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from fractions import Fraction

import numpy as np

from . import sq
from .bench import TASKS, bench_scaling, svg_chart
from .estimator import DatasetAccess, approx_distance, sample_size
from .exact import (
    exact_distance,
    exact_distance_1d,
    exact_distance_2d,
    exact_distance_cand,
    exact_distance_sep,
)
from .geometry import IntOverflowError, MultiLabelError, load_dataset
from .ksum import dump_instance, gen_instance, load_instance, solve_brute, solve_mitm
from .reduction import (
    GapViolation,
    build_reduction,
    decide_via_distance,
    estimate_solver,
    exact_solver,
    verify_gap,
)

EXIT_OK, EXIT_INPUT, EXIT_INTERNAL = 0, 2, 3
ANGLE_KS_SOFT = 0.1

_DIST_METHODS = {
    "auto": exact_distance,
    "sep": exact_distance_sep,
    "cand": exact_distance_cand,
    "1d": exact_distance_1d,
    "2d": exact_distance_2d,
}


class InputError(Exception):
    pass


def _frac(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from exc


def _fmt(q: Fraction) -> str:
    return f"{q.numerator}/{q.denominator}"


def _emit(args, payload: dict, rows: list | None = None, header: list | None = None) -> None:
    if args.format == "csv" and rows is not None:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
        text = buf.getvalue()
    else:
        text = json.dumps(payload, indent=1) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _load_ksum(path):
    try:
        return load_instance(path)
    except (OSError, ValueError, KeyError, TypeError) as exc:
        raise InputError(f"cannot read k-SUM instance {path}: {exc}") from exc


def _load_ds(path):
    try:
        return load_dataset(path)
    except (OSError, ValueError, KeyError, TypeError) as exc:
        raise InputError(f"cannot read dataset {path}: {exc}") from exc


# ------------------------------------------------------------ subcommands


def cmd_gen_ksum(args):
    inst = gen_instance(args.n, args.k, args.planted, args.seed)
    if args.out:
        dump_instance(inst, args.out)
    else:
        print(json.dumps(inst.to_json(), indent=1))


def cmd_solve_ksum(args):
    inst = _load_ksum(args.ksum)
    wit = (solve_brute if args.method == "brute" else solve_mitm)(inst)
    answer = "YES" if wit else "NO"
    print(answer)
    if args.out:
        _emit(args, {"answer": answer, "witness": wit.to_json() if wit else None})


def cmd_reduce(args):
    red = build_reduction(_load_ksum(args.ksum))
    _emit(args, red.to_json())


def cmd_verify_gap(args):
    red = build_reduction(_load_ksum(args.ksum))
    rep = verify_gap(red)
    print(f"exact distance {_fmt(rep.exact)}")
    print(f"{rep.side.value} side")
    if args.out:
        _emit(args, {"exact": _fmt(rep.exact), "side": rep.side.value, **red.meta()})


def cmd_decide(args):
    red = build_reduction(_load_ksum(args.ksum))
    solver = exact_solver if args.solver == "exact" else estimate_solver(args.seed, args.delta)
    side = decide_via_distance(red, solver)
    print(side.value)


def cmd_dist_exact(args):
    ds = _load_ds(args.dataset)
    rep = _DIST_METHODS[args.method](ds)
    print(_fmt(rep.distance))
    if args.out:
        _emit(args, rep.to_json())


def cmd_dist_est(args):
    ds = _load_ds(args.dataset)
    s = sample_size(ds.d, args.eps, args.delta)
    est = approx_distance(DatasetAccess(ds, args.seed), ds.d, args.eps, args.delta)
    print(f"estimate {_fmt(est)}")
    print(f"samples {s}")
    if args.out:
        _emit(args, {"estimate": _fmt(est), "samples": s})


def cmd_bench(args):
    grid = [int(v) for v in args.grid.split(",")]
    res = bench_scaling(args.task, grid, args.seed, k=args.k, d=args.d)
    text = res.to_csv()
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    for f in res.fits:
        slope = "undefined" if f.slope is None else f"{f.slope:.3f} (rms residual {f.residual:.3f})"
        print(f"slope {f.series}: {slope}", file=sys.stderr)
    if args.svg:
        with open(args.svg, "w") as fh:
            fh.write(svg_chart(res))


_SQ_HEADER = ["trial", "value", "bound", "pass"]


def cmd_sq_pack(args):
    rows = []
    for t in range(args.trials):
        try:
            v = sq.sample_packing(args.d, args.m, args.threshold, args.retries, args.seed + t)
            rows.append([t, sq.max_abs_inner(v), args.threshold, True])
        except sq.PackingError as exc:
            rows.append([t, exc.best_max, args.threshold, False])
    _emit(args, {"rows": rows}, rows, _SQ_HEADER)


def cmd_sq_f0(args):
    rng = np.random.default_rng(args.seed)
    support = sq.GaussianSupport.sample(args.m, args.d, args.seed)
    queries = sq.projection_queries(sq.random_unit_vectors(rng, args.queries, args.d), args.k)
    refs = [sq.QuerySpec.halfspace(rng.standard_normal(args.d), rng.standard_normal()) for _ in range(args.refs)]
    f0 = sq.build_f0(support, queries, refs, args.tau)
    rows = []
    for i, g in enumerate(queries):
        c = sq.correlation(support, f0, g)
        rows.append([i, c, args.tau / 2, abs(c) <= args.tau / 2])
    for j, r in enumerate(refs):
        c = sq.correlation(support, f0, r)
        rows.append([len(queries) + j, c, 0.0, c == 0.0])
    _emit(args, {"rows": rows}, rows, _SQ_HEADER)


def cmd_sq_adversary(args):
    fam, support = sq.hadamard_family(args.s)
    tau = args.s ** (-1 / 3)
    rng = np.random.default_rng(args.seed)
    rows = []
    for t in range(args.trials):
        picks = rng.choice(args.s, size=args.queries, replace=False)

        def algorithm(ask, picks=picks):
            for i in picks:
                ask(fam[i].as_query())
            return 0.5

        f0 = sq.build_f0(support, [], [], tau)
        tr = sq.adversary_run(algorithm, fam, f0, tau, support)
        rows.append([t, len(tr.survivors), 1, len(tr.survivors) >= 1 and tr.f0_survives])
    _emit(args, {"rows": rows}, rows, _SQ_HEADER)


def cmd_sq_angles(args):
    # one row per trial with the scaled minimum angle, then the KS summary
    rng = np.random.default_rng(args.seed)
    rows = []
    for t in range(args.trials):
        st = sq.angle_stats(sq.random_unit_vectors(rng, args.n, args.d))
        rows.append([t, st.scaled_min, "", ""])
    fit = sq.angle_law_report(args.d, args.n, args.trials, args.seed)
    rows.append(["ks", fit.worst, ANGLE_KS_SOFT, fit.worst <= ANGLE_KS_SOFT])
    print(
        f"K fit (min) {fit.k_min:.4f} KS {fit.ks_min:.4f}; K fit (max) {fit.k_max:.4f} KS {fit.ks_max:.4f}",
        file=sys.stderr,
    )
    _emit(args, {"rows": rows, "fit": fit.__dict__}, rows, _SQ_HEADER)


# ----------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out")
    common.add_argument("--format", choices=("json", "csv"), default="json")

    p = argparse.ArgumentParser(prog="halfgap", description="Halfspace distance approximation toolkit.")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, fn, **kw):
        sp = sub.add_parser(name, parents=[common], **kw)
        sp.set_defaults(func=fn)
        return sp

    sp = add("gen-ksum", cmd_gen_ksum, help="generate a random k-SUM instance")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--planted", action=argparse.BooleanOptionalAction, default=True)

    sp = add("solve-ksum", cmd_solve_ksum, help="solve a k-SUM instance")
    sp.add_argument("--ksum", required=True)
    sp.add_argument("--method", choices=("brute", "mitm"), default="mitm")

    sp = add("reduce", cmd_reduce, help="build the reduced labeled point set")
    sp.add_argument("--ksum", required=True)

    sp = add("verify-gap", cmd_verify_gap, help="check the distance gap on a reduced instance")
    sp.add_argument("--ksum", required=True)

    sp = add("decide", cmd_decide, help="decide k-SUM through a distance solver")
    sp.add_argument("--ksum", required=True)
    sp.add_argument("--solver", choices=("exact", "estimate"), default="exact")
    sp.add_argument("--delta", type=_frac, default=Fraction(1, 3))

    sp = add("dist-exact", cmd_dist_exact, help="exact distance of a dataset to halfspaces")
    sp.add_argument("--dataset", required=True)
    sp.add_argument("--method", choices=sorted(_DIST_METHODS), default="auto")

    sp = add("dist-est", cmd_dist_est, help="sampled distance estimate")
    sp.add_argument("--dataset", required=True)
    sp.add_argument("--eps", type=_frac, required=True)
    sp.add_argument("--delta", type=_frac, default=Fraction(1, 3))

    sp = add("bench", cmd_bench, help="timed scaling runs with a log-log slope")
    sp.add_argument("--task", choices=TASKS, required=True)
    sp.add_argument("--grid", required=True, help="comma-separated sizes n")
    sp.add_argument("--k", type=int, default=4)
    sp.add_argument("--d", type=int, default=2)
    sp.add_argument("--svg")

    sp = add("sq-pack", cmd_sq_pack, help="random sphere packings")
    sp.add_argument("--d", type=int, required=True)
    sp.add_argument("--m", type=int, required=True)
    sp.add_argument("--threshold", type=float, required=True)
    sp.add_argument("--retries", type=int, default=50)
    sp.add_argument("--trials", type=int, default=1)

    sp = add("sq-f0", cmd_sq_f0, help="balanced f0 against random queries")
    sp.add_argument("--m", type=int, default=1000)
    sp.add_argument("--d", type=int, default=3)
    sp.add_argument("--k", type=int, default=3)
    sp.add_argument("--queries", type=int, default=10)
    sp.add_argument("--refs", type=int, default=5)
    sp.add_argument("--tau", type=float, default=0.1)

    sp = add("sq-adversary", cmd_sq_adversary, help="zero-answer adversary on a Hadamard family")
    sp.add_argument("--s", type=int, default=64)
    sp.add_argument("--queries", type=int, default=1)
    sp.add_argument("--trials", type=int, default=10)

    sp = add("sq-angles", cmd_sq_angles, help="extreme angles of random unit vectors")
    sp.add_argument("--d", type=int, default=3)
    sp.add_argument("--n", type=int, default=50)
    sp.add_argument("--trials", type=int, default=100)
    return p


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        args.func(args)
    except (GapViolation, RuntimeError) as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except (InputError, MultiLabelError, IntOverflowError, ValueError, TypeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    return EXIT_OK


def main() -> None:
    sys.exit(run())
