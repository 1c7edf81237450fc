"""Command line interface: ``permkit {compute,sample,analyze,kstest,bench}``.

Exit codes
----------
0  success
2  malformed input file (or command line usage error)
3  matrix order not supported by the chosen algorithm
4  conflicting or invalid flags or parameters (also: missing ``--seed`` when
   ``PERM_CI=1``)
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time
from importlib import resources

from . import __version__
from .bench import bench_band, bench_dense, bench_sparse, doubling_slope
from .ensembles import KINDS, EnsembleSpec
from .errors import DimensionError, MatrixFormatError, OrderTooLargeError, SampleFormatError
from .matrix import AccumulationMode, read_matrix
from .stats import analyze, draw_sample_set, format_samples, ks_test, read_samples
from .structured import ALGORITHMS, compute_permanent

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_ORDER = 3
EXIT_FLAGS = 4


class FlagConflict(Exception):
    pass


def _emit(obj, out=None, full_precision=()):
    """Write ``obj`` as JSON; keys in ``full_precision`` get 17 significant digits."""
    out = out or sys.stdout
    marked = dict(obj)
    for key in full_precision:
        if not math.isfinite(marked[key]):
            raise ValueError(f"{key} is not finite")
        marked[key] = f"@@{key}@@"
    text = json.dumps(marked, indent=2, allow_nan=False)
    for key in full_precision:
        text = text.replace(f'"@@{key}@@"', format(obj[key], ".17g"))
    out.write(text + "\n")


def _seed(args):
    if args.seed is not None:
        return args.seed
    if os.environ.get("PERM_CI") == "1":
        raise FlagConflict("--seed is required when PERM_CI=1")
    seed = time.time_ns() & ((1 << 64) - 1)
    print(f"permkit: using seed {seed}", file=sys.stderr)
    return seed


def _check_threads(args):
    if args.threads is not None and args.threads < 1:
        raise FlagConflict("--threads must be at least 1")


def cmd_compute(args):
    _check_threads(args)
    A = read_matrix(args.matrix)
    res = compute_permanent(A, algorithm=args.algorithm, mode=args.mode, workers=args.threads,
                            rng=args.seed if args.seed is not None else 0)
    _emit({
        "value_re": res.real,
        "value_im": res.imag,
        "algorithm": res.algorithm,
        "mode": res.mode.value,
        "terms_evaluated": res.terms_evaluated,
        "wall_seconds": res.wall_seconds,
    }, full_precision=("value_re", "value_im"))


def cmd_sample(args):
    if args.exponent is not None and args.ensemble.replace("-", "_") != "unitary_minor":
        raise FlagConflict("--exponent only applies to --ensemble unitary-minor")
    seed = _seed(args)
    try:
        spec = EnsembleSpec(args.ensemble, args.n, args.exponent, seed)
    except ValueError as exc:
        raise FlagConflict(str(exc)) from None
    if args.samples < 1:
        raise FlagConflict("--samples must be positive")
    s = draw_sample_set(spec, args.samples, mode=args.mode)
    text = format_samples(s)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_analyze(args):
    sets = [read_samples(p) for p in args.samples]
    _emit(analyze(sets, per_decade=args.per_decade, resamples=args.resamples,
                  rng=args.seed if args.seed is not None else 0, fit_degree=args.fit_degree))


def cmd_kstest(args):
    a = read_samples(args.first)
    b = read_samples(args.second)
    res = ks_test(a, b, alpha=args.alpha)
    _emit({"D": res.D, "threshold": res.threshold, "alpha": res.alpha, "reject": bool(res.reject),
           "count_a": a.count, "count_b": b.count})


def cmd_bench(args):
    _check_threads(args)
    if args.sizes is None and args.min_n > args.max_n:
        raise FlagConflict("--min-n must not exceed --max-n")
    ns = args.sizes or list(range(args.min_n, args.max_n + 1, args.step))
    if args.algorithm == "ryser":
        rows = bench_dense(ns, repeats=args.repeats, mode=args.mode, workers=args.threads or 1)
    elif args.algorithm == "band":
        rows = bench_band(ns, args.bandwidth, repeats=args.repeats)
    else:
        rows = bench_sparse(ns, args.density, repeats=args.repeats, mode=args.mode)
    out = {
        "algorithm": args.algorithm,
        "rows": [
            {"n": r.n, "median_seconds": r.median_seconds, "repeats": r.repeats,
             "parameter": r.parameter}
            for r in rows
        ],
        "log2_slope": doubling_slope(rows) if args.algorithm == "ryser" and len(rows) > 1 else None,
    }
    if args.format == "table":
        print(f"{'n':>6} {'median_s':>14}")
        for r in rows:
            print(f"{r.n:>6} {r.median_seconds:>14.6g}")
        if out["log2_slope"] is not None:
            print(f"log2 slope: {out['log2_slope']:.4f}")
    else:
        _emit(out)


def build_parser():
    p = argparse.ArgumentParser(prog="permkit", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    modes = [m.value for m in AccumulationMode]

    c = sub.add_parser("compute", help="permanent of a matrix file")
    c.add_argument("--matrix", required=True)
    c.add_argument("--algorithm", choices=ALGORITHMS, default="auto")
    c.add_argument("--mode", choices=modes, default="compensated")
    c.add_argument("--threads", type=int, default=None)
    c.add_argument("--seed", type=int, default=None, help="tie-breaking seed for the sparse path")
    c.set_defaults(func=cmd_compute)

    s = sub.add_parser("sample", help="normalised permanents of random matrices")
    s.add_argument("--ensemble", required=True,
                   choices=list(KINDS) + [k.replace("_", "-") for k in KINDS if "_" in k])
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--samples", type=int, required=True)
    s.add_argument("--exponent", type=float, default=None)
    s.add_argument("--seed", type=int, default=None)
    s.add_argument("--mode", choices=modes, default="compensated")
    s.add_argument("--output", "-o", default=None)
    s.set_defaults(func=cmd_sample)

    a = sub.add_parser("analyze", help="moments and distribution of sample sets")
    a.add_argument("--samples", nargs="+", required=True)
    a.add_argument("--per-decade", type=int, default=16)
    a.add_argument("--resamples", type=int, default=200)
    a.add_argument("--fit-degree", type=int, default=None)
    a.add_argument("--seed", type=int, default=None)
    a.set_defaults(func=cmd_analyze)

    k = sub.add_parser("kstest", help="two-sample Kolmogorov-Smirnov test")
    k.add_argument("first")
    k.add_argument("second")
    k.add_argument("--alpha", type=float, default=0.05)
    k.set_defaults(func=cmd_kstest)

    b = sub.add_parser("bench", help="median run times per matrix order")
    b.add_argument("--algorithm", choices=("ryser", "band", "sparse"), default="ryser")
    b.add_argument("--min-n", type=int, default=16)
    b.add_argument("--max-n", type=int, default=26)
    b.add_argument("--step", type=int, default=1)
    b.add_argument("--sizes", type=int, nargs="+", default=None,
                   help="explicit orders; overrides --min-n/--max-n/--step")
    b.add_argument("--repeats", type=int, default=3)
    b.add_argument("--bandwidth", type=int, default=2)
    b.add_argument("--density", type=float, default=0.01)
    b.add_argument("--mode", choices=modes, default="compensated")
    b.add_argument("--threads", type=int, default=1)
    b.add_argument("--format", choices=("json", "table"), default="json")
    b.set_defaults(func=cmd_bench)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except (MatrixFormatError, SampleFormatError, DimensionError, FileNotFoundError) as exc:
        print(f"permkit: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except OrderTooLargeError as exc:
        print(f"permkit: {exc}", file=sys.stderr)
        return EXIT_ORDER
    except (FlagConflict, ValueError) as exc:
        print(f"permkit: {exc}", file=sys.stderr)
        return EXIT_FLAGS
    return EXIT_OK


def load_schema(name: str) -> dict:
    """JSON schema shipped for the output of subcommand ``name``."""
    text = resources.files("permkit").joinpath("schemas", f"{name}.schema.json").read_text("utf-8")
    return json.loads(text)


def main_exit():
    sys.exit(main())


if __name__ == "__main__":
    main_exit()
