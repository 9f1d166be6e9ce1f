"""Command-line front end: gen, ec-zeros, run, stats.

Exit codes: 0 success, 2 config/usage error, 3 run finished with some
invalid trials, 4 zero-count mismatch on the expected EC curve.
"""

import argparse
import json
import os
import sys

from .analysis import ec_zero_set
from .complexes import dump_complex
from .continuum import (
    dump_field,
    dump_points,
    sample_grf_torus,
    sample_poisson_torus,
)
from .errors import ZeroCountMismatch
from .harness import (
    ExperimentConfig,
    _version_line,
    aggregate,
    aggregate_lines,
    read_trials_csv,
    run_experiment,
)
from .sitemodels import gen_cubical_complex, gen_perm_complex


def _cmd_gen(args):
    if args.model in ("cubical", "perm", "grf") and args.size != int(args.size):
        raise ValueError(f"{args.model} size must be an integer")
    with open(args.out, "w") as fh:
        if args.model == "cubical":
            dump_complex(gen_cubical_complex(args.dim, int(args.size),
                                             seed=args.seed), fh)
        elif args.model == "perm":
            dump_complex(gen_perm_complex(args.dim, int(args.size),
                                          seed=args.seed), fh)
        elif args.model == "boolean":
            pts = sample_poisson_torus(args.size, args.dim, seed=args.seed)
            dump_points(pts, fh)
        else:
            fld = sample_grf_torus(int(args.size), args.dim, args.sigma2,
                                   seed=args.seed)
            dump_field(fld, args.sigma2, args.seed, fh)
    return 0


def _cmd_ec_zeros(args):
    kwargs = {"lambda_hi": args.lambda_hi}
    if args.size is not None:
        kwargs["n"] = args.size
    zs = ec_zero_set(args.model, args.dim, **kwargs)
    print(json.dumps({"model": zs.model, "d": zs.d,
                      "domain": list(zs.domain),
                      "zeros": list(zs.zeros)}))
    return 0


def _cmd_run(args):
    cfg = ExperimentConfig.from_json(
        args.config, trials=args.trials, master_seed=args.seed,
        out_dir=args.out, format=args.format)
    records, stats, paths = run_experiment(cfg)
    for p in paths:
        if os.path.dirname(p) == cfg.out_dir:
            print(p)
    invalid = {r.trial for r in records if not r.valid}
    if invalid:
        print(f"warning: {len(invalid)} of {cfg.trials} trials invalid",
              file=sys.stderr)
        return 3
    return 0


def _cmd_stats(args):
    records = read_trials_csv(os.path.join(args.in_dir, "trials.csv"))
    stats = aggregate(records)
    print(_version_line())
    for line in aggregate_lines(stats):
        print(line)
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="torusperc",
        description="Percolation-vs-EC-zero experiments on flat tori")
    sub = parser.add_subparsers(dest="cmd", required=True)

    gen = sub.add_parser("gen", help="dump one complex, point set, or field")
    gen.add_argument("--model", required=True,
                     choices=["cubical", "perm", "boolean", "grf"])
    gen.add_argument("--dim", type=int, required=True)
    gen.add_argument("--size", type=float, required=True)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--sigma2", type=float, default=1e-3)
    gen.add_argument("--out", required=True)
    gen.set_defaults(func=_cmd_gen)

    ecz = sub.add_parser("ec-zeros", help="print the expected-EC zero set")
    ecz.add_argument("--model", required=True,
                     choices=["cubical", "perm", "boolean", "grf"])
    ecz.add_argument("--dim", type=int, required=True)
    ecz.add_argument("--size", type=float, default=None,
                     help="intensity for the boolean d=4 Monte Carlo route")
    ecz.add_argument("--lambda-hi", type=float, default=4.0)
    ecz.set_defaults(func=_cmd_ec_zeros)

    run = sub.add_parser("run", help="run a configured experiment")
    run.add_argument("--config", required=True)
    run.add_argument("--trials", type=int, default=None)
    run.add_argument("--seed", type=int, default=None)
    run.add_argument("--out", default=None)
    run.add_argument("--format", choices=["csv", "json"], default=None)
    run.set_defaults(func=_cmd_run)

    st = sub.add_parser("stats", help="recompute aggregates from trial files")
    st.add_argument("--in", dest="in_dir", required=True)
    st.set_defaults(func=_cmd_stats)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ZeroCountMismatch as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    except (ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
