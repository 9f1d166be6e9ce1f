"""Command-line front end: one figure per invocation.

Exit codes: 0 success, 2 bad arguments, unreadable or mismatched input.
"""

import argparse
import sys

import matplotlib.pyplot as plt

from .errors import EmptyInput, SchemaMismatch
from .figures import FAMILIES, render


def build_parser():
    parser = argparse.ArgumentParser(
        prog="plot",
        description="Render experiment CSV outputs into a figure")
    parser.add_argument("--family", required=True, choices=FAMILIES)
    parser.add_argument("--in", dest="inputs", nargs="+", required=True,
                        metavar="PATH")
    parser.add_argument("--out", required=True)
    parser.add_argument("--xlabel", default=None)
    parser.add_argument("--ylabel", default=None)
    parser.add_argument("--title", default=None)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        fig = render(args.family, args.inputs, out=args.out,
                     xlabel=args.xlabel, ylabel=args.ylabel,
                     title=args.title)
        plt.close(fig)
        return 0
    except (SchemaMismatch, EmptyInput, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
