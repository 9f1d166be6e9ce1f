"""The four figure families.

Every family is a pure function of its input CSVs: one call, one
figure, optionally saved. Inputs are matched to schemas by their header
line, so argument order does not matter where schemas differ.
"""

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .errors import SchemaMismatch
from .io import (
    read_aggregate,
    read_curve,
    read_expected,
    read_mean_curve,
    read_trials,
    sniff,
)

FAMILIES = ("ec-dots", "mean-std", "scatter", "betti-overlay")


def _degree_color(k):
    return f"C{k % 10}"


def _partition(inputs, wanted):
    """Split input paths by schema; reject anything outside `wanted`."""
    groups = {name: [] for name in wanted}
    for path in inputs:
        name = sniff(path)
        if name not in groups:
            raise SchemaMismatch(f"{path}: schema {name!r} not usable here "
                                 f"(expected one of {sorted(wanted)})")
        groups[name].append(path)
    return groups


def _ec_dots(inputs, ax):
    groups = _partition(inputs, ("expected", "mean", "trials"))
    curve_paths = groups["expected"] + groups["mean"]
    if len(curve_paths) != 1 or len(groups["trials"]) != 1:
        raise SchemaMismatch("ec-dots needs exactly one curve file and one "
                             "trials file")
    cpath = curve_paths[0]
    if sniff(cpath) == "expected":
        param, value = read_expected(cpath)
    else:
        param, value, _ = read_mean_curve(cpath)
    rows = [r for r in read_trials(groups["trials"][0]) if r["valid"]]

    ax.plot(param, value, color="k", lw=1.2, label="expected EC")
    ax.axhline(0.0, color="0.6", lw=0.6)
    for k in sorted({r["degree"] for r in rows}):
        births = np.array([r["first_birth"] for r in rows
                           if r["degree"] == k])
        ax.scatter(births, np.interp(births, param, value), s=14,
                   color=_degree_color(k), alpha=0.6, zorder=3,
                   label=f"first degree-{k} birth")
    ax.legend(fontsize=8)
    return "parameter", "Euler characteristic"


def _mean_std(inputs, ax):
    groups = _partition(inputs, ("aggregate",))
    rows = [r for p in groups["aggregate"] for r in read_aggregate(p)]
    series = {}
    for r in rows:
        series.setdefault((r["model"], r["d"], r["degree"]), []).append(r)
    for (model, d, k), pts in sorted(series.items()):
        pts.sort(key=lambda r: r["size"])
        size = [r["size"] for r in pts]
        mean = [r["mean_birth"] for r in pts]
        std = [r["std_birth"] for r in pts]
        color = _degree_color(k)
        ax.errorbar(size, mean, yerr=std, marker="o", ms=4, capsize=3,
                    color=color, ls="-",
                    label=f"{model} d={d} degree {k}")
        for r in pts:
            ax.axhline(r["t_ec"], color=color, lw=0.7, ls="--", alpha=0.5)
    ax.set_xscale("log")
    ax.legend(fontsize=8)
    return "system size", "first essential birth"


def _scatter(inputs, ax):
    groups = _partition(inputs, ("trials",))
    rows = [r for p in groups["trials"] for r in read_trials(p)
            if r["valid"]]
    span = [np.inf, -np.inf]

    def update_span(xs, ys):
        pts = np.concatenate([xs, ys])
        pts = pts[np.isfinite(pts)]
        if len(pts):
            span[0] = min(span[0], pts.min())
            span[1] = max(span[1], pts.max())

    for k in sorted({r["degree"] for r in rows}):
        sub = [r for r in rows if r["degree"] == k]
        births = np.array([r["first_birth"] for r in sub])
        t_ec = np.array([r["t_ec"] for r in sub])
        t_betti = np.array([r["t_betti"] for r in sub])
        color = _degree_color(k)
        ax.scatter(t_ec, births, s=14, color=color, alpha=0.6,
                   label=f"degree {k} vs EC zero")
        have = np.isfinite(t_betti)
        if have.any():
            ax.scatter(t_betti[have], births[have], s=18, color=color,
                       alpha=0.6, marker="x",
                       label=f"degree {k} vs Betti crossing")
        update_span(t_ec, births)
        update_span(t_betti[have], births[have])
    if np.isfinite(span).all():
        ax.plot(span, span, color="0.6", lw=0.8, ls=":", zorder=0)
    ax.legend(fontsize=8)
    return "reference estimate", "first essential birth"


def _betti_overlay(inputs, ax):
    groups = _partition(inputs, ("curve",))
    seen = set()
    for path in groups["curve"]:
        t, _, betas = read_curve(path)
        for k, beta in enumerate(betas):
            label = f"beta_{k}" if k not in seen else None
            seen.add(k)
            ax.step(t, beta, where="post", color=_degree_color(k),
                    alpha=0.5, lw=1.0, label=label)
    ax.legend(fontsize=8)
    return "filtration parameter", "Betti number"


_RENDERERS = {"ec-dots": _ec_dots, "mean-std": _mean_std,
              "scatter": _scatter, "betti-overlay": _betti_overlay}


def render(family, inputs, out=None, xlabel=None, ylabel=None, title=None):
    """Render one figure family from experiment CSV files.

    Returns the matplotlib Figure; saves it to `out` when given. Never
    modifies the inputs.
    """
    if family not in _RENDERERS:
        raise ValueError(f"unknown figure family {family!r}; choose from "
                         f"{', '.join(FAMILIES)}")
    if not inputs:
        raise ValueError("no input files given")
    fig, ax = plt.subplots(figsize=(6.0, 4.0), dpi=120)
    try:
        default_x, default_y = _RENDERERS[family](list(inputs), ax)
        ax.set_xlabel(xlabel if xlabel is not None else default_x)
        ax.set_ylabel(ylabel if ylabel is not None else default_y)
        if title is not None:
            ax.set_title(title)
        fig.tight_layout()
        if out is not None:
            fig.savefig(out)
    except Exception:
        plt.close(fig)
        raise
    return fig
