"""Monte Carlo experiment runner with deterministic seeding and CSV/JSON output.

One configuration drives the whole pipeline: per-trial complex
generation, persistence, essential-birth extraction, gap records against
the expected-EC zeros, and aggregation over valid trials. Every output
byte is a function of (config, master seed), modulo the version header.
"""

from __future__ import annotations

import json
import math
import os
import warnings
from dataclasses import dataclass, fields
from multiprocessing import get_context

import numpy as np

from . import __version__
from .analysis import EcZeroSet, ec_zero_set, monte_carlo_ec, t_betti
from .complexes import euler_curve_from_counts
from .continuum import (
    cech_filtration_periodic,
    expected_ec_boolean,
    expected_ec_grf,
    lambda_from_radius,
    radius_from_lambda,
    sample_grf_torus,
    sample_poisson_torus,
    sublevel_cubical_filtration,
)
from .errors import NotFound, NoValidTrials, ZeroCountMismatch
from .persistence import betti_curve, compute_persistence
from .seeding import trial_seed
from .sitemodels import (
    expected_ec_cubical,
    expected_ec_perm,
    gen_cubical_complex,
    gen_perm_complex,
)

MODELS = ("cubical", "perm", "boolean", "grf")
TRIALS_HEADER = ("trial,seed,model,d,size,degree,first_birth,all_births,"
                 "t_ec,delta,t_betti,valid")
AGGREGATE_HEADER = ("model,d,size,degree,trials,invalid,mean_birth,"
                    "std_birth,t_ec,mean_delta")
CURVE_EVENT_CAP = 2000
EXPECTED_GRID_POINTS = 401


@dataclass
class ExperimentConfig:
    """Flat experiment description, loadable from a snake_case JSON object."""

    model: str
    d: int
    size: float
    trials: int
    master_seed: int = 0
    sigma2: float = 1e-3
    lambda_hi: float = 4.0
    margin: float = 1.5
    out_dir: str = "."
    format: str = "csv"
    workers: int = 1

    def __post_init__(self):
        if self.model not in MODELS:
            raise ValueError(f"model must be one of {MODELS}, got {self.model!r}")
        if self.d not in (2, 3, 4):
            raise ValueError(f"d must be 2, 3, or 4, got {self.d}")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.size <= 0:
            raise ValueError("size must be positive")
        if self.model in ("cubical", "perm", "grf"):
            if self.size != int(self.size):
                raise ValueError(f"{self.model} size must be an integer")
            self.size = int(self.size)
        if self.model == "cubical" and self.size < 3:
            raise ValueError("cubical size must be >= 3")
        if self.model == "perm" and self.size < 4:
            raise ValueError("perm size must be >= 4")
        if self.model == "grf" and self.size < 4:
            raise ValueError("grf grid must be >= 4")
        if self.sigma2 <= 0:
            raise ValueError("sigma2 must be positive")
        if self.lambda_hi <= 0:
            raise ValueError("lambda_hi must be positive")
        if self.margin <= 0:
            raise ValueError("margin must be positive")
        if self.format not in ("csv", "json"):
            raise ValueError("format must be csv or json")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")

    @classmethod
    def from_json(cls, path, **overrides):
        with open(path) as fh:
            raw = json.load(fh)
        if not isinstance(raw, dict):
            raise ValueError(f"{path}: config must be a JSON object")
        known = {f.name for f in fields(cls)}
        unknown = set(raw) - known
        if unknown:
            raise ValueError(f"{path}: unknown config keys {sorted(unknown)}")
        raw.update({k: v for k, v in overrides.items() if v is not None})
        missing = {"model", "d", "size", "trials"} - set(raw)
        if missing:
            raise ValueError(f"{path}: missing config keys {sorted(missing)}")
        return cls(**raw)


@dataclass(frozen=True)
class TrialRecord:
    """One (trial, degree) row of the trials table."""

    trial: int
    seed: int
    model: str
    d: int
    size: float
    degree: int
    first_birth: float
    all_births: tuple
    t_ec: float
    delta: float
    t_betti: float
    valid: bool


@dataclass(frozen=True)
class DegreeStats:
    model: str
    d: int
    size: float
    degree: int
    trials: int
    invalid: int
    mean_birth: float
    std_birth: float
    t_ec: float
    mean_delta: float


@dataclass(frozen=True)
class AggregateStats:
    rows: tuple

    def for_degree(self, k):
        for row in self.rows:
            if row.degree == k:
                return row
        raise KeyError(k)


def _essential_degree_counts_ok(bc, d, model):
    # the truncated Cech skeleton only represents homology below degree d
    top = d if model == "boolean" else d + 1
    for k in range(top):
        if len(bc.essential(k)) != math.comb(d, k):
            return False
    return True


def _build_complex(cfg, seed):
    if cfg.model == "cubical":
        return gen_cubical_complex(cfg.d, int(cfg.size), seed=seed)
    if cfg.model == "perm":
        return gen_perm_complex(cfg.d, int(cfg.size), seed=seed)
    if cfg.model == "grf":
        f = sample_grf_torus(int(cfg.size), cfg.d, cfg.sigma2, seed=seed)
        return sublevel_cubical_filtration(f)
    pts = sample_poisson_torus(cfg.size, cfg.d, seed=seed)
    r_max = min(cfg.margin * float(radius_from_lambda(cfg.lambda_hi, cfg.size,
                                                      cfg.d)), 0.249)
    return cech_filtration_periodic(pts, r_max)


def _to_report_units(cfg, values):
    """Boolean filtrations live in r; reports use lambda."""
    if cfg.model == "boolean":
        return lambda_from_radius(np.asarray(values, dtype=np.float64),
                                  cfg.size, cfg.d)
    return np.asarray(values, dtype=np.float64)


def _curve_window_end(cfg, cx):
    if cfg.model in ("cubical", "perm"):
        return 1.0
    if cfg.model == "grf":
        return float(cx.values.max())
    return float(cfg.lambda_hi)


def _event_grid(cfg, bc, cx):
    events = [iv.birth for iv in bc.intervals]
    events += [iv.death for iv in bc.intervals if math.isfinite(iv.death)]
    grid = np.unique(np.asarray(events, dtype=np.float64))
    if len(grid) > CURVE_EVENT_CAP:
        pick = np.linspace(0, len(grid) - 1, CURVE_EVENT_CAP).round().astype(int)
        grid = grid[np.unique(pick)]
    end = _curve_window_end(cfg, cx)
    if cfg.model == "boolean":
        end = float(radius_from_lambda(cfg.lambda_hi, cfg.size, cfg.d))
        grid = grid[grid <= end]
    return np.unique(np.append(grid, end))


def _common_grid(cfg):
    """Fixed parameter grid, in report units, shared by all trials."""
    if cfg.model == "grf":
        return np.linspace(-5.0, 5.0, EXPECTED_GRID_POINTS)
    if cfg.model == "boolean":
        return np.linspace(0.0, cfg.lambda_hi, EXPECTED_GRID_POINTS)
    return np.linspace(0.0, 1.0, EXPECTED_GRID_POINTS)


def _run_trial(cfg, index):
    """Pure per-trial pipeline; exceptions are captured into the payload."""
    seed = trial_seed(cfg.master_seed, index)
    try:
        cx = _build_complex(cfg, seed)
        max_deg = cfg.d - 1 if cfg.model == "boolean" else None
        bc = compute_persistence(cx, max_degree=max_deg)
        valid = _essential_degree_counts_ok(bc, cfg.d, cfg.model)
        births = {k: sorted(bc.essential(k)) for k in range(1, cfg.d)}
        crossings = {}
        for k in range(1, cfg.d):
            try:
                crossings[k] = t_betti(bc, k)
            except NotFound:
                crossings[k] = math.nan

        grid = _event_grid(cfg, bc, cx)
        if cfg.model == "boolean":
            chi = np.zeros(len(grid), dtype=np.int64)
            betti_rows = []
            for k in range(cfg.d):
                bk = betti_curve(bc, k)(grid)
                betti_rows.append(bk)
                chi = chi + (-1) ** k * bk
        else:
            chi = euler_curve_from_counts(cx)(grid)
            betti_rows = [betti_curve(bc, k)(grid) for k in range(cfg.d + 1)]
        curve = (np.asarray(_to_report_units(cfg, grid)),
                 np.asarray(chi),
                 [np.asarray(b) for b in betti_rows])

        # the same EC evaluated on the shared grid, so trials can be
        # averaged exactly from their full barcodes
        cgrid = _common_grid(cfg)
        if cfg.model == "boolean":
            rg = np.asarray(radius_from_lambda(cgrid, cfg.size, cfg.d))
            common = np.zeros(len(cgrid), dtype=np.int64)
            for k in range(cfg.d):
                common = common + (-1) ** k * betti_curve(bc, k)(rg)
        else:
            common = euler_curve_from_counts(cx)(cgrid)
        return {"index": index, "seed": seed, "valid": valid,
                "births": births, "crossings": crossings, "curve": curve,
                "common_chi": np.asarray(common), "error": None}
    except Exception as exc:  # captured per trial, the batch continues
        return {"index": index, "seed": seed, "valid": False,
                "births": {k: [] for k in range(1, cfg.d)},
                "crossings": {k: math.nan for k in range(1, cfg.d)},
                "curve": None, "common_chi": None,
                "error": f"{type(exc).__name__}: {exc}"}


def _zero_set_for(cfg):
    if cfg.model == "boolean" and cfg.d == 4:
        grid = np.linspace(0.0, cfg.lambda_hi, EXPECTED_GRID_POINTS)[1:]
        curve, zeros = monte_carlo_ec("boolean", 4, cfg.size,
                                      min(cfg.trials, 20), grid,
                                      seed=cfg.master_seed + 1,
                                      margin=cfg.margin)
        inner = [z for z in zeros if 0.0 < z < cfg.lambda_hi]
        if len(inner) != cfg.d - 1:
            raise ZeroCountMismatch(cfg.d - 1, len(inner), inner)
        return EcZeroSet("boolean", 4, (0.0, cfg.lambda_hi), tuple(inner)), curve
    zs = ec_zero_set(cfg.model, cfg.d, lambda_hi=cfg.lambda_hi)
    return zs, None


def _expected_curve(cfg, mc_curve):
    if cfg.model == "cubical":
        grid = np.linspace(0.0, 1.0, EXPECTED_GRID_POINTS)
        return grid, expected_ec_cubical(cfg.d, cfg.size ** cfg.d, grid)
    if cfg.model == "perm":
        grid = np.linspace(0.0, 1.0, EXPECTED_GRID_POINTS)
        n = cfg.size ** cfg.d
        return grid, expected_ec_perm(cfg.d, n, grid)
    if cfg.model == "grf":
        grid = np.linspace(-5.0, 5.0, EXPECTED_GRID_POINTS)
        return grid, expected_ec_grf(cfg.d, grid)
    if cfg.d == 4:
        return mc_curve.t, mc_curve.y
    grid = np.linspace(0.0, cfg.lambda_hi, EXPECTED_GRID_POINTS)
    return grid, expected_ec_boolean(cfg.d, cfg.size, grid)


def run_experiment(cfg):
    """Run all trials, aggregate, and write outputs.

    Returns (records, stats, paths). Per-trial failures are recorded as
    invalid rows; they never abort the batch.
    """
    zero_set, mc_curve = _zero_set_for(cfg)

    if cfg.workers > 1:
        with get_context("fork").Pool(cfg.workers) as pool:
            payloads = pool.starmap(_run_trial,
                                    [(cfg, i) for i in range(cfg.trials)])
    else:
        payloads = [_run_trial(cfg, i) for i in range(cfg.trials)]

    records = []
    curves = {}
    for pay in payloads:
        i = pay["index"]
        if pay["curve"] is not None:
            curves[i] = pay["curve"]
        for k in range(1, cfg.d):
            births = _to_report_units(cfg, pay["births"][k]) if pay["births"][k] else []
            first = float(births[0]) if len(births) else math.nan
            cross = pay["crossings"][k]
            if not math.isnan(cross):
                cross = float(_to_report_units(cfg, [cross])[0])
            t_ec = zero_set.zeros[k - 1]
            records.append(TrialRecord(
                trial=i, seed=pay["seed"], model=cfg.model, d=cfg.d,
                size=cfg.size, degree=k, first_birth=first,
                all_births=tuple(float(b) for b in births),
                t_ec=t_ec, delta=first - t_ec, t_betti=cross,
                valid=pay["valid"]))

    chis = [pay["common_chi"] for pay in payloads
            if pay["common_chi"] is not None]
    mean_curve = None
    if chis:
        arr = np.asarray(chis, dtype=np.float64)
        std = (arr.std(axis=0, ddof=1) if len(chis) > 1
               else np.zeros(arr.shape[1]))
        mean_curve = (_common_grid(cfg), arr.mean(axis=0), std)

    stats = aggregate(records)
    paths = emit(records, stats, cfg, curves=curves,
                 expected=_expected_curve(cfg, mc_curve),
                 mean_curve=mean_curve)
    return records, stats, paths


def aggregate(records):
    """Per-degree statistics over valid trials (sample std, n-1)."""
    if not records:
        raise NoValidTrials("no records at all")
    degrees = sorted({r.degree for r in records})
    rows = []
    for k in degrees:
        # sort by trial id so float summation order does not depend on how
        # the caller happened to order the records
        here = sorted((r for r in records if r.degree == k),
                      key=lambda r: r.trial)
        good = [r for r in here if r.valid and math.isfinite(r.first_birth)]
        if not good:
            raise NoValidTrials(f"degree {k} has no valid trials")
        births = np.array([r.first_birth for r in good])
        deltas = np.array([r.delta for r in good])
        if len(births) == 1:
            warnings.warn(f"degree {k}: single valid trial, std has no "
                          "degrees of freedom and is reported as 0")
            std = 0.0
        else:
            std = float(births.std(ddof=1))
        first = good[0]
        rows.append(DegreeStats(
            model=first.model, d=first.d, size=first.size, degree=k,
            trials=len(good), invalid=len(here) - len(good),
            mean_birth=float(births.mean()), std_birth=std,
            t_ec=first.t_ec, mean_delta=float(deltas.mean())))
    return AggregateStats(tuple(rows))


def _fmt(x):
    if isinstance(x, float):
        return repr(x)
    return str(x)


def _version_line():
    return f"# torusperc {__version__}"


def aggregate_lines(stats):
    """Aggregate table as CSV lines (header plus one line per degree)."""
    lines = [AGGREGATE_HEADER]
    for row in stats.rows:
        lines.append(",".join([
            row.model, str(row.d), _fmt(row.size), str(row.degree),
            str(row.trials), str(row.invalid), repr(row.mean_birth),
            repr(row.std_birth), repr(row.t_ec), repr(row.mean_delta)]))
    return lines


def emit(records, stats, cfg, curves=None, expected=None, mean_curve=None):
    """Write trials, aggregate, expected-EC, and per-trial curve files."""
    out = cfg.out_dir
    os.makedirs(out, exist_ok=True)
    paths = []

    if cfg.format == "csv":
        tpath = os.path.join(out, "trials.csv")
        with open(tpath, "w") as fh:
            fh.write(_version_line() + "\n")
            fh.write(TRIALS_HEADER + "\n")
            for r in records:
                births = ";".join(repr(b) for b in r.all_births)
                fh.write(",".join([
                    str(r.trial), str(r.seed), r.model, str(r.d),
                    _fmt(r.size), str(r.degree), repr(r.first_birth),
                    births, repr(r.t_ec), repr(r.delta), repr(r.t_betti),
                    str(int(r.valid))]) + "\n")
        paths.append(tpath)

        apath = os.path.join(out, "aggregate.csv")
        with open(apath, "w") as fh:
            fh.write(_version_line() + "\n")
            for line in aggregate_lines(stats):
                fh.write(line + "\n")
        paths.append(apath)
    else:
        tpath = os.path.join(out, "trials.json")
        blob = {"version": __version__,
                "trials": [{**{f.name: getattr(r, f.name)
                               for f in fields(TrialRecord)},
                            "all_births": list(r.all_births),
                            "valid": int(r.valid)} for r in records]}
        with open(tpath, "w") as fh:
            json.dump(blob, fh, indent=1, sort_keys=True)
            fh.write("\n")
        paths.append(tpath)

        apath = os.path.join(out, "aggregate.json")
        blob = {"version": __version__,
                "aggregate": [{f.name: getattr(row, f.name)
                               for f in fields(DegreeStats)}
                              for row in stats.rows]}
        with open(apath, "w") as fh:
            json.dump(blob, fh, indent=1, sort_keys=True)
            fh.write("\n")
        paths.append(apath)

    if expected is not None:
        epath = os.path.join(out, "expected_ec.csv")
        grid, vals = expected
        with open(epath, "w") as fh:
            fh.write(_version_line() + "\n")
            fh.write("param,expected_ec\n")
            for g, v in zip(grid, vals):
                fh.write(f"{float(g)!r},{float(v)!r}\n")
        paths.append(epath)

    if mean_curve is not None:
        mpath = os.path.join(out, "mean_curve.csv")
        grid, mean, std = mean_curve
        with open(mpath, "w") as fh:
            fh.write(_version_line() + "\n")
            fh.write("param,mean_ec,std_ec\n")
            for g, m, s in zip(grid, mean, std):
                fh.write(f"{float(g)!r},{float(m)!r},{float(s)!r}\n")
        paths.append(mpath)

    if curves:
        cdir = os.path.join(out, "curves")
        os.makedirs(cdir, exist_ok=True)
        for i in sorted(curves):
            grid, chi, bettis = curves[i]
            cpath = os.path.join(cdir, f"trial_{i:05d}.csv")
            with open(cpath, "w") as fh:
                fh.write(_version_line() + "\n")
                fh.write("t,ec," + ",".join(f"beta{k}"
                                            for k in range(len(bettis))) + "\n")
                for j in range(len(grid)):
                    cells = [repr(float(grid[j])), str(int(chi[j]))]
                    cells += [str(int(b[j])) for b in bettis]
                    fh.write(",".join(cells) + "\n")
            paths.append(cpath)
    return paths


def read_trials_csv(path):
    """Parse a trials.csv back into TrialRecord objects."""
    records = []
    with open(path) as fh:
        lines = [ln.rstrip("\n") for ln in fh if not ln.startswith("#")]
    if not lines or lines[0] != TRIALS_HEADER:
        raise ValueError(f"{path}: unexpected trials header")
    for ln in lines[1:]:
        if not ln:
            continue
        (trial, seed, model, d, size, degree, first, births, t_ec, delta,
         cross, valid) = ln.split(",")
        records.append(TrialRecord(
            trial=int(trial), seed=int(seed), model=model, d=int(d),
            size=float(size) if any(c in size for c in ".eE") else int(size),
            degree=int(degree), first_birth=float(first),
            all_births=tuple(float(b) for b in births.split(";") if b),
            t_ec=float(t_ec), delta=float(delta), t_betti=float(cross),
            valid=bool(int(valid))))
    return records
