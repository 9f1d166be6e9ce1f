"""Zero finding on EC curves, Betti crossing times, and gap records.

Expected EC curves for each model are root-found on their natural
parameter domains (occupancy p, intensity lambda, or level alpha); the
number of interior zeros must equal d-1. Empirical curves are averaged
over trials on a fixed grid and their zeros read off by interpolation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .complexes import StepCurve, euler_curve_from_counts
from .continuum import (
    cech_filtration_periodic,
    expected_ec_boolean,
    expected_ec_grf,
    radius_from_lambda,
    sample_grf_torus,
    sample_poisson_torus,
    sublevel_cubical_filtration,
)
from .errors import (
    DegreeMismatch,
    NoBracketsFound,
    NotFound,
    ZeroCountMismatch,
)
from .persistence import betti_curve, compute_persistence
from .seeding import trial_seed
from .sitemodels import (
    expected_ec_cubical,
    expected_ec_perm,
    gen_cubical_complex,
    gen_perm_complex,
)

SCAN_PANELS = 10_000
GRF_LEVEL_RANGE = (-5.0, 5.0)


def find_zeros(f, lo, hi, tol=1e-13):
    """All sign-change roots of f on [lo, hi], bisected to width < tol.

    The interval is scanned on a uniform 10^4-panel grid; each bracket is
    bisected, and exact zeros landing on grid points are returned as-is.
    Multiple roots inside one panel collapse to at most one report (an
    even-multiplicity pair inside a panel is invisible to the scan).
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    if not hi > lo:
        raise ValueError("need hi > lo")
    # lo + span * (i / N) keeps dyadic interior points exact, so symmetric
    # curves report their central zero exactly
    xs = lo + (hi - lo) * (np.arange(SCAN_PANELS + 1) / SCAN_PANELS)
    xs[0], xs[-1] = lo, hi
    try:
        ys = np.asarray(f(xs), dtype=np.float64)
        if ys.shape != xs.shape:
            raise TypeError
    except (TypeError, ValueError):
        ys = np.array([float(f(x)) for x in xs])

    zeros = [float(x) for x, y in zip(xs, ys) if y == 0.0]
    sign = np.sign(ys)
    for i in np.flatnonzero(sign[:-1] * sign[1:] < 0):
        a, b = float(xs[i]), float(xs[i + 1])
        fa = float(ys[i])
        while b - a >= tol:
            m = 0.5 * (a + b)
            fm = float(f(m))
            if fm == 0.0:
                a = b = m
                break
            if (fm > 0) == (fa > 0):
                a, fa = m, fm
            else:
                b = m
        zeros.append(0.5 * (a + b))
    if not zeros:
        raise NoBracketsFound(f"no sign change on [{lo}, {hi}]")
    return sorted(zeros)


@dataclass(frozen=True)
class EcZeroSet:
    """Interior zeros of a model's expected (or averaged) EC curve."""

    model: str
    d: int
    domain: tuple
    zeros: tuple

    def __post_init__(self):
        zs = tuple(float(z) for z in self.zeros)
        if any(b <= a for a, b in zip(zs, zs[1:])):
            raise ValueError("zeros must be strictly increasing")
        object.__setattr__(self, "zeros", zs)

    def __len__(self):
        return len(self.zeros)


def _interior(zeros, lo, hi):
    return [z for z in zeros if lo < z < hi]


def ec_zero_set(model, d, *, lambda_hi=4.0, n=500.0, trials=40, seed=0,
                sigma2=1e-3, tol=1e-13):
    """Zeros of the model's expected EC curve, validated to count d-1.

    Site models are scanned over p in (0,1), the Boolean model over
    lambda in (0, lambda_hi), Gaussian fields over alpha in (-5, 5).
    Boolean d=4 has no closed form, so its zeros come from a Monte Carlo
    averaged curve (n, trials, seed control that run).
    """
    if model == "cubical":
        lo, hi = 0.0, 1.0
        zeros = find_zeros(lambda p: expected_ec_cubical(d, 1.0, p), lo, hi, tol)
    elif model == "perm":
        lo, hi = 0.0, 1.0
        zeros = find_zeros(lambda p: expected_ec_perm(d, 1.0, p), lo, hi, tol)
    elif model == "boolean":
        lo, hi = 0.0, float(lambda_hi)
        if d in (2, 3):
            zeros = find_zeros(lambda lam: expected_ec_boolean(d, 1.0, lam),
                               lo, hi, tol)
        else:
            grid = np.linspace(lo, hi, 401)[1:]
            _, zeros = monte_carlo_ec(model, d, n, trials, grid,
                                      seed=seed, sigma2=sigma2)
    elif model == "grf":
        lo, hi = GRF_LEVEL_RANGE
        zeros = find_zeros(lambda a: expected_ec_grf(d, a), lo, hi, tol)
    else:
        raise ValueError(f"unknown model {model!r}")

    inner = _interior(zeros, lo, hi)
    if len(inner) != d - 1:
        raise ZeroCountMismatch(d - 1, len(inner), inner)
    return EcZeroSet(model, d, (lo, hi), tuple(inner))


def _grid_zeros(x, y):
    """Zeros of a sampled curve: exact hits plus sign-change interpolation."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    zeros = []
    for i in np.flatnonzero(y == 0.0):
        if i > 0 and y[i - 1] == 0.0:
            continue  # report a flat zero plateau once
        zeros.append(float(x[i]))
    s = np.sign(y)
    for i in np.flatnonzero(s[:-1] * s[1:] < 0):
        zeros.append(float(x[i] - y[i] * (x[i + 1] - x[i]) / (y[i + 1] - y[i])))
    return sorted(zeros)


def empirical_ec_on_grid(model, d, size, grid, seed, *, sigma2=1e-3,
                         margin=1.5):
    """One trial's empirical EC curve evaluated on the parameter grid.

    Site models and fields use the alternating face-count curve of the
    generated complex. The Boolean model uses the alternating sum of
    Betti numbers in degrees < d, which equals the EC of the union of
    balls while the window is below the coverage radius.
    """
    if model == "cubical":
        return euler_curve_from_counts(gen_cubical_complex(d, size, seed=seed))(grid)
    if model == "perm":
        return euler_curve_from_counts(gen_perm_complex(d, size, seed=seed))(grid)
    if model == "grf":
        field = sample_grf_torus(size, d, sigma2, seed=seed)
        return euler_curve_from_counts(sublevel_cubical_filtration(field))(grid)
    if model == "boolean":
        lam_hi = float(np.max(grid))
        r_max = min(margin * float(radius_from_lambda(lam_hi, size, d)), 0.249)
        pts = sample_poisson_torus(size, d, seed=seed)
        cx = cech_filtration_periodic(pts, r_max)
        bc = compute_persistence(cx, max_degree=d - 1)
        r_grid = radius_from_lambda(np.asarray(grid, dtype=np.float64), size, d)
        chi = np.zeros(len(r_grid), dtype=np.int64)
        for k in range(d):
            chi = chi + (-1) ** k * betti_curve(bc, k)(r_grid)
        return chi
    raise ValueError(f"unknown model {model!r}")


def monte_carlo_ec(model, d, size, trials, grid, *, seed=0, sigma2=1e-3,
                   margin=1.5):
    """Average of per-trial empirical EC curves on a fixed grid.

    Returns the averaged curve as a StepCurve over the grid plus the
    zeros read off by exact hits and linear interpolation.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    grid = np.asarray(grid, dtype=np.float64)
    acc = np.zeros(len(grid))
    for i in range(trials):
        acc += empirical_ec_on_grid(model, d, size, grid,
                                    trial_seed(seed, i), sigma2=sigma2,
                                    margin=margin)
    mean = acc / trials
    return StepCurve(grid, mean), _grid_zeros(grid, mean)


def t_betti(bc, k):
    """First filtration value where beta_k catches up with beta_{k-1}.

    Smallest breakpoint t with beta_k(t) >= beta_{k-1}(t) and
    max(beta_k(t), beta_{k-1}(t)) > 0; the second clause skips the
    all-zero prefix before anything is born.
    """
    if not 1 <= k <= bc.ambient_dim - 1:
        raise ValueError(f"degree k={k} outside 1..{bc.ambient_dim - 1}")
    lower = betti_curve(bc, k - 1)
    upper = betti_curve(bc, k)
    ts = np.union1d(lower.t, upper.t)
    lo, up = lower(ts), upper(ts)
    hit = np.flatnonzero((up >= lo) & (np.maximum(up, lo) > 0))
    if len(hit) == 0:
        raise NotFound(f"beta_{k} never reaches beta_{k - 1}")
    return float(ts[hit[0]])


@dataclass(frozen=True)
class GapRecord:
    """Percolation-threshold estimate minus EC zero, for one degree."""

    degree: int
    t_perc: float
    t_ec: float
    delta: float


def gap_records(births, zero_set):
    """Pair the first essential birth per degree with the matching EC zero.

    births maps degree k (1..d-1) to that degree's essential birth values;
    zero k of the EcZeroSet is the comparison point for degree k.
    """
    d = zero_set.d
    if len(zero_set.zeros) != d - 1:
        raise DegreeMismatch(
            f"zero set has {len(zero_set.zeros)} zeros, expected {d - 1}")
    out = []
    for k in range(1, d):
        if k not in births or len(births[k]) == 0:
            raise DegreeMismatch(f"no essential births supplied for degree {k}")
        t_perc = float(min(births[k]))
        t_ec = float(zero_set.zeros[k - 1])
        if not np.isfinite(t_perc):
            raise DegreeMismatch(f"degree {k} birth is not finite")
        out.append(GapRecord(k, t_perc, t_ec, t_perc - t_ec))
    return out
