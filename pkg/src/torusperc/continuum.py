"""Continuum models on the flat torus: Poisson-Boolean and Gaussian fields.

The Boolean model is a Poisson point process with balls of radius r; its
filtration is the periodic Cech complex, with simplex value the radius of
the smallest ball enclosing the (unwrapped) vertices. The occupancy
parameter is lambda = omega_d * n * r^d.

The Gaussian field is synthesized spectrally on a periodic grid from the
wrapped squared-exponential kernel; its filtration is the sublevel
cubical complex (cell value = max over the cell's vertices).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np
from scipy.spatial import cKDTree

from .complexes import FilteredComplex
from .errors import RadiusTooLarge, SpectrumNotPSD, UnsupportedDimension
from .sitemodels import grid_structure, _submasks

BALL_VOLUME = {2: math.pi, 3: 4 * math.pi / 3, 4: math.pi ** 2 / 2}


def _ball_volume(d):
    try:
        return BALL_VOLUME[d]
    except KeyError:
        raise UnsupportedDimension(f"d={d} not in {{2,3,4}}") from None


# ---------------------------------------------------------------------------
# Poisson process and radius/occupancy conversions

@dataclass(frozen=True)
class TorusPointSet:
    """Points in [0,1)^d plus the Poisson intensity they were drawn with."""

    points: np.ndarray
    intensity: float

    @property
    def d(self):
        return self.points.shape[1]

    def __len__(self):
        return len(self.points)


def sample_poisson_torus(n, d, seed=None):
    """Poisson(n)-many iid uniform points on the unit d-torus."""
    rng = np.random.default_rng(seed)
    count = int(rng.poisson(n))
    return TorusPointSet(rng.random((count, d)), float(n))


def lambda_from_radius(r, n, d):
    """Occupancy lambda = omega_d * n * r^d."""
    return _ball_volume(d) * n * np.asarray(r, dtype=np.float64) ** d


def radius_from_lambda(lam, n, d):
    """Radius giving occupancy lambda: r = (lambda / (omega_d n))^(1/d)."""
    return (np.asarray(lam, dtype=np.float64) / (_ball_volume(d) * n)) ** (1.0 / d)


def dump_points(pts, fh):
    """One comma-separated row per point."""
    for row in pts.points:
        fh.write(",".join(repr(float(x)) for x in row) + "\n")


# ---------------------------------------------------------------------------
# smallest enclosing balls

def _seb_batch(X):
    """Smallest-enclosing-ball radii for a batch of point tuples.

    X has shape (B, s, dim) with s <= 6. The SEB of each tuple is the
    smallest of the circumballs (over all support subsets, center in the
    subset's affine hull) that contain every point; affinely degenerate
    subsets are skipped since a smaller subset then supports the same
    ball.
    """
    B, s, dim = X.shape
    if B == 0:
        return np.empty(0)
    best = np.full(B, np.inf)
    d2 = ((X[:, :, None, :] - X[:, None, :, :]) ** 2).sum(-1)
    for t in range(2, s + 1):
        for subset in combinations(range(s), t):
            p0 = X[:, subset[0], :]
            rel = X[:, subset[1:], :] - p0[:, None, :]
            G = rel @ rel.transpose(0, 2, 1)
            rhs = 0.5 * np.einsum("bij,bij->bi", rel, rel)
            det = np.linalg.det(G)
            diag = np.einsum("bii->bi", G)
            ok = np.abs(det) > 1e-9 * np.maximum(diag.prod(axis=1), 1e-300)
            if not ok.any():
                continue
            coef = np.linalg.solve(G[ok], rhs[ok][..., None])[..., 0]
            center = p0[ok] + np.einsum("bi,bij->bj", coef, rel[ok])
            r2 = ((center - p0[ok]) ** 2).sum(-1)
            dist2 = ((X[ok] - center[:, None, :]) ** 2).sum(-1).max(-1)
            contains = dist2 <= r2 * (1 + 1e-9) + 1e-30
            cand = np.where(contains, r2, np.inf)
            idx = np.flatnonzero(ok)
            best[idx] = np.minimum(best[idx], cand)
    # the true SEB support set is affinely independent, so some candidate
    # always lands; all-coincident tuples are the one exception
    coincident = d2.max(axis=(1, 2)) == 0.0
    best[coincident] = 0.0
    return np.sqrt(best)


def seb_radius(points):
    """Exact smallest enclosing ball radius of one small point tuple."""
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim != 2:
        raise ValueError("expected (k, dim) array")
    if len(pts) == 1:
        return 0.0
    return float(_seb_batch(pts[None, :, :])[0])


# ---------------------------------------------------------------------------
# periodic Cech filtration

def _unwrap(targets, base):
    """Nearest periodic copy of each target relative to the base point."""
    return base + ((targets - base + 0.5) % 1.0 - 0.5)


def cech_filtration_periodic(pts, r_max, max_dim=None):
    """Periodic Cech complex on the unit torus, truncated at r_max.

    A k-simplex enters at the radius of the smallest ball enclosing its
    vertices, computed after unwrapping each vertex to the copy nearest
    the first one; r_max < 0.25 keeps that unwrapping unambiguous.
    Simplices are enumerated up to dimension max_dim (default: the
    ambient d). Values are clamped to be monotone over faces, which only
    moves them by float dust.
    """
    P = np.mod(np.asarray(pts.points, dtype=np.float64), 1.0)
    n_pts, d = P.shape if P.ndim == 2 else (0, pts.d)
    if r_max >= 0.25:
        raise RadiusTooLarge(f"r_max={r_max} >= 0.25 torus period quarter")
    if r_max <= 0:
        raise ValueError("r_max must be positive")
    if max_dim is None:
        max_dim = d

    dims = [np.zeros(n_pts, dtype=np.int8)]
    values = [np.zeros(n_pts)]
    rows_by_dim = [np.arange(n_pts, dtype=np.int64)[:, None]]

    if n_pts > 1 and max_dim >= 1:
        tree = cKDTree(P, boxsize=1.0)
        pairs = tree.query_pairs(2.0 * r_max, output_type="ndarray")
        if len(pairs):
            pairs = pairs[np.lexsort((pairs[:, 1], pairs[:, 0]))]
            delta = _unwrap(P[pairs[:, 1]], P[pairs[:, 0]]) - P[pairs[:, 0]]
            evals = 0.5 * np.sqrt((delta ** 2).sum(1))
            keep = evals <= r_max
            pairs, evals = pairs[keep], evals[keep]
        if len(pairs):
            rows_by_dim.append(pairs.astype(np.int64))
            values.append(evals)
            dims.append(np.ones(len(pairs), dtype=np.int8))

    fwd = [np.empty(0, dtype=np.int64)] * n_pts
    if len(rows_by_dim) > 1:
        e = rows_by_dim[1]
        order = np.argsort(e[:, 0], kind="stable")
        bounds = np.searchsorted(e[order, 0], np.arange(n_pts))
        bounds = np.append(bounds, len(e))
        for i in range(n_pts):
            fwd[i] = e[order[bounds[i]:bounds[i + 1]], 1]

    # id maps for boundary assembly, per dimension
    id_maps = [None]
    offset = n_pts
    if len(rows_by_dim) > 1:
        id_maps.append({(int(a), int(b)): offset + t
                        for t, (a, b) in enumerate(rows_by_dim[1])})
        offset += len(rows_by_dim[1])

    k = 2
    while k <= max_dim and len(rows_by_dim) == k and len(rows_by_dim[k - 1]):
        prev_rows = rows_by_dim[k - 1]
        prev_vals = values[k - 1]
        prev_map = id_maps[k - 1]
        ext_rows = []
        ext_src = []
        for ridx, row in enumerate(prev_rows):
            cand = fwd[int(row[0])]
            for v in row[1:]:
                if not len(cand):
                    break
                cand = np.intersect1d(cand, fwd[int(v)], assume_unique=True)
            for j in cand:
                ext_rows.append(np.append(row, j))
                ext_src.append(ridx)
        if not ext_rows:
            break
        cand_rows = np.array(ext_rows, dtype=np.int64)
        base = P[cand_rows[:, 0]]
        X = np.stack([_unwrap(P[cand_rows[:, c]], base)
                      for c in range(k + 1)], axis=1)
        radii = _seb_batch(X)

        # all k+1 facets must already be present; take the monotone max
        face_val = prev_vals[np.asarray(ext_src)]
        ok = radii <= r_max
        rows_out, vals_out, bnd_out = [], [], []
        prev_base = offset - len(prev_rows)
        for c in np.flatnonzero(ok):
            row = cand_rows[c]
            t = tuple(int(v) for v in row)
            fids = []
            vmax = float(face_val[c])
            for drop in range(k + 1):
                fid = prev_map.get(t[:drop] + t[drop + 1:])
                if fid is None:
                    fids = None
                    break
                fids.append(fid)
                vmax = max(vmax, prev_vals[fid - prev_base])
            if fids is None or vmax > r_max:
                continue
            rows_out.append(row)
            vals_out.append(max(float(radii[c]), vmax))
            bnd_out.append(fids)
        if not rows_out:
            break
        rows_arr = np.array(rows_out, dtype=np.int64)
        id_maps.append({tuple(int(v) for v in row): offset + t
                        for t, row in enumerate(rows_arr)})
        rows_by_dim.append(rows_arr)
        values.append(np.array(vals_out))
        dims.append(np.full(len(rows_arr), k, dtype=np.int8))
        offset += len(rows_arr)
        k += 1

    # assemble CSR boundary
    total = sum(len(v) for v in values)
    all_dims = np.concatenate(dims) if dims else np.empty(0, dtype=np.int8)
    all_vals = np.concatenate(values) if values else np.empty(0)
    bnd = []
    ptr = [0]
    for kk, rows in enumerate(rows_by_dim):
        if kk == 0:
            for _ in range(len(rows)):
                ptr.append(len(bnd))
            continue
        prev_map = id_maps[kk - 1] if kk >= 2 else None
        for row in rows:
            t = tuple(int(v) for v in row)
            if kk == 1:
                bnd.extend(t)
            else:
                for drop in range(kk + 1):
                    bnd.append(prev_map[t[:drop] + t[drop + 1:]])
            ptr.append(len(bnd))
    cx = FilteredComplex(d, all_dims, all_vals,
                         (np.asarray(ptr, dtype=np.int64),
                          np.asarray(bnd, dtype=np.int64)), param="r")
    cx.model = "cech"
    cx.model_args = {"d": d, "n": pts.intensity, "r_max": float(r_max)}
    assert total == cx.ncells
    return cx


def expected_ec_boolean(d, n, lam):
    """Expected EC of the Boolean model at occupancy lambda.

    Closed forms exist for d=2 and d=3 only; higher d falls back on the
    Monte Carlo estimator in the analysis module.
    """
    lam = np.asarray(lam, dtype=np.float64)
    if d == 2:
        return n * np.exp(-lam) * (1.0 - lam)
    if d == 3:
        return n * np.exp(-lam) * (1.0 - 3.0 * lam
                                   + (3.0 / 32.0) * math.pi ** 2 * lam ** 2)
    raise UnsupportedDimension(
        f"no closed-form Boolean EC for d={d}; use the Monte Carlo estimator")


# ---------------------------------------------------------------------------
# Gaussian random field

def grf_spectrum(g, d, sigma2):
    """Eigenvalues of the wrapped squared-exponential circulant kernel.

    Negative eigenvalues below -1e-10 (relative to the largest) mean the
    wrapped kernel is not PSD at this (g, sigma2); tiny negatives are
    clipped to zero.
    """
    axis = np.minimum(np.arange(g), g - np.arange(g)) / g
    dist2 = np.zeros((g,) * d)
    for a in range(d):
        shape = [1] * d
        shape[a] = g
        dist2 = dist2 + (axis ** 2).reshape(shape)
    kernel = np.exp(-dist2 / sigma2)
    lam = np.fft.fftn(kernel).real
    lmax = lam.max()
    if lam.min() < -1e-10 * lmax:
        raise SpectrumNotPSD(
            f"min eigenvalue {lam.min():.3e} vs max {lmax:.3e} at g={g}, "
            f"sigma2={sigma2}")
    return np.clip(lam, 0.0, None)


def sample_grf_torus(g, d, sigma2, seed=None):
    """Stationary zero-mean unit-variance Gaussian field on the grid torus.

    Spectral synthesis: scale the DFT of white noise by the square root
    of the circulant spectrum and invert; renormalizing by the clipped
    spectrum mean restores exact unit variance.
    """
    lam = grf_spectrum(g, d, sigma2)
    rng = np.random.default_rng(seed)
    z = rng.standard_normal((g,) * d)
    f = np.fft.ifftn(np.sqrt(lam) * np.fft.fftn(z)).real
    return f / math.sqrt(lam.mean())


def dump_field(field, sigma2, seed, fh):
    """Row-major CSV dump with a metadata header line."""
    g = field.shape[0]
    d = field.ndim
    fh.write(f"# d={d} g={g} sigma2={sigma2!r} seed={seed}\n")
    for row in field.reshape(-1, g):
        fh.write(",".join(repr(float(x)) for x in row) + "\n")


def sublevel_cubical_filtration(field):
    """Sublevel-set filtration of a grid function on the torus.

    Vertices carry the field values; every higher cell appears when its
    last vertex does (value = max over the cell's 2^k corners).
    """
    field = np.asarray(field, dtype=np.float64)
    d = field.ndim
    g = field.shape[0]
    if field.shape != (g,) * d:
        raise ValueError("field must be a d-cube of equal axis lengths")
    st = grid_structure(d, g)
    nbits = 1 << d
    f = field.reshape(-1)
    vals = np.empty((st.nsites, nbits))
    for mask in range(nbits):
        v = f
        for t in _submasks(mask):
            if t:
                v = np.maximum(v, f[st.up[t]])
        vals[:, mask] = v
    cx = FilteredComplex(d, st.dims, vals.ravel(),
                         (st.bnd_ptr, st.bnd_idx), param="alpha")
    cx.model = "grf"
    cx.model_args = {"d": d, "g": g}
    cx.vertex_values = f
    return cx


def hermite(n, x):
    """Probabilists' Hermite polynomial H_n, by its explicit sum."""
    x = np.asarray(x, dtype=np.float64)
    tot = np.zeros_like(x)
    for j in range(n // 2 + 1):
        tot = tot + ((-1) ** j * x ** (n - 2 * j)
                     / (math.factorial(j) * math.factorial(n - 2 * j) * 2 ** j))
    return math.factorial(n) * tot


def expected_ec_grf(d, alpha):
    """Expected EC of the sublevel set at alpha, unit-variance field."""
    alpha = np.asarray(alpha, dtype=np.float64)
    pref = (2.0 / _ball_volume(d)) * (2 * math.pi) ** (-(d + 1) / 2)
    return pref * hermite(d - 1, -alpha) * np.exp(-alpha ** 2 / 2)
