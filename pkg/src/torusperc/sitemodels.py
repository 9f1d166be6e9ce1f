"""Random site percolation complexes on torus lattices.

Two models over the flat torus T^d:

* cubical: the periodic grid of m^d unit cubes; each d-cell carries an
  iid Uniform(0,1) weight U_i and every lower face enters the filtration
  when the first incident d-cell opens (value = min over incident tops).
* permutahedral: the A*_d lattice quotient with m^d sites. The complex is
  the nerve-side clique complex of the site adjacency graph (each site
  has 2^{d+1} - 2 facet neighbors), filtered lower-star by the site
  weights (simplex value = max over its vertices).

Note on m=3: the lattice quotient itself is fine (adjacency degrees come
out right), but wrap-around triples such as {A, A+e1, A+2e1} are mutually
adjacent without sharing a face, so the clique complex stops being the
nerve. The Stirling count guard rejects those quotients; use m >= 4 for
complexes.

Structure (cell enumeration, boundaries, adjacency) depends only on
(d, m) and is cached; per-trial work is value assembly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .complexes import FilteredComplex
from .errors import CliqueCountMismatch, SizeTooSmall


# ---------------------------------------------------------------------------
# combinatorics

@lru_cache(maxsize=None)
def stirling2(n, k):
    """Stirling number of the second kind, by the standard recurrence."""
    if n == k:
        return 1
    if k == 0 or k > n:
        return 0
    return k * stirling2(n - 1, k) + stirling2(n - 1, k - 1)


def perm_face_count(d, n, k):
    """Number of k-dimensional polytopal faces of the permutahedral torus.

    Each d-cell has (d+1-k)! S(d+1, d+1-k) faces of dimension k and every
    k-face is shared by d+1-k cells, so the torus with n cells has
    n (d+1-k)! S(d+1, d+1-k) / (d+1-k) of them.
    """
    m = d + 1 - k
    return n * math.factorial(m) * stirling2(d + 1, m) // m


def perm_simplex_count(d, n, k):
    """Number of k-simplices of the nerve-side clique complex: n k! S(d+1, k+1)."""
    return n * math.factorial(k) * stirling2(d + 1, k + 1)


# ---------------------------------------------------------------------------
# periodic cubical grid structure

def _popcounts(d):
    return np.array([bin(m).count("1") for m in range(1 << d)], dtype=np.int8)


@dataclass(frozen=True)
class _GridStructure:
    d: int
    m: int
    dims: np.ndarray          # per cell id = flat*2^d + mask
    bnd_ptr: np.ndarray
    bnd_idx: np.ndarray
    down: tuple               # subset-translate index maps, len 2^d
    up: tuple

    @property
    def nsites(self):
        return self.m ** self.d


@lru_cache(maxsize=8)
def grid_structure(d, m):
    """Cells, boundaries and translate tables of the periodic grid torus.

    Cell id layout: id = site*2^d + mask, where mask's set bits are the
    axes along which the cell extends from its base vertex.
    """
    if m < 3:
        raise SizeTooSmall(f"periodic grid needs m >= 3, got {m}")
    shape = (m,) * d
    nsites = m ** d
    nbits = 1 << d
    coords = np.indices(shape).reshape(d, nsites)
    pop = _popcounts(d)

    def shifted(a, step):
        c = coords.copy()
        c[a] = (c[a] + step) % m
        return np.ravel_multi_index(c, shape)

    up_a = [shifted(a, +1) for a in range(d)]
    down_a = [shifted(a, -1) for a in range(d)]

    # translate tables for all axis subsets, composed one axis at a time
    up = [None] * nbits
    down = [None] * nbits
    up[0] = down[0] = np.arange(nsites)
    for mask in range(1, nbits):
        a = (mask & -mask).bit_length() - 1
        rest = mask & (mask - 1)
        up[mask] = up_a[a][up[rest]]
        down[mask] = down_a[a][down[rest]]

    dims = np.tile(pop, nsites)
    lens = 2 * dims.astype(np.int64)
    ptr = np.concatenate([[0], np.cumsum(lens)])
    idx = np.empty(int(lens.sum()), dtype=np.int64)
    site = np.arange(nsites, dtype=np.int64)
    for mask in range(1, nbits):
        base = site * nbits + mask
        slot = ptr[base]
        for a in range(d):
            bit = 1 << a
            if not mask & bit:
                continue
            fmask = mask ^ bit
            idx[slot] = site * nbits + fmask
            idx[slot + 1] = up_a[a] * nbits + fmask
            slot = slot + 2
    return _GridStructure(d, m, dims, ptr, idx, tuple(down), tuple(up))


def _submasks(mask):
    """All subsets of a bitmask, including 0 and itself."""
    out = []
    s = mask
    while True:
        out.append(s)
        if s == 0:
            return out
        s = (s - 1) & mask


def gen_cubical_complex(d, m, seed=None, site_values=None):
    """Random cubical site complex Q(n, p) on the m^d torus grid.

    Site weights are iid Uniform(0,1) drawn from `seed` unless
    `site_values` (shape (m^d,) or (m,)*d, flat C order) overrides them.
    Each k-face gets the min weight over its 2^{d-k} incident d-cells.
    """
    g = grid_structure(d, m)
    nbits = 1 << d
    full = nbits - 1
    if site_values is None:
        u = np.random.default_rng(seed).random(g.nsites)
    else:
        u = np.asarray(site_values, dtype=np.float64).reshape(g.nsites)
    vals = np.empty((g.nsites, nbits))
    for mask in range(nbits):
        comp = full ^ mask
        v = u
        for t in _submasks(comp):
            if t:
                v = np.minimum(v, u[g.down[t]])
        vals[:, mask] = v
    cx = FilteredComplex(d, g.dims, vals.ravel(), (g.bnd_ptr, g.bnd_idx),
                         param="p")
    cx.model = "cubical"
    cx.model_args = {"d": d, "m": m}
    cx.site_values = u
    return cx


def expected_ec_cubical(d, n, p):
    """Expected EC of Q(n, p): n sum_k (-1)^k C(d,k) (1-(1-p)^(2^(d-k)))."""
    p = np.asarray(p, dtype=np.float64)
    q = 1.0 - p
    tot = np.zeros_like(p)
    for k in range(d + 1):
        tot += (-1) ** k * math.comb(d, k) * (1.0 - q ** (2 ** (d - k)))
    return n * tot


# ---------------------------------------------------------------------------
# permutahedral lattice

@dataclass(frozen=True)
class PermLattice:
    """A*_d torus quotient: m^d sites with their facet-neighbor offsets."""

    d: int
    m: int
    basis: np.ndarray      # (d, d+1) rows spanning the sum-zero hyperplane
    offsets: np.ndarray    # (2^{d+1}-2, d) coordinate offsets of facet neighbors
    neighbors: np.ndarray  # (nsites, 2^{d+1}-2) neighbor flat ids

    @property
    def nsites(self):
        return self.m ** self.d


@lru_cache(maxsize=8)
def gen_perm_lattice(d, m):
    """Build the A*_d quotient lattice with m^d sites.

    The lattice is the projection of Z^{d+1} onto the sum-zero hyperplane;
    basis vector i is e_i - (1/(d+1)) * ones, scaled so the shortest
    neighbor distance is 1. Adjacency is read off the smallest nonzero
    torus-distance classes and must account for exactly 2^{d+1} - 2 facet
    neighbors, matching the permutahedron facet count.
    """
    if m < 3:
        raise SizeTooSmall(f"permutahedral quotient needs m >= 3, got {m}")
    basis = np.eye(d, d + 1) - 1.0 / (d + 1)

    # candidate coordinate offsets and their torus distances under m*lattice
    if m <= 4:
        ranges = [np.arange(m)] * d
    else:
        ranges = [np.arange(-2, 3)] * d
    cand = np.stack(np.meshgrid(*ranges, indexing="ij"), -1).reshape(-1, d)
    cand = cand[np.any(cand % m != 0, axis=1)]
    wraps = np.stack(np.meshgrid(*([np.arange(-1, 2)] * d), indexing="ij"),
                     -1).reshape(-1, d)
    disp = (cand[:, None, :] + m * wraps[None, :, :]) @ basis
    dist2 = (disp ** 2).sum(-1).min(1)

    order = np.argsort(dist2, kind="stable")
    dist2 = dist2[order]
    cand = cand[order]
    classes = np.unique(np.round(dist2, 9))
    want = 2 ** (d + 1) - 2
    taken = 0
    cut = None
    for c in classes:
        taken = int((np.round(dist2, 9) <= c).sum())
        if taken >= want:
            cut = c
            break
    if taken != want:
        raise RuntimeError(
            f"adjacency classes give {taken} neighbors, expected {want}")
    offsets = cand[np.round(dist2, 9) <= cut] % m
    scale = 1.0 / math.sqrt(dist2[0])
    basis = basis * scale

    shape = (m,) * d
    coords = np.indices(shape).reshape(d, m ** d)
    nbr = np.empty((m ** d, len(offsets)), dtype=np.int64)
    for j, off in enumerate(offsets):
        nbr[:, j] = np.ravel_multi_index((coords + off[:, None]) % m, shape)
    if (nbr == np.arange(m ** d)[:, None]).any():
        raise SizeTooSmall(f"m={m} makes some site its own neighbor")
    return PermLattice(d, m, basis, offsets, nbr)


@dataclass(frozen=True)
class _PermStructure:
    d: int
    m: int
    simplices: tuple       # per dim k: (count, k+1) vertex array
    bnd_ptr: np.ndarray
    bnd_idx: np.ndarray
    dims: np.ndarray


@lru_cache(maxsize=8)
def perm_structure(d, m):
    """Clique complex skeleton of the A*_d quotient, with count checks."""
    lat = gen_perm_lattice(d, m)
    n = lat.nsites
    fwd = []
    for i in range(n):
        row = lat.neighbors[i]
        fwd.append(np.unique(row[row > i]))
    layers = [np.arange(n, dtype=np.int64)[:, None]]
    common = {i: fwd[i] for i in range(n)}
    for k in range(1, d + 2):
        prev = layers[-1]
        out = []
        for row in prev:
            cand = common[int(row[0])]
            for v in row[1:]:
                cand = np.intersect1d(cand, fwd[int(v)], assume_unique=True)
            for j in cand:
                out.append(np.append(row, j))
        cur = (np.array(out, dtype=np.int64) if out
               else np.empty((0, k + 1), dtype=np.int64))
        if k == d + 1:
            if len(cur):
                raise CliqueCountMismatch(
                    f"found {len(cur)} ({d+1})-simplices; nerve dimension "
                    f"should be {d}")
            break
        layers.append(cur)
    for k, layer in enumerate(layers):
        want = perm_simplex_count(d, n, k)
        if len(layer) != want:
            raise CliqueCountMismatch(
                f"dim {k}: {len(layer)} simplices, closed form says {want}")

    ids = {}
    next_id = 0
    for layer in layers:
        for row in layer:
            ids[tuple(row)] = next_id
            next_id += 1
    dims = np.concatenate([np.full(len(l), k, dtype=np.int8)
                           for k, l in enumerate(layers)])
    bnd = []
    ptr = [0]
    for k, layer in enumerate(layers):
        for row in layer:
            if k:
                t = tuple(row)
                for drop in range(k + 1):
                    bnd.append(ids[t[:drop] + t[drop + 1:]])
            ptr.append(len(bnd))
    return _PermStructure(d, m, tuple(layers),
                          np.asarray(ptr, dtype=np.int64),
                          np.asarray(bnd, dtype=np.int64), dims)


def gen_perm_complex(d, m, seed=None, site_values=None):
    """Random permutahedral site complex P(n, p) as a lower-star clique complex.

    Vertices are the n = m^d sites with iid Uniform(0,1) weights; a
    simplex of mutually adjacent sites enters at the max of its vertex
    weights.
    """
    st = perm_structure(d, m)
    n = m ** d
    if site_values is None:
        u = np.random.default_rng(seed).random(n)
    else:
        u = np.asarray(site_values, dtype=np.float64).reshape(n)
    vals = np.concatenate([u[layer].max(axis=1) for layer in st.simplices])
    cx = FilteredComplex(d, st.dims, vals, (st.bnd_ptr, st.bnd_idx), param="p")
    cx.model = "perm"
    cx.model_args = {"d": d, "m": m}
    cx.site_values = u
    return cx


def expected_ec_perm(d, n, p):
    """Expected EC of P(n, p) via the polytopal face-count sum.

    sum_k (-1)^k F_k (1 - (1-p)^(d+1-k)) with F_k = perm_face_count(d,n,k):
    a k-face of the tessellation is covered as soon as any of its d+1-k
    incident sites opens.
    """
    p = np.asarray(p, dtype=np.float64)
    q = 1.0 - p
    tot = np.zeros_like(p)
    for k in range(d + 1):
        tot += (-1) ** k * perm_face_count(d, 1, k) * (1.0 - q ** (d + 1 - k))
    return n * tot


# ---------------------------------------------------------------------------

def complement_filtration(cx):
    """Same combinatorial complex with site weights U replaced by 1 - U."""
    gens = {"cubical": gen_cubical_complex, "perm": gen_perm_complex}
    gen = gens[cx.model]
    return gen(cx.model_args["d"], cx.model_args["m"],
               site_values=1.0 - cx.site_values)
