"""Persistent homology of filtered complexes by GF(2) boundary reduction.

Columns are kept as Python sets of row positions in filtration order;
column addition is symmetric difference and the pivot is the maximum
entry. The default path processes dimensions top-down and clears columns
already identified as pivot rows (the "twist" shortcut); the plain
single-pass variant is kept both as a reference and for the determinism
check, since the two must produce bit-identical barcodes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .complexes import StepCurve, filtration_order, validate_complex
from .errors import EssentialCountMismatch

INF = math.inf


@dataclass(frozen=True)
class Interval:
    """Half-open persistence interval [birth, death) in one degree."""

    birth: float
    death: float
    degree: int

    @property
    def essential(self):
        return math.isinf(self.death)


class Barcode:
    """Intervals grouped by degree plus reduction diagnostics.

    zero_length_dropped counts the (birth == death) pairs that were
    removed per degree; they never contribute to Betti or EC curves but
    their number is a useful monotonicity diagnostic.
    """

    def __init__(self, ambient_dim, max_degree, intervals, zero_length_dropped):
        self.ambient_dim = ambient_dim
        self.max_degree = max_degree
        self.intervals = tuple(sorted(
            intervals, key=lambda iv: (iv.degree, iv.birth, iv.death)))
        self.zero_length_dropped = dict(zero_length_dropped)
        self._by_degree = {}
        for iv in self.intervals:
            self._by_degree.setdefault(iv.degree, []).append(iv)

    def degree(self, k):
        """Intervals of one degree, sorted by (birth, death)."""
        return list(self._by_degree.get(k, []))

    def essential(self, k):
        """Births of infinite intervals in degree k, sorted (unchecked)."""
        return [iv.birth for iv in self._by_degree.get(k, []) if iv.essential]

    def __len__(self):
        return len(self.intervals)

    def __eq__(self, other):
        return (isinstance(other, Barcode)
                and self.intervals == other.intervals
                and self.zero_length_dropped == other.zero_length_dropped)

    def __repr__(self):
        per = {k: len(v) for k, v in sorted(self._by_degree.items())}
        return f"Barcode(d={self.ambient_dim}, intervals_by_degree={per})"


def _reduce_twist(order, dims_sorted, bnd_pos, ptr, qmax):
    """Top-down reduction with clearing. Returns (pairs, paired mask)."""
    n = len(order)
    cols = {}
    pivot_of = {}
    cleared = np.zeros(n, dtype=bool)
    pairs = []
    get = pivot_of.get
    for q in range(qmax, 0, -1):
        for pos in np.flatnonzero(dims_sorted == q):
            if cleared[pos]:
                continue
            pos = int(pos)
            ci = order[pos]
            col = set(bnd_pos[ptr[ci]:ptr[ci + 1]].tolist())
            while col:
                piv = max(col)
                other = get(piv)
                if other is None:
                    pivot_of[piv] = pos
                    cols[pos] = col
                    cleared[piv] = True
                    pairs.append((piv, pos))
                    break
                col ^= cols[other]
    return pairs


def _reduce_plain(order, dims_sorted, bnd_pos, ptr, qmax):
    """Single ascending pass over all columns, no clearing."""
    cols = {}
    pivot_of = {}
    pairs = []
    get = pivot_of.get
    for pos in range(len(order)):
        q = dims_sorted[pos]
        if q == 0 or q > qmax:
            continue
        ci = order[pos]
        col = set(bnd_pos[ptr[ci]:ptr[ci + 1]].tolist())
        while col:
            piv = max(col)
            other = get(piv)
            if other is None:
                pivot_of[piv] = pos
                cols[pos] = col
                pairs.append((piv, pos))
                break
            col ^= cols[other]
    return pairs


def compute_persistence(cx, max_degree=None, clearing=True):
    """Barcode of the filtration in degrees 0..max_degree.

    Parameters
    ----------
    cx : FilteredComplex
        Must pass validate_complex; validation errors propagate.
    max_degree : int, optional
        Defaults to the ambient dimension. Columns of cell dimension
        above max_degree + 1 are never reduced.
    clearing : bool
        Use the top-down clearing order. Output is identical either way.
    """
    validate_complex(cx).raise_for()
    if max_degree is None:
        max_degree = cx.ambient_dim
    n = cx.ncells
    order = filtration_order(cx)
    pos_of = np.empty(n, dtype=np.int64)
    pos_of[order] = np.arange(n)
    dims_sorted = cx.dims[order]
    values_sorted = cx.values[order]
    bnd_pos = pos_of[cx.bnd_idx] if len(cx.bnd_idx) else cx.bnd_idx
    qmax = min(int(dims_sorted.max(initial=0)), max_degree + 1)

    reduce = _reduce_twist if clearing else _reduce_plain
    pairs = reduce(order, dims_sorted, bnd_pos, cx.bnd_ptr, qmax)

    paired = np.zeros(n, dtype=bool)
    intervals = []
    dropped = {k: 0 for k in range(max_degree + 1)}
    for i, j in pairs:
        paired[i] = paired[j] = True
        k = int(dims_sorted[i])
        if k > max_degree:
            continue
        b, d = float(values_sorted[i]), float(values_sorted[j])
        if b == d:
            dropped[k] += 1
        else:
            intervals.append(Interval(b, d, k))
    unpaired = np.flatnonzero(~paired & (dims_sorted <= max_degree))
    for pos in unpaired:
        intervals.append(Interval(float(values_sorted[pos]), INF,
                                  int(dims_sorted[pos])))
    return Barcode(cx.ambient_dim, max_degree, intervals, dropped)


def betti_curve(bc, k):
    """Betti number of degree k along the filtration, as a step curve."""
    ivs = bc.degree(k)
    times = []
    deltas = []
    for iv in ivs:
        times.append(iv.birth)
        deltas.append(1)
        if not iv.essential:
            times.append(iv.death)
            deltas.append(-1)
    return StepCurve.from_events(np.asarray(times, dtype=np.float64),
                                 np.asarray(deltas, dtype=np.int64))


def essential_births(bc, k):
    """Sorted births of the infinite intervals in degree k.

    The count must equal binomial(d, k) for a filtration whose final
    complex carries the full torus homology; anything else raises
    EssentialCountMismatch.
    """
    births = bc.essential(k)
    expected = math.comb(bc.ambient_dim, k)
    if len(births) != expected:
        raise EssentialCountMismatch(k, expected, len(births))
    return births
