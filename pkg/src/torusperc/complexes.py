"""Filtered cell complexes over GF(2), validation, and integer step curves.

A complex is stored column-oriented: per-cell dimension, filtration value,
and a CSR-packed boundary (ids of codimension-1 faces). Cell ids are the
row indices 0..n-1 in construction order; filtration order is the
lexicographic sort by (value, dim, id), under which every face precedes
its cofaces whenever the monotonicity check passes.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass

import numpy as np

from .errors import DanglingBoundary, NonMonotoneFiltration


@dataclass(frozen=True)
class Cell:
    """One cell of a filtered complex."""

    id: int
    dim: int
    value: float
    boundary: tuple[int, ...]


class FilteredComplex:
    """Array-backed filtered complex.

    Parameters
    ----------
    ambient_dim : int
        Dimension d of the torus the complex lives in (or is built over).
    dims : array of int
        Cell dimensions, one per cell.
    values : array of float
        Filtration values, one per cell.
    boundary : sequence of sequences of int
        For each cell, the ids of its (dim-1)-faces. Empty for vertices.
    param : str
        Name of the filtration parameter ("p", "r", "alpha"), used in
        reports only.
    """

    def __init__(self, ambient_dim, dims, values, boundary, param="t"):
        self.ambient_dim = int(ambient_dim)
        self.dims = np.asarray(dims, dtype=np.int8)
        self.values = np.asarray(values, dtype=np.float64)
        n = len(self.dims)
        if len(self.values) != n:
            raise ValueError("dims and values length mismatch")
        if isinstance(boundary, tuple) and len(boundary) == 2 \
                and isinstance(boundary[0], np.ndarray):
            self.bnd_ptr, self.bnd_idx = boundary
        else:
            lens = np.fromiter((len(b) for b in boundary), dtype=np.int64, count=n)
            self.bnd_ptr = np.concatenate([[0], np.cumsum(lens)])
            self.bnd_idx = np.fromiter(
                (i for b in boundary for i in b), dtype=np.int64,
                count=int(lens.sum()))
        self.param = param

    @property
    def ncells(self):
        return len(self.dims)

    def boundary_of(self, i):
        return self.bnd_idx[self.bnd_ptr[i]:self.bnd_ptr[i + 1]]

    def cell(self, i):
        i = int(i)
        return Cell(i, int(self.dims[i]), float(self.values[i]),
                    tuple(int(b) for b in self.boundary_of(i)))

    def counts_by_dim(self):
        """Number of cells per dimension, length ambient_dim + 1 or more."""
        k = max(self.ambient_dim + 1, int(self.dims.max(initial=0)) + 1)
        return np.bincount(self.dims, minlength=k)

    def threshold_ids(self, t):
        """Ids of cells present at parameter value t (value <= t)."""
        return np.flatnonzero(self.values <= t)

    def __repr__(self):
        cnt = ",".join(str(c) for c in self.counts_by_dim())
        return f"FilteredComplex(d={self.ambient_dim}, cells_by_dim=[{cnt}])"


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    problem: str | None = None   # "dangling" or "nonmonotone"
    cell_id: int | None = None

    def raise_for(self):
        if self.ok:
            return
        if self.problem == "dangling":
            raise DanglingBoundary(self.cell_id)
        raise NonMonotoneFiltration(self.cell_id)


def validate_complex(cx):
    """Check boundary well-formedness and filtration monotonicity.

    Returns a ValidationReport naming the first violating cell id. The
    boundary rule (every boundary entry is an existing cell of dimension
    exactly one lower) is checked before monotonicity, since values of
    dangling entries are meaningless.
    """
    n = cx.ncells
    owner = np.repeat(np.arange(n), np.diff(cx.bnd_ptr))
    bad = (cx.bnd_idx < 0) | (cx.bnd_idx >= n)
    if bad.any():
        return ValidationReport(False, "dangling", int(owner[bad].min()))
    if n:
        safe_idx = cx.bnd_idx
        bad = cx.dims[safe_idx] != cx.dims[owner] - 1
        if bad.any():
            return ValidationReport(False, "dangling", int(owner[bad].min()))
        bad = cx.values[safe_idx] > cx.values[owner]
        if bad.any():
            return ValidationReport(False, "nonmonotone", int(owner[bad].min()))
    return ValidationReport(True)


def filtration_order(cx):
    """Cell ids sorted by (value, dim, id); faces precede cofaces."""
    n = cx.ncells
    return np.lexsort((np.arange(n), cx.dims, cx.values))


def dump_complex(cx, fh=None):
    """Write the plain-text debug dump, one cell per line.

    Line format: ``id dim value b1,b2,...`` with boundary ids
    comma-separated and omitted entirely for vertices. Values use the
    shortest round-trip float representation, so dumps are byte-stable.
    """
    out = fh or sys.stdout
    for i in range(cx.ncells):
        b = cx.boundary_of(i)
        line = f"{i} {int(cx.dims[i])} {float(cx.values[i])!r}"
        if len(b):
            line += " " + ",".join(str(int(x)) for x in b)
        out.write(line + "\n")


class StepCurve:
    """Right-continuous step function with strictly increasing breakpoints.

    The value on [t[i], t[i+1]) is y[i]; before the first breakpoint the
    curve is 0. Counting curves (EC, Betti) keep integer dtype so exact
    comparisons stay exact.
    """

    def __init__(self, t, y):
        self.t = np.asarray(t, dtype=np.float64)
        self.y = np.asarray(y)
        if self.t.ndim != 1 or self.t.shape != self.y.shape:
            raise ValueError("breakpoints and values must be 1d and equal length")
        if len(self.t) > 1 and not (np.diff(self.t) > 0).all():
            raise ValueError("breakpoints must be strictly increasing")

    @classmethod
    def from_events(cls, times, deltas):
        """Accumulate +-delta jumps at the given times into a step curve.

        Events at equal times merge; events whose merged jump is zero are
        dropped, so the representation is canonical.
        """
        times = np.asarray(times, dtype=np.float64)
        deltas = np.asarray(deltas)
        if times.size == 0:
            return cls(np.empty(0), np.empty(0, dtype=deltas.dtype))
        order = np.argsort(times, kind="stable")
        times, deltas = times[order], deltas[order]
        uniq, start = np.unique(times, return_index=True)
        jump = np.add.reduceat(deltas, start)
        keep = jump != 0
        return cls(uniq[keep], np.cumsum(jump[keep]))

    def __call__(self, x):
        x = np.asarray(x, dtype=np.float64)
        if len(self.t) == 0:
            out = np.zeros(x.shape, dtype=self.y.dtype)
            return out[()] if x.ndim == 0 else out
        idx = np.searchsorted(self.t, x, side="right") - 1
        scalar = idx.ndim == 0
        idx = np.atleast_1d(idx)
        out = np.where(idx >= 0, self.y[np.clip(idx, 0, None)], 0)
        return out[0] if scalar else out

    def __len__(self):
        return len(self.t)

    def __eq__(self, other):
        return (isinstance(other, StepCurve)
                and np.array_equal(self.t, other.t)
                and np.array_equal(self.y, other.y))

    def __repr__(self):
        return f"StepCurve({len(self.t)} breakpoints)"


def euler_curve_from_counts(cx):
    """Euler characteristic of the sublevel complex as a step curve.

    Alternating face-count sum: each cell contributes (-1)^dim at its
    filtration value. Integer-valued by construction.
    """
    signs = np.where(cx.dims % 2 == 0, 1, -1).astype(np.int64)
    return StepCurve.from_events(cx.values, signs)
