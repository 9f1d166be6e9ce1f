"""Simulation lab for homological percolation vs Euler curve zeros on flat tori."""

from .complexes import (
    Cell,
    FilteredComplex,
    StepCurve,
    dump_complex,
    euler_curve_from_counts,
    validate_complex,
)
from .persistence import Barcode, Interval, betti_curve, compute_persistence, essential_births

__version__ = "0.1.0"
