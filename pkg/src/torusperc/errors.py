"""Exception types shared across the package."""


class NonMonotoneFiltration(ValueError):
    """A cell has a filtration value below one of its boundary faces."""

    def __init__(self, cell_id, msg=""):
        self.cell_id = cell_id
        super().__init__(msg or f"cell {cell_id} precedes one of its faces")


class DanglingBoundary(ValueError):
    """A boundary entry points at a missing cell or one of the wrong dimension."""

    def __init__(self, cell_id, msg=""):
        self.cell_id = cell_id
        super().__init__(msg or f"cell {cell_id} has an invalid boundary entry")


class EssentialCountMismatch(ValueError):
    """Number of infinite intervals in some degree is not binomial(d, k)."""

    def __init__(self, degree, expected, got):
        self.degree = degree
        self.expected = expected
        self.got = got
        super().__init__(
            f"degree {degree}: expected {expected} essential intervals, got {got}"
        )


class SizeTooSmall(ValueError):
    """Grid side too small for a torus quotient without self-adjacency."""


class CliqueCountMismatch(ValueError):
    """Simplex counts of the lattice clique complex disagree with the closed form."""


class RadiusTooLarge(ValueError):
    """Requested Cech truncation radius reaches a quarter of the torus period."""


class UnsupportedDimension(ValueError):
    """No closed form implemented for this ambient dimension."""


class SpectrumNotPSD(ValueError):
    """Circulant covariance spectrum has a meaningfully negative eigenvalue."""


class NoBracketsFound(ValueError):
    """Scan found no sign change for any zero of the curve."""


class ZeroCountMismatch(ValueError):
    """Number of interior zeros of the EC curve differs from d - 1."""

    def __init__(self, expected, got, zeros=()):
        self.expected = expected
        self.got = got
        self.zeros = tuple(zeros)
        super().__init__(f"expected {expected} interior zeros, found {got}: {list(zeros)}")


class NotFound(LookupError):
    """A Betti crossing (or similar event) does not occur on the curve."""


class DegreeMismatch(ValueError):
    """Births and EC zeros disagree on the number of degrees."""


class NoValidTrials(RuntimeError):
    """Every trial of an experiment was flagged invalid."""
