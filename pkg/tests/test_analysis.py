"""Zero finding, crossing times, and gap records."""

import math

import numpy as np
import pytest

from torusperc.analysis import (
    EcZeroSet,
    GapRecord,
    ec_zero_set,
    empirical_ec_on_grid,
    find_zeros,
    gap_records,
    monte_carlo_ec,
    t_betti,
)
from torusperc.complexes import euler_curve_from_counts
from torusperc.continuum import expected_ec_boolean
from torusperc.errors import (
    DegreeMismatch,
    NoBracketsFound,
    NotFound,
    ZeroCountMismatch,
)
from torusperc.persistence import Barcode, Interval, compute_persistence
from torusperc.seeding import trial_seed
from torusperc.sitemodels import expected_ec_cubical, gen_cubical_complex

GOLDEN_ZERO = (3 - math.sqrt(5)) / 2

# interior roots of the closed-form EC polynomials, solved independently
# with numpy's companion-matrix root finder and frozen
CUBICAL_ZEROS = {
    2: [GOLDEN_ZERO],
    3: [0.11390460193867613, 0.6059907716830248],
    4: [0.03402920126887121, 0.25743159707613317, 0.7156713435507416],
}
PERM_ZEROS = {
    2: [0.5],
    3: [(3 - math.sqrt(3)) / 6, (3 + math.sqrt(3)) / 6],
    4: [(3 - math.sqrt(6)) / 6, 0.5, (3 + math.sqrt(6)) / 6],
}
BOOLEAN_ZEROS = {
    2: [1.0],
    3: [0.3772208682204357, 2.8650570083343734],
}
GRF_ZEROS = {
    2: [0.0],
    3: [-1.0, 1.0],
    4: [-math.sqrt(3), 0.0, math.sqrt(3)],
}


# ---------------------------------------------------------------------------
# find_zeros

def test_find_zeros_quadratic():
    zeros = find_zeros(lambda x: (x - 0.3) * (x - 0.7), 0.0, 1.0)
    assert len(zeros) == 2
    assert zeros[0] == pytest.approx(0.3, abs=1e-12)
    assert zeros[1] == pytest.approx(0.7, abs=1e-12)


def test_find_zeros_exact_grid_hit_returned_verbatim():
    zeros = find_zeros(lambda x: x - 0.5, 0.0, 1.0)
    assert zeros == [0.5]


def test_find_zeros_linear_hermite_factor():
    zeros = find_zeros(lambda a: -a, -5.0, 5.0)
    assert zeros == [0.0]


def test_find_zeros_accepts_vectorized_callables():
    zeros = find_zeros(lambda x: np.cos(x), 0.0, 4.0, tol=1e-14)
    assert len(zeros) == 1
    assert zeros[0] == pytest.approx(math.pi / 2, abs=1e-13)


def test_find_zeros_no_brackets():
    with pytest.raises(NoBracketsFound):
        find_zeros(lambda x: x * x + 1.0, -2.0, 2.0)


def test_find_zeros_rejects_bad_args():
    with pytest.raises(ValueError):
        find_zeros(lambda x: x, 0.0, 1.0, tol=0.0)
    with pytest.raises(ValueError):
        find_zeros(lambda x: x, 1.0, 1.0)


def test_find_zeros_collapses_roots_inside_one_panel():
    # three simple roots 2e-5 apart sit inside a single scan panel; the
    # one sign change yields a single reported root
    roots = (0.50002, 0.50004, 0.50006)

    def f(x):
        return (x - roots[0]) * (x - roots[1]) * (x - roots[2])

    zeros = find_zeros(f, 0.0, 1.0)
    assert len(zeros) == 1
    assert roots[0] - 1e-4 < zeros[0] < roots[2] + 1e-4


def test_find_zeros_even_pair_in_one_panel_is_invisible():
    def f(x):
        return (x - 0.50002) * (x - 0.50004) + 0.0 * x

    with pytest.raises(NoBracketsFound):
        find_zeros(f, 0.0, 1.0)


# ---------------------------------------------------------------------------
# ec_zero_set across models

@pytest.mark.parametrize("d", [2, 3, 4])
def test_ec_zero_set_cubical(d):
    zs = ec_zero_set("cubical", d)
    assert len(zs) == d - 1
    np.testing.assert_allclose(zs.zeros, CUBICAL_ZEROS[d], atol=1e-10)


@pytest.mark.parametrize("d", [2, 3, 4])
def test_ec_zero_set_perm(d):
    zs = ec_zero_set("perm", d)
    assert len(zs) == d - 1
    np.testing.assert_allclose(zs.zeros, PERM_ZEROS[d], atol=1e-10)
    # zero multiset symmetric under p -> 1-p
    mirrored = sorted(1.0 - z for z in zs.zeros)
    np.testing.assert_allclose(zs.zeros, mirrored, atol=1e-9)
    if d % 2 == 0:
        assert zs.zeros[(d - 1) // 2] == 0.5  # exactly


@pytest.mark.parametrize("d", [2, 3])
def test_ec_zero_set_boolean(d):
    zs = ec_zero_set("boolean", d)
    np.testing.assert_allclose(zs.zeros, BOOLEAN_ZEROS[d], atol=1e-9)
    if d == 2:
        assert zs.zeros[0] == 1.0  # exact grid hit


@pytest.mark.parametrize("d", [2, 3, 4])
def test_ec_zero_set_grf(d):
    zs = ec_zero_set("grf", d)
    np.testing.assert_allclose(zs.zeros, GRF_ZEROS[d], atol=1e-9)


def test_ec_zero_set_boolean_d4_truncated_window_mismatch():
    # with a tiny intensity the feasible Cech window cannot reach the
    # upper zeros, so the count check must fire rather than pass silently
    with pytest.raises(ZeroCountMismatch):
        ec_zero_set("boolean", 4, n=30, trials=2, seed=1)


def test_ec_zero_set_unknown_model():
    with pytest.raises(ValueError):
        ec_zero_set("voronoi", 2)


def test_zero_set_container_validation():
    with pytest.raises(ValueError):
        EcZeroSet("cubical", 3, (0.0, 1.0), (0.7, 0.2))


# ---------------------------------------------------------------------------
# monte_carlo_ec

def test_monte_carlo_single_trial_equals_trial_curve():
    grid = np.linspace(0.05, 0.95, 19)
    curve, _ = monte_carlo_ec("cubical", 2, 6, 1, grid, seed=3)
    cx = gen_cubical_complex(2, 6, seed=trial_seed(3, 0))
    expect = euler_curve_from_counts(cx)(grid)
    np.testing.assert_array_equal(curve.y, expect.astype(np.float64))
    np.testing.assert_array_equal(curve.t, grid)


def test_monte_carlo_cubical_tracks_expected_curve():
    grid = np.linspace(0.05, 0.95, 20)
    trials = 100
    m = 50
    curve, _ = monte_carlo_ec("cubical", 2, m, trials, grid, seed=11)
    want = expected_ec_cubical(2, m * m, grid)
    per_trial = np.stack([
        euler_curve_from_counts(gen_cubical_complex(2, m, seed=trial_seed(11, i)))(grid)
        for i in range(trials)])
    se = per_trial.std(axis=0, ddof=1) / math.sqrt(trials)
    assert (np.abs(curve.y - want) <= 3 * np.maximum(se, 1e-9)).all()


def test_monte_carlo_boolean_zero_near_one():
    grid = np.linspace(0.1, 3.0, 30)
    curve, zeros = monte_carlo_ec("boolean", 2, 80, 12, grid, seed=2)
    assert len(zeros) >= 1
    assert 0.6 < zeros[0] < 1.5
    assert curve.y[0] > 0 and curve.y[-1] < 0


def test_monte_carlo_grf_zero_near_origin():
    # needs the grid spacing below the kernel length sqrt(sigma2), else
    # discretization shifts the zero visibly
    grid = np.linspace(-4.0, 4.0, 81)
    _, zeros = monte_carlo_ec("grf", 2, 48, 10, grid, seed=5)
    assert len(zeros) >= 1
    assert min(abs(z) for z in zeros) < 0.2


def test_monte_carlo_rejects_zero_trials():
    with pytest.raises(ValueError):
        monte_carlo_ec("cubical", 2, 5, 0, np.linspace(0.1, 0.9, 5))


def test_empirical_ec_boolean_matches_expectation_loosely():
    # single-trial empirical EC at moderate lambda should land within a
    # few sigma of the closed form; this exercises the Betti-sum path
    grid = np.array([0.5, 1.0, 2.0])
    vals = np.stack([
        empirical_ec_on_grid("boolean", 2, 120, grid, trial_seed(7, i))
        for i in range(10)])
    want = expected_ec_boolean(2, 120, grid)
    se = vals.std(axis=0, ddof=1) / math.sqrt(10)
    assert (np.abs(vals.mean(axis=0) - want) <= 4 * se + 1.0).all()


# ---------------------------------------------------------------------------
# t_betti

def synthetic_barcode(intervals, ambient=2):
    ivs = [Interval(b, dth, k) for (b, dth, k) in intervals]
    return Barcode(ambient, ambient, ivs, {})


def test_t_betti_simple_crossing():
    bc = synthetic_barcode([(0.0, math.inf, 0),
                            (0.4, math.inf, 1), (0.4, math.inf, 1)])
    assert t_betti(bc, 1) == 0.4


def test_t_betti_jump_past_equality():
    bc = synthetic_barcode([(0.0, math.inf, 0), (0.1, math.inf, 0),
                            (0.3, math.inf, 1), (0.3, math.inf, 1),
                            (0.3, math.inf, 1)])
    # beta_0 = 2, beta_1 jumps 0 -> 3 at 0.3: crossing without equality
    assert t_betti(bc, 1) == 0.3


def test_t_betti_not_found():
    bc = synthetic_barcode([(0.0, math.inf, 0)])
    with pytest.raises(NotFound):
        t_betti(bc, 1)


def test_t_betti_all_zero_curves_not_found():
    bc = synthetic_barcode([(0.0, math.inf, 0)], ambient=3)
    with pytest.raises(NotFound):
        t_betti(bc, 2)


def test_t_betti_degree_bounds():
    bc = synthetic_barcode([(0.0, math.inf, 0)])
    with pytest.raises(ValueError):
        t_betti(bc, 0)
    with pytest.raises(ValueError):
        t_betti(bc, 2)


def test_t_betti_on_real_trial_near_ec_zero():
    cx = gen_cubical_complex(2, 24, seed=9)
    bc = compute_persistence(cx)
    t = t_betti(bc, 1)
    assert abs(t - GOLDEN_ZERO) < 0.2


# ---------------------------------------------------------------------------
# gap records

def test_gap_records_equal_inputs():
    zs = EcZeroSet("perm", 2, (0.0, 1.0), (0.5,))
    recs = gap_records({1: [0.5]}, zs)
    assert recs == [GapRecord(1, 0.5, 0.5, 0.0)]


def test_gap_records_signed_delta():
    zs = EcZeroSet("cubical", 2, (0.0, 1.0), (0.4,))
    recs = gap_records({1: [0.3, 0.9]}, zs)
    assert len(recs) == 1
    assert recs[0].delta == pytest.approx(-0.1)
    assert recs[0].t_perc == 0.3


def test_gap_records_three_degrees():
    zs = EcZeroSet("cubical", 4, (0.0, 1.0), (0.1, 0.3, 0.7))
    recs = gap_records({1: [0.05], 2: [0.35], 3: [0.9]}, zs)
    assert [r.degree for r in recs] == [1, 2, 3]
    assert recs[1].delta == pytest.approx(0.05)


def test_gap_records_missing_degree():
    zs = EcZeroSet("cubical", 3, (0.0, 1.0), (0.1, 0.6))
    with pytest.raises(DegreeMismatch):
        gap_records({1: [0.2], 2: []}, zs)
    with pytest.raises(DegreeMismatch):
        gap_records({1: [0.2]}, zs)
