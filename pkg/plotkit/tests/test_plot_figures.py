"""Figure families: content, defaults, determinism, purity."""

import numpy as np
import pytest

import matplotlib.pyplot as plt

from plotkit.errors import SchemaMismatch
from plotkit.figures import render


@pytest.fixture(autouse=True)
def _close_figures():
    yield
    plt.close("all")


def test_ec_dots_contents(expected_file, trials_file, tmp_path):
    param = np.linspace(0.0, 1.0, 11)
    curve = expected_file(param, 0.5 - param)
    births = [0.47, 0.5, 0.53]
    out = tmp_path / "fig.png"
    fig = render("ec-dots", [curve, trials_file(births)], out=str(out))
    ax = fig.axes[0]
    assert out.exists() and out.stat().st_size > 0
    assert ax.get_xlabel() == "parameter"
    dots = np.concatenate([c.get_offsets()[:, 0] for c in ax.collections])
    np.testing.assert_allclose(sorted(dots), births)


def test_ec_dots_accepts_mean_curve(mean_curve_file, trials_file):
    curve = mean_curve_file([0.0, 1.0], [1.0, -1.0])
    fig = render("ec-dots", [trials_file([0.5]), curve])
    assert len(fig.axes[0].collections) == 1


def test_ec_dots_input_order_irrelevant(expected_file, trials_file):
    curve = expected_file([0.0, 1.0], [1.0, -1.0])
    trials = trials_file([0.5])
    a = render("ec-dots", [curve, trials])
    b = render("ec-dots", [trials, curve])
    assert len(a.axes[0].lines) == len(b.axes[0].lines)


def test_ec_dots_skips_invalid_rows(expected_file, trials_file):
    curve = expected_file([0.0, 1.0], [1.0, -1.0])
    fig = render("ec-dots", [curve, trials_file([0.5, 0.9], valid=0)])
    assert len(fig.axes[0].collections) == 0


def test_ec_dots_needs_one_of_each(expected_file, trials_file):
    curve = expected_file([0.0, 1.0], [1.0, -1.0])
    with pytest.raises(SchemaMismatch):
        render("ec-dots", [curve])
    with pytest.raises(SchemaMismatch):
        render("ec-dots", [curve, trials_file([0.5], name="a.csv"),
                           trials_file([0.6], name="b.csv")])


def test_mean_std_series_and_horizontals(aggregate_file):
    path_a = aggregate_file(
        [{"size": 100, "mean_birth": 0.45, "degree": 1},
         {"size": 100, "mean_birth": 0.62, "degree": 2, "t_ec": 0.7}],
        name="a.csv")
    path_b = aggregate_file(
        [{"size": 900, "mean_birth": 0.48, "degree": 1}], name="b.csv")
    fig = render("mean-std", [path_a, path_b])
    ax = fig.axes[0]
    assert ax.get_xscale() == "log"
    labels = [t.get_text() for t in ax.get_legend().get_texts()]
    assert labels == ["perm d=2 degree 1", "perm d=2 degree 2"]
    horizontals = [ln for ln in ax.lines
                   if ln.get_linestyle() == "--"]
    assert len(horizontals) == 3


def test_mean_std_rejects_trials(trials_file):
    with pytest.raises(SchemaMismatch):
        render("mean-std", [trials_file([0.5])])


def test_scatter_diagonal_when_equal(trials_file):
    births = [0.3, 0.5, 0.7]
    path = trials_file(births, t_ec=0.5)
    # first_birth == t_ec row by row is the synthetic diagonal case
    rows = open(path).read().splitlines()
    fixed = rows[:2]
    for ln in rows[2:]:
        cells = ln.split(",")
        cells[8] = cells[6]
        fixed.append(",".join(cells))
    open(path, "w").write("\n".join(fixed) + "\n")

    fig = render("scatter", [path])
    ax = fig.axes[0]
    pts = np.concatenate([c.get_offsets() for c in ax.collections])
    np.testing.assert_allclose(pts[:, 0], pts[:, 1])
    diag = [ln for ln in ax.lines if ln.get_linestyle() == ":"]
    assert len(diag) == 1


def test_scatter_skips_nan_crossings(trials_file):
    fig = render("scatter", [trials_file([0.4, 0.6])])
    # only the EC-zero series: every t_betti is nan
    assert len(fig.axes[0].collections) == 1


def test_betti_overlay(curve_file):
    a = curve_file([0.0, 0.5, 1.0], [1, -1, 0],
                   [[1, 1, 1], [0, 2, 2], [0, 0, 1]], name="a.csv")
    b = curve_file([0.0, 1.0], [1, 0], [[1, 1], [0, 2], [0, 1]],
                   name="b.csv")
    fig = render("betti-overlay", [a, b])
    ax = fig.axes[0]
    assert len(ax.lines) == 6
    labels = [t.get_text() for t in ax.get_legend().get_texts()]
    assert labels == ["beta_0", "beta_1", "beta_2"]


def test_label_overrides(expected_file, trials_file):
    curve = expected_file([0.0, 1.0], [1.0, -1.0])
    fig = render("ec-dots", [curve, trials_file([0.5])],
                 xlabel="p", ylabel="chi", title="demo")
    ax = fig.axes[0]
    assert ax.get_xlabel() == "p"
    assert ax.get_ylabel() == "chi"
    assert ax.get_title() == "demo"


def test_unknown_family_and_empty_inputs(expected_file):
    with pytest.raises(ValueError, match="unknown figure family"):
        render("pie", [expected_file([0.0], [1.0])])
    with pytest.raises(ValueError, match="no input files"):
        render("ec-dots", [])


def test_render_deterministic_bytes(expected_file, trials_file, tmp_path):
    curve = expected_file([0.0, 0.5, 1.0], [1.0, 0.0, -1.0])
    trials = trials_file([0.45, 0.55])
    out1, out2 = tmp_path / "one.png", tmp_path / "two.png"
    render("ec-dots", [curve, trials], out=str(out1))
    render("ec-dots", [curve, trials], out=str(out2))
    assert out1.read_bytes() == out2.read_bytes()


def test_render_never_mutates_inputs(expected_file, trials_file):
    curve = expected_file([0.0, 1.0], [1.0, -1.0])
    trials = trials_file([0.5])
    before = (open(curve).read(), open(trials).read())
    render("ec-dots", [curve, trials])
    assert (open(curve).read(), open(trials).read()) == before
