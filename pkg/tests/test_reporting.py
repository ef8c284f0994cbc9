"""Plot-series generation tests: Q-Q points, histograms, cdf overlays, CSV."""

import math

import numpy as np
import pytest

from tempobench import distributions as dist
from tempobench import reporting
from tempobench.dataset import Dataset
from tempobench.reporting import (
    PlotSeries,
    SeriesKind,
    cdf_overlay,
    density_histogram,
    qq_points,
    split_overlay,
    write_series_csv,
)

LN1 = dist.lognormal(3.85, 0.62)


def ds(values, label="x"):
    return Dataset(label, np.asarray(values, dtype=float))


# --- qq ----------------------------------------------------------------------

def test_qq_self_consistent_on_exact_quantiles():
    n = 64
    probs = (np.arange(1, n + 1) - 0.5) / n
    xs = np.array([dist.quantile(LN1, p) for p in probs])
    series = qq_points(LN1, ds(xs))
    assert np.allclose(series.columns["theoretical_q"], series.columns["empirical_q"],
                       atol=1e-9)


def test_qq_single_point_is_median():
    series = qq_points(LN1, ds([46.99]))
    assert series.columns["theoretical_q"][0] == pytest.approx(math.exp(3.85), rel=1e-9)
    assert series.columns["empirical_q"][0] == 46.99


def test_qq_outlier_moves_only_last_point():
    n = 50
    probs = (np.arange(1, n + 1) - 0.5) / n
    xs = np.array([dist.quantile(LN1, p) for p in probs])
    xs[-1] *= 10.0
    series = qq_points(LN1, ds(xs))
    gap = np.abs(series.columns["empirical_q"] - series.columns["theoretical_q"])
    assert np.all(gap[:-1] < 1e-9)
    assert gap[-1] > 1.0


def test_qq_sorted_by_theoretical_and_length_n():
    xs = dist.sample_values(LN1, seed=1, n=333)
    series = qq_points(LN1, ds(xs))
    assert len(series) == 333
    theo = series.columns["theoretical_q"]
    assert np.all(np.diff(theo) >= 0.0)


# --- density histogram ----------------------------------------------------------

def test_histogram_bin_areas_sum_to_one():
    for seed in range(3):
        xs = dist.sample_values(LN1, seed=seed, n=500)
        series = density_histogram(LN1, ds(xs))
        hist, _ = split_overlay(series)
        assert float(np.sum(hist["value"] * hist["width"])) == pytest.approx(1.0, abs=1e-9)


def test_density_tracks_pdf_on_large_sample():
    xs = dist.sample_values(LN1, seed=11, n=100_000)
    series = density_histogram(LN1, ds(xs))
    hist, _ = split_overlay(series)
    centers, density = hist["x"], hist["value"]
    pdf_at_centers = dist.pdf_values(LN1, centers)
    peak = float(np.max(dist.pdf_values(LN1, np.linspace(1, 200, 2000))))
    assert float(np.max(np.abs(density - pdf_at_centers))) < 0.1 * peak


def test_all_equal_data_uses_sturges_single_occupied_bin():
    series = density_histogram(LN1, ds([40.0] * 32))
    hist, _ = split_overlay(series)
    # ceil(log2 32) + 1 bins, exactly one of them occupied.
    assert hist["x"].size == 6
    assert int(np.count_nonzero(hist["value"])) == 1
    assert float(np.sum(hist["value"] * hist["width"])) == pytest.approx(1.0, abs=1e-9)


def test_density_model_grid_shape():
    xs = dist.sample_values(LN1, seed=2, n=100)
    series = density_histogram(LN1, ds(xs))
    _, model = split_overlay(series)
    assert model["x"].size == reporting.GRID_POINTS
    assert model["x"][0] == 0.0
    assert model["x"][-1] == pytest.approx(dist.quantile(LN1, 0.999), rel=1e-12)


def test_density_requires_two_points():
    with pytest.raises(ValueError):
        density_histogram(LN1, ds([1.0]))


# --- cdf overlay -----------------------------------------------------------------

def test_empirical_cdf_hits_one_at_max_and_is_nondecreasing():
    xs = dist.sample_values(LN1, seed=3, n=257)
    series = cdf_overlay(LN1, ds(xs))
    emp, model = split_overlay(series)
    order = np.argsort(emp["x"])
    assert emp["cdf"][order][-1] == pytest.approx(1.0, abs=1e-15)
    assert np.all(np.diff(emp["cdf"][order]) >= 0.0)
    assert np.all(np.diff(model["cdf"]) >= -1e-15)


def test_cdf_overlay_sup_distance_on_self_drawn_sample():
    xs = dist.sample_values(LN1, seed=4, n=100_000)
    series = cdf_overlay(LN1, ds(xs))
    emp, _ = split_overlay(series)
    order = np.argsort(emp["x"])
    sup = float(np.max(np.abs(emp["cdf"][order]
                              - dist.cdf_values(LN1, emp["x"][order]))))
    assert sup < 0.01


# --- series container and CSV -----------------------------------------------------

def test_plot_series_rejects_unequal_columns():
    with pytest.raises(ValueError):
        PlotSeries(kind=SeriesKind.QQ,
                   columns={"a": np.zeros(3), "b": np.zeros(4)}, model=LN1)


def test_series_deterministic():
    xs = dist.sample_values(LN1, seed=6, n=200)
    a = qq_points(LN1, ds(xs))
    b = qq_points(LN1, ds(xs))
    for key in a.columns:
        assert np.array_equal(a.columns[key], b.columns[key])


def test_write_series_csv_round_trip(tmp_path):
    xs = dist.sample_values(LN1, seed=7, n=50)
    series = cdf_overlay(LN1, ds(xs))
    path = tmp_path / "overlay.csv"
    write_series_csv(series, path)
    lines = path.read_text().splitlines()
    assert lines[0].startswith("# tempobench-series v1 kind=cdf model=")
    assert lines[1] == "x,cdf,is_model"
    body = np.array([[float(v) for v in line.split(",")] for line in lines[2:]])
    assert np.array_equal(body[:, 0], series.columns["x"])
    assert np.array_equal(body[:, 1], series.columns["cdf"])
