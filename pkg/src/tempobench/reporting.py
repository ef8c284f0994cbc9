"""Plot-data series behind the three fit diagnostics.

Each operation emits a :class:`PlotSeries`: equal-length named numeric
columns plus the model annotation, written as plain CSV so any plotting
tool can render them.  Overlay series (CDF, density) use a tidy layout
with an ``is_model`` flag column separating empirical rows from model-curve
rows; Q-Q series pair theoretical and empirical quantiles directly.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping

import numpy as np

from . import distributions as dist
from .dataset import Dataset
from .distributions import DurationModel

GRID_POINTS = 256
SERIES_SCHEMA_VERSION = 1


class SeriesKind(str, enum.Enum):
    CDF_OVERLAY = "cdf"
    DENSITY_HISTOGRAM = "density"
    QQ = "qq"


@dataclass(frozen=True)
class PlotSeries:
    kind: SeriesKind
    columns: dict[str, np.ndarray]
    model: DurationModel

    def __post_init__(self) -> None:
        arrays = {k: np.asarray(v, dtype=np.float64) for k, v in self.columns.items()}
        lengths = {a.size for a in arrays.values()}
        if len(lengths) != 1:
            raise ValueError(f"columns must have equal length, got {sorted(lengths)}")
        object.__setattr__(self, "columns", arrays)

    def __len__(self) -> int:
        return next(iter(self.columns.values())).size


def _grid(model: DurationModel) -> np.ndarray:
    return np.linspace(0.0, dist.quantile(model, 0.999), GRID_POINTS)


def qq_points(model: DurationModel, data: Dataset) -> PlotSeries:
    """Q-Q pairs at Hazen plotting positions (i - 0.5) / n."""
    if data.n == 0:
        raise ValueError("qq_points requires nonempty data")
    xs = np.sort(data.samples)
    probs = (np.arange(1, data.n + 1) - 0.5) / data.n
    theo = np.array([dist.quantile(model, p) for p in probs])
    return PlotSeries(
        kind=SeriesKind.QQ,
        columns={"theoretical_q": theo, "empirical_q": xs},
        model=model,
    )


def density_histogram(model: DurationModel, data: Dataset) -> PlotSeries:
    """Density-normalized histogram rows plus the model pdf on a grid.

    Bin width is Freedman-Diaconis, falling back to Sturges bin counts
    when the IQR is zero.  Histogram rows carry ``is_model = 0`` and the
    grid rows ``is_model = 1``; the ``width`` column holds bin widths for
    histogram rows and grid spacing for model rows.
    """
    if data.n < 2:
        raise ValueError("density_histogram requires n >= 2")
    xs = data.samples
    edges = _histogram_edges(xs)
    density, edges = np.histogram(xs, bins=edges, density=True)
    centers = 0.5 * (edges[:-1] + edges[1:])
    widths = np.diff(edges)

    grid = _grid(model)
    pdf = dist.pdf_values(model, grid)
    dx = grid[1] - grid[0] if grid.size > 1 else 0.0

    return PlotSeries(
        kind=SeriesKind.DENSITY_HISTOGRAM,
        columns={
            "x": np.concatenate([centers, grid]),
            "value": np.concatenate([density, pdf]),
            "width": np.concatenate([widths, np.full(grid.size, dx)]),
            "is_model": np.concatenate([np.zeros(centers.size), np.ones(grid.size)]),
        },
        model=model,
    )


def _histogram_edges(xs: np.ndarray) -> np.ndarray:
    lo, hi = float(np.min(xs)), float(np.max(xs))
    q25, q75 = np.percentile(xs, [25.0, 75.0])
    iqr = float(q75 - q25)
    if iqr > 0.0:
        width = 2.0 * iqr / xs.size ** (1.0 / 3.0)
        bins = max(1, int(math.ceil((hi - lo) / width)))
    else:
        # Sturges fallback; degenerate range widened so a single occupied
        # bin still has positive area.
        bins = int(math.ceil(math.log2(xs.size))) + 1
        if hi == lo:
            lo, hi = lo - 0.5, hi + 0.5
    return np.linspace(lo, hi, bins + 1)


def cdf_overlay(model: DurationModel, data: Dataset) -> PlotSeries:
    """Empirical cdf steps (i/n at sorted x) plus the model cdf on a grid."""
    if data.n == 0:
        raise ValueError("cdf_overlay requires nonempty data")
    xs = np.sort(data.samples)
    emp = np.arange(1, data.n + 1) / data.n
    grid = _grid(model)
    curve = dist.cdf_values(model, grid)
    return PlotSeries(
        kind=SeriesKind.CDF_OVERLAY,
        columns={
            "x": np.concatenate([xs, grid]),
            "cdf": np.concatenate([emp, curve]),
            "is_model": np.concatenate([np.zeros(xs.size), np.ones(grid.size)]),
        },
        model=model,
    )


def write_series_csv(series: PlotSeries, path: str | Path) -> None:
    """CSV with a versioned annotation line followed by a plain header."""
    path = Path(path)
    names = list(series.columns)
    lines = [
        f"# tempobench-series v{SERIES_SCHEMA_VERSION} kind={series.kind.value} "
        f"model=\"{dist.model_to_text(series.model)}\"",
        ",".join(names),
    ]
    for row in zip(*(series.columns[n] for n in names)):
        lines.append(",".join(repr(float(v)) for v in row))
    path.write_text("\n".join(lines) + "\n")


def split_overlay(series: PlotSeries) -> tuple[Mapping[str, np.ndarray], Mapping[str, np.ndarray]]:
    """Split a tidy overlay series into (empirical, model) column groups."""
    flag = series.columns["is_model"].astype(bool)
    emp = {k: v[~flag] for k, v in series.columns.items() if k != "is_model"}
    mod = {k: v[flag] for k, v in series.columns.items() if k != "is_model"}
    return emp, mod
