"""Matplotlib rendering of plot series, used by the CLI report path.

The library operations emit data; this module turns those series into PNG
files next to the delimited output.  Everything runs on the Agg backend so
no display is required.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

from . import distributions as dist  # noqa: E402
from . import reporting  # noqa: E402
from .dataset import Dataset  # noqa: E402
from .reporting import PlotSeries, SeriesKind  # noqa: E402
from .selection import ComparisonTable  # noqa: E402


def render_series(series: PlotSeries, path: str | Path, dpi: int = 120) -> None:
    """Render one plot series to an image file."""
    fig, ax = plt.subplots(figsize=(5.0, 3.75))
    _draw(ax, series)
    ax.set_title(f"{series.kind.value} — {dist.model_to_text(series.model)}", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=dpi)
    plt.close(fig)


def _draw(ax, series: PlotSeries) -> None:
    if series.kind is SeriesKind.QQ:
        theo = series.columns["theoretical_q"]
        emp = series.columns["empirical_q"]
        ax.plot(theo, emp, "o", ms=2.5, alpha=0.6)
        lim = [min(theo.min(), emp.min()), max(theo.max(), emp.max())]
        ax.plot(lim, lim, "k--", lw=0.8)
        ax.set_xlabel("theoretical quantile (s)")
        ax.set_ylabel("empirical quantile (s)")
        return

    empirical, model = reporting.split_overlay(series)
    if series.kind is SeriesKind.CDF_OVERLAY:
        ax.step(empirical["x"], empirical["cdf"], where="post", label="data", lw=1.0)
        ax.plot(model["x"], model["cdf"], label="model", lw=1.2)
        ax.set_ylabel("cumulative probability")
    else:
        ax.bar(empirical["x"], empirical["value"], width=empirical["width"],
               alpha=0.45, label="data", edgecolor="none")
        ax.plot(model["x"], model["value"], label="model", lw=1.2)
        ax.set_ylabel("density (1/s)")
    ax.set_xlabel("duration (s)")
    ax.legend(fontsize=7)


def render_comparison(table: ComparisonTable, data: Dataset,
                      path: str | Path, dpi: int = 120) -> None:
    """Diagnostic grid: CDF, density and Q-Q rows, one column per family."""
    families = [f for f in table.reports]
    kinds = (
        (SeriesKind.CDF_OVERLAY, reporting.cdf_overlay),
        (SeriesKind.DENSITY_HISTOGRAM, reporting.density_histogram),
        (SeriesKind.QQ, reporting.qq_points),
    )
    ncols = max(len(families), 1)
    fig, axes = plt.subplots(3, ncols, figsize=(3.2 * ncols, 8.0), squeeze=False)
    for col, family in enumerate(families):
        model = table.reports[family].fit.model
        for row, (_, op) in enumerate(kinds):
            _draw(axes[row][col], op(model, data))
        axes[0][col].set_title(family.value, fontsize=9)
    fig.suptitle(f"{table.label} (n={table.n})", fontsize=10)
    fig.tight_layout(rect=(0, 0, 1, 0.97))
    fig.savefig(path, dpi=dpi)
    plt.close(fig)
