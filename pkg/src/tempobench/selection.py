"""Goodness-of-fit statistics and ranked comparison across the families.

Reports the raw Anderson-Darling statistic (no small-sample correction, no
p-values) together with AIC and BIC; all three criteria rank ascending, and
ties fall back to the fixed family order Normal, Weibull, Gamma,
Log-Normal.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from . import distributions as dist
from .dataset import Dataset
from .distributions import DurationModel, Family
from .errors import DegenerateDataError, SupportError
from .fitting import FitResult, fit_mle

FAMILY_ORDER = (Family.NORMAL, Family.WEIBULL, Family.GAMMA, Family.LOGNORMAL)
CRITERIA = ("ad", "aic", "bic")

# Clamp bounds applied to cdf values inside the AD logarithms only.
_CLAMP_LO = 1e-300
_CLAMP_HI = 1.0 - 1e-16


@dataclass(frozen=True)
class FitReport:
    fit: FitResult
    ad: float
    aic: float
    bic: float
    n: int


@dataclass(frozen=True)
class ComparisonTable:
    label: str
    n: int
    reports: dict[Family, FitReport]
    skipped: dict[Family, str]
    rankings: dict[str, tuple[Family, ...]]
    selected: dict[str, Family]
    ties: dict[str, bool] = field(default_factory=dict)


def anderson_darling(model: DurationModel, data: Dataset | Sequence[float]) -> float:
    """Raw A-squared statistic of the data against the model.

    With sorted data and u_i = cdf(x_(i)):
    A2 = -n - (1/n) sum_i (2i-1) [ln u_i + ln(1 - u_(n+1-i))],
    where the u values are clamped into [1e-300, 1 - 1e-16] inside the
    logarithms.
    """
    xs = data.samples if isinstance(data, Dataset) else np.asarray(data, dtype=np.float64)
    if xs.size == 0:
        raise ValueError("anderson_darling requires nonempty data")
    n = xs.size
    u = np.clip(dist.cdf_values(model, np.sort(xs)), _CLAMP_LO, _CLAMP_HI)
    i = np.arange(1, n + 1, dtype=np.float64)
    s = np.sum((2.0 * i - 1.0) * (np.log(u) + np.log(1.0 - u[::-1])))
    return float(-n - s / n)


def information_criteria(fit: FitResult, n: int) -> tuple[float, float]:
    """(AIC, BIC) = (2k - 2 lnL, k ln n - 2 lnL)."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    aic = 2.0 * fit.k - 2.0 * fit.log_likelihood
    bic = fit.k * math.log(n) - 2.0 * fit.log_likelihood
    return aic, bic


def compare_models(data: Dataset,
                   families: Iterable[Family] = FAMILY_ORDER) -> ComparisonTable:
    """Fit each requested family, compute AD/AIC/BIC and rank them.

    Families whose support or variance requirements fail are omitted with
    a note instead of aborting the comparison.
    """
    requested = [f for f in FAMILY_ORDER if f in set(families)]
    if not requested:
        raise ValueError("no families requested")

    reports: dict[Family, FitReport] = {}
    skipped: dict[Family, str] = {}
    for family in requested:
        try:
            fit = fit_mle(family, data)
        except (SupportError, DegenerateDataError, ValueError) as exc:
            skipped[family] = str(exc)
            continue
        aic, bic = information_criteria(fit, data.n)
        ad = anderson_darling(fit.model, data)
        reports[family] = FitReport(fit=fit, ad=ad, aic=aic, bic=bic, n=data.n)

    if not reports:
        raise ValueError(f"every requested family failed: {skipped}")

    rankings: dict[str, tuple[Family, ...]] = {}
    selected: dict[str, Family] = {}
    ties: dict[str, bool] = {}
    for criterion in CRITERIA:
        values = {fam: getattr(rep, criterion) for fam, rep in reports.items()}
        order = tuple(sorted(values, key=lambda f: (values[f], FAMILY_ORDER.index(f))))
        rankings[criterion] = order
        selected[criterion] = order[0]
        ties[criterion] = len(set(values.values())) < len(values)

    return ComparisonTable(
        label=data.label,
        n=data.n,
        reports=reports,
        skipped=skipped,
        rankings=rankings,
        selected=selected,
        ties=ties,
    )


# ---------------------------------------------------------------------------
# export
# ---------------------------------------------------------------------------

def comparison_to_rows(table: ComparisonTable) -> list[dict[str, object]]:
    rows = []
    for family in FAMILY_ORDER:
        rep = table.reports.get(family)
        if rep is None:
            continue
        row: dict[str, object] = {
            "family": family.value,
            "ad": rep.ad,
            "aic": rep.aic,
            "bic": rep.bic,
            "log_likelihood": rep.fit.log_likelihood,
            "k": rep.fit.k,
            "converged": rep.fit.converged,
        }
        row.update(rep.fit.model.param_dict())
        rows.append(row)
    return rows


def write_comparison_csv(table: ComparisonTable, path: str | Path) -> None:
    path = Path(path)
    fields = ["family", "ad", "aic", "bic", "log_likelihood", "k", "converged",
              "param1", "param1_value", "param2", "param2_value"]
    lines = [",".join(fields)]
    for row in comparison_to_rows(table):
        params = [(k, v) for k, v in row.items()
                  if k not in ("family", "ad", "aic", "bic", "log_likelihood", "k", "converged")]
        (p1, v1), (p2, v2) = params
        lines.append(",".join([
            str(row["family"]), repr(row["ad"]), repr(row["aic"]), repr(row["bic"]),
            repr(row["log_likelihood"]), str(row["k"]), str(row["converged"]).lower(),
            p1, repr(v1), p2, repr(v2),
        ]))
    path.write_text("\n".join(lines) + "\n")


def comparison_to_dict(table: ComparisonTable) -> dict[str, object]:
    """JSON report mirroring the per-dataset criteria table layout."""
    return {
        "dataset": table.label,
        "n": table.n,
        "families": {
            family.value: {
                "params": rep.fit.model.param_dict(),
                "log_likelihood": rep.fit.log_likelihood,
                "converged": rep.fit.converged,
                "ad": rep.ad,
                "aic": rep.aic,
                "bic": rep.bic,
            }
            for family, rep in table.reports.items()
        },
        "skipped": {f.value: reason for f, reason in table.skipped.items()},
        "rankings": {c: [f.value for f in fams] for c, fams in table.rankings.items()},
        "selected": {c: f.value for c, f in table.selected.items()},
        "ties": dict(table.ties),
    }


def write_comparison_json(table: ComparisonTable, path: str | Path) -> None:
    Path(path).write_text(json.dumps(comparison_to_dict(table), indent=2) + "\n")
