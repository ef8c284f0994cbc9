"""Named collections of duration samples and column-addressed CSV I/O."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np


@dataclass(frozen=True)
class Dataset:
    """A labeled set of duration samples, in seconds.

    Samples must be finite; positivity is a per-family requirement that the
    fitting routines enforce, not a property of the container.
    """

    label: str
    samples: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        arr = np.asarray(self.samples, dtype=np.float64)
        if arr.ndim != 1:
            raise ValueError(f"samples must be one-dimensional, got shape {arr.shape}")
        if arr.size and not np.all(np.isfinite(arr)):
            raise ValueError("samples must all be finite")
        object.__setattr__(self, "samples", arr)

    @property
    def n(self) -> int:
        return int(self.samples.size)

    def __len__(self) -> int:
        return self.n


def load_csv_column(path: str | Path, column: str, label: str | None = None) -> Dataset:
    """Read one named column of a headed CSV file as a Dataset.

    Blank cells are skipped; anything else that does not parse as a decimal
    number is an error.
    """
    path = Path(path)
    values: list[float] = []
    with path.open(newline="") as fh:
        reader = csv.DictReader(_skip_comments(fh))
        if reader.fieldnames is None or column not in reader.fieldnames:
            have = ", ".join(reader.fieldnames or [])
            raise ValueError(f"column {column!r} not found in {path} (columns: {have})")
        for row_no, row in enumerate(reader, start=2):
            cell = (row.get(column) or "").strip()
            if not cell:
                continue
            try:
                values.append(float(cell))
            except ValueError as exc:
                raise ValueError(f"{path}:{row_no}: bad value {cell!r} in column {column!r}") from exc
    return Dataset(label=label or column, samples=np.asarray(values))


def _skip_comments(lines: Iterable[str]) -> Iterable[str]:
    for line in lines:
        if line.startswith("#"):
            continue
        yield line


def write_csv_columns(path: str | Path, columns: Mapping[str, Sequence[float]],
                      header_comment: str | None = None) -> None:
    """Write equal-length named columns as a headed CSV file."""
    names = list(columns)
    arrays = [np.asarray(columns[name]) for name in names]
    lengths = {a.size for a in arrays}
    if len(lengths) > 1:
        raise ValueError(f"columns have unequal lengths: {sorted(lengths)}")
    path = Path(path)
    with path.open("w", newline="") as fh:
        if header_comment:
            fh.write(f"# {header_comment}\n")
        writer = csv.writer(fh)
        writer.writerow(names)
        for row in zip(*arrays):
            writer.writerow([repr(float(v)) for v in row])
