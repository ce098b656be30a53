"""Tabular data loading, validation, and quantile binning.

A :class:`Dataset` is an immutable column store of float64 values with
NaN as the missing-value sentinel. Binning is pure-quantile with a
lower-index (no interpolation) rule, right-inclusive bin edges, an
overflow bin above the last edge, and one reserved bin for missing
values at index ``len(edges) + 1``.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    EmptyInputError,
    NoDataError,
    ParseError,
    RangeError,
    StructuralError,
    ValidationError,
)

DEFAULT_MAX_BINS = 32


@dataclass(frozen=True)
class FeatureStats:
    """Summary statistics over the non-missing values of one column."""

    min: float | None
    max: float | None
    mean: float | None
    missing_count: int
    distinct_count: int

    def to_json_dict(self):
        return {
            "min": self.min,
            "max": self.max,
            "mean": self.mean,
            "missing_count": self.missing_count,
            "distinct_count": self.distinct_count,
        }


@dataclass(frozen=True)
class FeatureColumn:
    """One named numeric column; ``bin_edges`` is empty until binned."""

    name: str
    values: np.ndarray
    bin_edges: np.ndarray = field(default_factory=lambda: np.empty(0))

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64)
        edges = np.asarray(self.bin_edges, dtype=np.float64)
        if edges.size and not np.all(np.diff(edges) > 0):
            raise ValidationError(f"bin edges for {self.name!r} are not strictly increasing")
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "bin_edges", edges)

    @property
    def n_bins(self) -> int:
        """Total bin count: real bins plus the reserved missing bin."""
        return len(self.bin_edges) + 2

    @property
    def missing_mask(self) -> np.ndarray:
        return np.isnan(self.values)

    def stats(self) -> FeatureStats:
        present = self.values[~self.missing_mask]
        missing = int(self.values.size - present.size)
        if present.size == 0:
            return FeatureStats(None, None, None, missing, 0)
        return FeatureStats(
            float(present.min()),
            float(present.max()),
            float(present.mean()),
            missing,
            int(np.unique(present).size),
        )

    def with_edges(self, edges) -> "FeatureColumn":
        return FeatureColumn(self.name, self.values, np.asarray(edges, dtype=np.float64))


@dataclass(frozen=True)
class Dataset:
    """Immutable n x d column store; safe for concurrent reads."""

    features: tuple[FeatureColumn, ...]
    name: str = "dataset"

    def __post_init__(self):
        features = tuple(self.features)
        if not features:
            raise EmptyInputError("dataset has no columns")
        names = [f.name for f in features]
        if any(not n for n in names):
            raise ValidationError("feature names must be non-empty")
        if len(set(names)) != len(names):
            dupes = sorted({n for n in names if names.count(n) > 1})
            raise ValidationError(f"duplicate feature names: {dupes}")
        n_rows = features[0].values.size
        for f in features:
            if f.values.size != n_rows:
                raise ValidationError(
                    f"column {f.name!r} has {f.values.size} rows, expected {n_rows}"
                )
        if n_rows < 2:
            raise EmptyInputError("dataset needs at least 2 rows")
        object.__setattr__(self, "features", features)

    @property
    def n_rows(self) -> int:
        return self.features[0].values.size

    @property
    def n_features(self) -> int:
        return len(self.features)

    @property
    def feature_names(self) -> list[str]:
        return [f.name for f in self.features]

    def matrix(self) -> np.ndarray:
        """Values as an (n_rows, n_features) array, NaN = missing."""
        return np.column_stack([f.values for f in self.features])

    def is_binned(self) -> bool:
        return all(f.bin_edges.size > 0 or f.stats().distinct_count <= 1 for f in self.features)

    def binned(self, max_bins: int = DEFAULT_MAX_BINS) -> "Dataset":
        """Return a copy with quantile bin edges on every feature.

        Columns with no non-missing values get empty edges (their rows
        all land in the missing bin).
        """
        cols = []
        for f in self.features:
            present = f.values[~np.isnan(f.values)]
            if present.size == 0:
                cols.append(f.with_edges(np.empty(0)))
            else:
                cols.append(f.with_edges(quantile_bin(f.values, max_bins)))
        return Dataset(tuple(cols), self.name)

    def bin_matrix(self) -> np.ndarray:
        """Per-feature bin assignment of every row, shape (d, n), int64."""
        return np.vstack(
            [bin_index(f.bin_edges, f.values) for f in self.features]
        )

    def take(self, rows) -> "Dataset":
        """Row subset (by index array) as a new unbinned dataset."""
        rows = np.asarray(rows, dtype=np.int64)
        if rows.size and (rows.min() < 0 or rows.max() >= self.n_rows):
            raise RangeError("row index outside dataset")
        cols = tuple(FeatureColumn(f.name, f.values[rows]) for f in self.features)
        return Dataset(cols, self.name)

    def to_json_dict(self):
        return {
            "name": self.name,
            "features": [
                {"name": f.name, "values": [None if np.isnan(v) else float(v) for v in f.values]}
                for f in self.features
            ],
        }

    @classmethod
    def from_json_dict(cls, doc) -> "Dataset":
        cols = tuple(
            FeatureColumn(
                spec["name"],
                np.array([np.nan if v is None else v for v in spec["values"]], dtype=np.float64),
            )
            for spec in doc["features"]
        )
        return cls(cols, doc.get("name", "dataset"))


def _parse_cell(cell: str, row: int, col: int) -> float:
    text = cell.strip()
    if text == "":
        return np.nan
    try:
        value = float(text)
    except ValueError:
        raise ParseError(
            f"non-numeric cell {cell!r} at row {row}, column {col}", row=row, column=col
        ) from None
    if not np.isfinite(value):
        raise ParseError(
            f"non-finite cell {cell!r} at row {row}, column {col}", row=row, column=col
        )
    return value


def _split_csv_lines(source) -> list[str]:
    if isinstance(source, bytes):
        text = source.decode("utf-8")
    elif isinstance(source, str):
        text = source
    elif isinstance(source, io.IOBase) or hasattr(source, "read"):
        raw = source.read()
        text = raw.decode("utf-8") if isinstance(raw, bytes) else raw
    else:
        raise TypeError(f"unsupported CSV source type {type(source).__name__}")
    lines = text.splitlines()
    if lines and lines[-1] == "":
        lines.pop()
    return lines


def _looks_like_header(cells: list[str]) -> bool:
    for cell in cells:
        text = cell.strip()
        if text == "":
            continue
        try:
            float(text)
        except ValueError:
            return True
    return False


def load_csv(source, has_header: bool | None = None, name: str = "dataset") -> Dataset:
    """Parse a UTF-8 comma-separated byte stream into a Dataset.

    Empty cells are missing values. ``has_header=None`` auto-detects: a
    first row with any non-numeric cell is treated as the header.
    Unnamed columns get names ``f0..f{d-1}``. No quoting support.
    """
    lines = _split_csv_lines(source)
    if not lines:
        raise EmptyInputError("CSV has no rows")
    rows = [line.split(",") for line in lines]
    if has_header is None:
        has_header = _looks_like_header(rows[0])

    if has_header:
        header = [c.strip() for c in rows[0]]
        data_rows = rows[1:]
    else:
        header = [f"f{i}" for i in range(len(rows[0]))]
        data_rows = rows

    d = len(header)
    if not data_rows:
        raise EmptyInputError("CSV has no data rows")

    out = np.empty((len(data_rows), d), dtype=np.float64)
    for r, cells in enumerate(data_rows):
        if len(cells) != d:
            raise StructuralError(
                f"row {r + 1} has {len(cells)} cells, expected {d}", row=r + 1
            )
        for c, cell in enumerate(cells):
            out[r, c] = _parse_cell(cell, r + 1, c + 1)

    columns = tuple(FeatureColumn(header[c], out[:, c].copy()) for c in range(d))
    return Dataset(columns, name)


def quantile_bin(values, max_bins: int) -> np.ndarray:
    """Empirical-quantile cut points for one column.

    Edges are the quantiles at k/max_bins for k = 1..max_bins-1 over the
    sorted non-missing values, using the lower-index rule
    ``v[floor(q * (m - 1))]`` (computed exactly in integer arithmetic),
    then deduplicated. An edge equal to the maximum value separates
    nothing (its overflow bin would be empty) and collapses away, so a
    constant column yields no edges. Result has at most max_bins - 1
    edges.
    """
    if max_bins < 2:
        raise ValidationError(f"max_bins must be >= 2, got {max_bins}")
    values = np.asarray(values, dtype=np.float64)
    present = np.sort(values[~np.isnan(values)])
    m = present.size
    if m == 0:
        raise NoDataError("all values are missing; nothing to bin")
    idx = np.array([(k * (m - 1)) // max_bins for k in range(1, max_bins)], dtype=np.int64)
    edges = np.unique(present[idx])
    return edges[edges < present[-1]]


def bin_index(edges, x) -> np.ndarray | int:
    """Map value(s) to bin indices for the given strictly increasing edges.

    Bins are right-inclusive: bin i holds edges[i-1] < x <= edges[i],
    values above the last edge go to the overflow bin ``len(edges)``,
    and missing (NaN) values go to the reserved bin ``len(edges) + 1``.
    """
    edges = np.asarray(edges, dtype=np.float64)
    arr = np.asarray(x, dtype=np.float64)
    scalar = arr.ndim == 0
    arr = np.atleast_1d(arr)
    idx = np.searchsorted(edges, arr, side="left").astype(np.int64)
    idx[np.isnan(arr)] = len(edges) + 1
    if scalar:
        return int(idx[0])
    return idx
