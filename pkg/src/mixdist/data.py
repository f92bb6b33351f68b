"""Column-typed mixed datasets, CSV ingestion and categorical encodings."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

__all__ = [
    "DataError",
    "NumericColumn",
    "CategoricalColumn",
    "MixedDataset",
    "load_csv",
    "indicator",
    "appearance_order",
    "proportions",
    "discretize",
]

NUMERIC = "numeric"
CATEGORICAL = "categorical"


class DataError(ValueError):
    """Raised for malformed or degenerate input data."""


def _frozen(a, dtype):
    a = np.array(a, dtype=dtype, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class NumericColumn:
    name: str
    values: np.ndarray

    kind = NUMERIC

    def __post_init__(self):
        v = _frozen(self.values, float)
        if v.ndim != 1:
            raise DataError(f"column {self.name!r}: values must be one-dimensional")
        if not np.all(np.isfinite(v)):
            raise DataError(f"column {self.name!r}: missing or non-finite values")
        object.__setattr__(self, "values", v)

    def __len__(self):
        return self.values.shape[0]


@dataclass(frozen=True)
class CategoricalColumn:
    """Integer-coded categorical column.

    ``codes[i]`` indexes into ``levels``; the number of categories ``q`` is
    ``len(levels)`` and may exceed the number of levels actually observed.
    """

    name: str
    codes: np.ndarray
    levels: tuple = field(default=())

    kind = CATEGORICAL

    def __post_init__(self):
        c = np.asarray(self.codes)
        if c.ndim != 1:
            raise DataError(f"column {self.name!r}: codes must be one-dimensional")
        if c.size and not np.issubdtype(c.dtype, np.integer):
            if not np.all(np.equal(np.mod(c, 1), 0)):
                raise DataError(f"column {self.name!r}: codes must be integers")
        c = _frozen(c, np.int64)
        levels = tuple(self.levels)
        if not levels:
            levels = tuple(str(k) for k in range(int(c.max()) + 1)) if c.size else ()
        if len(set(levels)) != len(levels):
            raise DataError(f"column {self.name!r}: duplicate level labels")
        q = len(levels)
        if q < 2:
            raise DataError(f"column {self.name!r}: needs at least 2 levels, got {q}")
        if c.size and (c.min() < 0 or c.max() >= q):
            raise DataError(f"column {self.name!r}: codes outside [0, {q})")
        object.__setattr__(self, "codes", c)
        object.__setattr__(self, "levels", levels)

    @property
    def q(self) -> int:
        return len(self.levels)

    def counts(self) -> np.ndarray:
        return np.bincount(self.codes, minlength=self.q)

    def __len__(self):
        return self.codes.shape[0]


Column = NumericColumn | CategoricalColumn


class MixedDataset:
    """Immutable ordered collection of numeric and categorical columns."""

    def __init__(self, columns: Sequence[Column]):
        columns = tuple(columns)
        if not columns:
            raise DataError("dataset needs at least one column")
        names = [c.name for c in columns]
        if len(set(names)) != len(names):
            raise DataError("duplicate column names")
        n = len(columns[0])
        for c in columns:
            if len(c) != n:
                raise DataError(
                    f"column {c.name!r} has {len(c)} rows, expected {n}"
                )
        if n < 2:
            raise DataError("dataset needs at least 2 rows")
        self._columns = columns
        self._index = {c.name: k for k, c in enumerate(columns)}

    @classmethod
    def from_arrays(cls, numeric=None, categorical=None) -> "MixedDataset":
        """Build a dataset from ``{name: values}`` mappings.

        Categorical values may be integer codes or arbitrary labels; labels are
        coded in order of first appearance.
        """
        cols = []
        for name, values in (numeric or {}).items():
            cols.append(NumericColumn(name, values))
        for name, values in (categorical or {}).items():
            if isinstance(values, CategoricalColumn):
                cols.append(values)
                continue
            arr = np.asarray(values)
            if np.issubdtype(arr.dtype, np.integer):
                cols.append(CategoricalColumn(name, arr))
            else:
                cols.append(_encode_labels(name, list(values)))
        return cls(cols)

    @property
    def columns(self) -> tuple:
        return self._columns

    @property
    def names(self) -> list[str]:
        return [c.name for c in self._columns]

    @property
    def n_rows(self) -> int:
        return len(self._columns[0])

    @property
    def numeric(self) -> list[NumericColumn]:
        return [c for c in self._columns if c.kind == NUMERIC]

    @property
    def categorical(self) -> list[CategoricalColumn]:
        return [c for c in self._columns if c.kind == CATEGORICAL]

    def numeric_matrix(self) -> np.ndarray:
        cols = self.numeric
        if not cols:
            return np.empty((self.n_rows, 0))
        return np.column_stack([c.values for c in cols])

    def __getitem__(self, name: str) -> Column:
        return self._columns[self._index[name]]

    def __contains__(self, name) -> bool:
        return name in self._index

    def __len__(self):
        return len(self._columns)

    def __iter__(self):
        return iter(self._columns)

    def drop(self, names: str | Iterable[str]) -> "MixedDataset":
        if isinstance(names, str):
            names = [names]
        names = set(names)
        unknown = names - set(self._index)
        if unknown:
            raise KeyError(f"unknown columns: {sorted(unknown)}")
        return MixedDataset([c for c in self._columns if c.name not in names])

    def select(self, names: Iterable[str]) -> "MixedDataset":
        return MixedDataset([self[name] for name in names])

    def __repr__(self):
        kinds = ", ".join(f"{c.name}:{c.kind[:3]}" for c in self._columns)
        return f"MixedDataset(n_rows={self.n_rows}, [{kinds}])"


def _encode_labels(name, labels) -> CategoricalColumn:
    order: dict = {}
    codes = np.empty(len(labels), dtype=np.int64)
    for i, lab in enumerate(labels):
        codes[i] = order.setdefault(lab, len(order))
    return CategoricalColumn(name, codes, tuple(str(k) for k in order))


def load_csv(path, schema: Mapping[str, str]) -> MixedDataset:
    """Read a headed, comma-separated UTF-8 file into a :class:`MixedDataset`.

    ``schema`` maps column names to ``"numeric"`` or ``"categorical"``; header
    columns absent from the schema are ignored. Categorical labels are coded
    in order of first appearance.
    """
    path = Path(path)
    if not path.is_file():
        raise DataError(f"no such file: {path}")
    for name, kind in schema.items():
        if kind not in (NUMERIC, CATEGORICAL):
            raise DataError(f"column {name!r}: unknown type {kind!r}")

    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise DataError(f"{path}: empty file") from None
        missing = [name for name in schema if name not in header]
        if missing:
            raise DataError(f"{path}: columns not in header: {missing}")
        pos = {name: header.index(name) for name in schema}
        raw: dict[str, list[str]] = {name: [] for name in schema}
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not cell.strip() for cell in row):
                continue
            if len(row) != len(header):
                raise DataError(
                    f"{path}: row {lineno} has {len(row)} fields, expected {len(header)}"
                )
            for name, k in pos.items():
                raw[name].append(row[k].strip())

    cols = []
    for name, kind in schema.items():
        cells = raw[name]
        for i, cell in enumerate(cells):
            if cell == "":
                raise DataError(f"{path}: missing value in row {i + 2}, column {name!r}")
        if kind == NUMERIC:
            values = np.empty(len(cells))
            for i, cell in enumerate(cells):
                try:
                    values[i] = float(cell)
                except ValueError:
                    raise DataError(
                        f"{path}: cannot parse {cell!r} as a number "
                        f"in row {i + 2}, column {name!r}"
                    ) from None
                if not math.isfinite(values[i]):
                    raise DataError(f"{path}: non-finite value in row {i + 2}, column {name!r}")
            cols.append(NumericColumn(name, values))
        else:
            if len(set(cells)) < 2:
                raise DataError(f"{path}: column {name!r} has a single level (q=1)")
            cols.append(_encode_labels(name, cells))
    return MixedDataset(cols)


def indicator(col: CategoricalColumn) -> np.ndarray:
    """One-hot indicator matrix ``Z`` (n x q) of a categorical column."""
    Z = np.zeros((len(col), col.q))
    Z[np.arange(len(col)), col.codes] = 1.0
    return Z


def appearance_order(col: CategoricalColumn) -> np.ndarray:
    """Level indices by first appearance in the data, unobserved levels last.

    The order depends on the data only, not on how levels are coded, so sums
    over categories taken in this order are exactly label invariant.
    """
    _, first = np.unique(col.codes, return_index=True)
    seen = col.codes[np.sort(first)]
    rest = np.setdiff1d(np.arange(col.q), seen)
    return np.concatenate([seen, rest]).astype(np.intp)


def proportions(col: CategoricalColumn, strict: bool = True) -> np.ndarray:
    """Observed category proportions ``n_a / n``.

    With ``strict`` every declared level must be observed at least once, as
    frequency-based dissimilarities are undefined at zero proportion.
    """
    counts = col.counts()
    if strict and np.any(counts == 0):
        empty = [col.levels[a] for a in np.flatnonzero(counts == 0)]
        raise DataError(f"column {col.name!r}: unobserved levels {empty}")
    return counts / counts.sum()


def discretize(col: NumericColumn, q: int, name: str | None = None) -> CategoricalColumn:
    """Equal-width binning of the observed range into ``q`` categories.

    Bins are left-closed and right-open, except the last which also holds the
    maximum.
    """
    if q < 2:
        raise DataError("need q >= 2 bins")
    x = col.values
    lo, hi = x.min(), x.max()
    if not hi > lo:
        raise DataError(f"column {col.name!r} is constant; cannot discretize")
    codes = np.floor((x - lo) / (hi - lo) * q).astype(np.int64)
    np.clip(codes, 0, q - 1, out=codes)
    edges = np.linspace(lo, hi, q + 1)
    for spec in (".6g", ".17g"):
        levels = tuple(
            f"[{edges[k]:{spec}},{edges[k + 1]:{spec}}{']' if k == q - 1 else ')'}" for k in range(q)
        )
        if len(set(levels)) == q:
            break
    else:
        # edges collapsed in floating point; keep labels distinct
        levels = tuple(f"bin{k + 1}" for k in range(q))
    return CategoricalColumn(name or col.name, codes, levels)
