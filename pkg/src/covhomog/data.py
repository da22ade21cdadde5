"""Grouped multivariate samples, CSV ingestion and the bundled datasets."""

from __future__ import annotations

import csv
import io
import os
from dataclasses import dataclass
from importlib import resources

import numpy as np

from .errors import (
    DegenerateGroup,
    NamedColumnMissing,
    ParseError,
    UnknownDataset,
    ValidationError,
)

BUILTIN_GROUP_COLUMNS = {"iris": "Species", "skulls": "epoch", "wine": "Cultivar"}

# Column means of the shipped files, checked by the test suite to catch
# corruption of the data resources.
BUILTIN_COLUMN_MEANS = {
    "iris": {
        "Sepal.Length": 5.8433333333, "Sepal.Width": 3.0573333333,
        "Petal.Length": 3.758, "Petal.Width": 1.1993333333,
    },
    "skulls": {"mb": 133.9733333333, "bh": 132.5466666667, "bl": 96.46, "nh": 50.9333333333},
    "wine": {
        "Alcohol": 13.0006179775, "MalicAcid": 2.3363483146, "Ash": 2.3665168539,
        "AlcAsh": 19.4949438202, "Mg": 99.7415730337, "Phenols": 2.2951123596,
        "Flav": 2.0292696629, "NonFlavPhenols": 0.3618539326, "Proa": 1.5908988764,
        "Color": 5.0580898876, "Hue": 0.9574494382, "OD": 2.6116853933,
        "Proline": 746.893258427,
    },
}

_MISSING_TOKENS = {"", "na", "nan", "null", "none", "."}


@dataclass(frozen=True, eq=False)
class GroupedDataset:
    """An N x p numeric sample with one categorical group label per row.

    Attributes
    ----------
    values : ndarray, shape (N, p)
        Read-only response matrix.
    group_labels : tuple of str
        Group label of each row.
    variable_names : tuple of str
        Column names of ``values``.
    group_column : str
        Name of the grouping variable (used when writing CSV).
    """

    values: np.ndarray
    group_labels: tuple
    variable_names: tuple
    group_column: str = "group"

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        if values.ndim == 1:
            values = values.reshape(-1, 1)
        if values.ndim != 2:
            raise ValidationError("values must be a 2-D array")
        labels = tuple(str(x) for x in self.group_labels)
        names = tuple(str(x) for x in self.variable_names)
        n, p = values.shape
        if p < 1:
            raise ValidationError("dataset needs at least one variable")
        if n == 0:
            raise DegenerateGroup("dataset has no rows")
        if len(labels) != n:
            raise ValidationError(f"{len(labels)} group labels for {n} rows")
        if len(names) != p:
            raise ValidationError(f"{len(names)} variable names for {p} columns")
        if len(set(names)) != p:
            raise ValidationError("variable names must be unique")
        if not np.all(np.isfinite(values)):
            raise ValidationError("values must be finite; missing data is not supported")
        if any(lab == "" for lab in labels):
            raise DegenerateGroup("empty group label")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "group_labels", labels)
        object.__setattr__(self, "variable_names", names)

    @property
    def n_obs(self):
        return self.values.shape[0]

    @property
    def n_vars(self):
        return self.values.shape[1]

    @property
    def group_names(self):
        """Distinct labels in order of first appearance."""
        return tuple(dict.fromkeys(self.group_labels))

    @property
    def n_groups(self):
        return len(self.group_names)

    def group_indices(self):
        """Map each group name to the array of its row indices."""
        labels = np.array(self.group_labels, dtype=object)
        return {g: np.flatnonzero(labels == g) for g in self.group_names}

    def group_sizes(self):
        return {g: len(idx) for g, idx in self.group_indices().items()}

    def group_values(self, name):
        return self.values[self.group_indices()[name]]

    def with_values(self, values, variable_names=None):
        """Same grouping, new response matrix."""
        return GroupedDataset(
            values, self.group_labels,
            self.variable_names if variable_names is None else variable_names,
            self.group_column,
        )

    def __eq__(self, other):
        if not isinstance(other, GroupedDataset):
            return NotImplemented
        return (
            self.group_labels == other.group_labels
            and self.variable_names == other.variable_names
            and self.group_column == other.group_column
            and np.array_equal(self.values, other.values)
        )

    __hash__ = None

    def to_csv(self):
        """Serialize with the group column first and full float precision."""
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow((self.group_column,) + self.variable_names)
        for label, row in zip(self.group_labels, self.values):
            writer.writerow([label] + [repr(float(v)) for v in row])
        return buf.getvalue()


def _parse_float(cell):
    token = cell.strip()
    if token.lower() in _MISSING_TOKENS:
        raise ValueError("missing value")
    return float(token)


def parse_csv(text, group_column, variable_columns=None):
    """Read a header-first CSV into a :class:`GroupedDataset`.

    Parameters
    ----------
    text : str, bytes or file-like
        CSV content (UTF-8 when bytes).
    group_column : str
        Header name of the grouping column.
    variable_columns : list of str, optional
        Response columns, in the order given.  By default every other
        column whose cells are all numeric is used, in file order.

    Raises
    ------
    NamedColumnMissing
        Missing header, or a named column not in the header.
    ParseError
        A selected cell is not a decimal number (missing values included).
    DegenerateGroup
        No data rows, or a row with a blank group label.
    """
    if hasattr(text, "read"):
        text = text.read()
    if isinstance(text, (bytes, bytearray)):
        text = bytes(text).decode("utf-8-sig")
    elif text.startswith("\ufeff"):
        text = text[1:]
    rows = [r for r in csv.reader(io.StringIO(text)) if r]
    if not rows:
        raise NamedColumnMissing("CSV has no header row")
    header = [h.strip() for h in rows[0]]
    body = rows[1:]
    if group_column not in header:
        raise NamedColumnMissing(f"group column {group_column!r} not in header")
    for i, row in enumerate(body, start=2):
        if len(row) != len(header):
            raise ParseError(f"expected {len(header)} fields, found {len(row)}", row=i)
    if not body:
        raise DegenerateGroup("CSV has no data rows")

    gcol = header.index(group_column)
    if variable_columns is None:
        selected = []
        for j, name in enumerate(header):
            if j == gcol:
                continue
            # missing tokens don't disqualify a column; they fail below
            cells = [row[j].strip() for row in body]
            present = [c for c in cells if c.lower() not in _MISSING_TOKENS]
            try:
                for c in present:
                    float(c)
            except ValueError:
                continue
            if present:
                selected.append(name)
        if not selected:
            raise NamedColumnMissing("no numeric variable columns found")
    else:
        selected = list(variable_columns)
        for name in selected:
            if name not in header:
                raise NamedColumnMissing(f"variable column {name!r} not in header")

    cols = [header.index(name) for name in selected]
    values = np.empty((len(body), len(cols)))
    labels = []
    for i, row in enumerate(body):
        label = row[gcol].strip()
        if not label:
            raise DegenerateGroup(f"blank group label at row {i + 2}")
        labels.append(label)
        for k, j in enumerate(cols):
            try:
                values[i, k] = _parse_float(row[j])
            except ValueError:
                raise ParseError(f"cannot read {row[j]!r} as a number", row=i + 2,
                                 column=header[j]) from None
    return GroupedDataset(values, labels, selected, group_column)


def read_csv(path, group_column, variable_columns=None):
    with open(path, "rb") as fh:
        return parse_csv(fh.read(), group_column, variable_columns)


def builtin_dataset(name):
    """Load one of the bundled datasets: ``iris``, ``skulls`` or ``wine``."""
    key = str(name).lower()
    if key not in BUILTIN_GROUP_COLUMNS:
        raise UnknownDataset(f"unknown dataset {name!r}; choose from {sorted(BUILTIN_GROUP_COLUMNS)}")
    raw = resources.files("covhomog").joinpath("data").joinpath(f"{key}.csv").read_bytes()
    return parse_csv(raw, BUILTIN_GROUP_COLUMNS[key])


def select_variables(d, names):
    """Column subset of ``d`` in the order of ``names``."""
    names = [names] if isinstance(names, str) else list(names)
    if not names:
        raise ValidationError("select at least one variable")
    idx = []
    for name in names:
        if name not in d.variable_names:
            raise NamedColumnMissing(f"variable {name!r} not in dataset")
        idx.append(d.variable_names.index(name))
    return d.with_values(d.values[:, idx], names)


def load_data(source, group_column=None, variable_columns=None):
    """Resolve ``builtin:<name>`` or a CSV path to a dataset.

    For builtin data the group column defaults to the dataset's own, and
    ``variable_columns`` selects a subset.
    """
    if source.startswith("builtin:"):
        name = source[len("builtin:"):]
        d = builtin_dataset(name)
        if group_column is not None and group_column != d.group_column:
            raise NamedColumnMissing(
                f"dataset {name!r} is grouped by {d.group_column!r}, not {group_column!r}")
        if variable_columns:
            d = select_variables(d, variable_columns)
        return d
    if group_column is None:
        raise ValidationError("a group column is required for CSV input")
    if not os.path.isfile(source):
        raise FileNotFoundError(source)
    return read_csv(source, group_column, variable_columns)
