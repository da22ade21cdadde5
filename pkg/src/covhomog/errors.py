"""Exception types raised across the package."""


class CovHomogError(Exception):
    """Base class for all package errors."""


class ValidationError(CovHomogError, ValueError):
    """An argument violates a documented precondition."""


class NotPositiveDefinite(CovHomogError, ValueError):
    """A matrix required to be positive definite is not.

    Parameters
    ----------
    pivot : int or None
        Zero-based index of the failing Cholesky pivot, when known.
    label : str or None
        Name of the matrix (e.g. a group name) for error messages.
    """

    def __init__(self, message="matrix is not positive definite", pivot=None, label=None):
        self.pivot = pivot
        self.label = label
        text = message
        if label is not None:
            text = f"{label!r}: {text}" if label == "pooled" else f"group {label!r}: {text}"
        if pivot is not None:
            text += f" (pivot {pivot})"
        super().__init__(text)


class NamedColumnMissing(CovHomogError, KeyError):
    """A requested column is absent from the header or variable list."""

    def __str__(self):
        return str(self.args[0]) if self.args else "column missing"


class ParseError(CovHomogError, ValueError):
    """A CSV cell could not be read as a number."""

    def __init__(self, message, row=None, column=None):
        self.row = row
        self.column = column
        where = []
        if row is not None:
            where.append(f"row {row}")
        if column is not None:
            where.append(f"column {column!r}")
        super().__init__(message + (" at " + ", ".join(where) if where else ""))


class DegenerateGroup(CovHomogError, ValueError):
    """A group is empty or too small for the requested computation."""


class UnknownDataset(CovHomogError, KeyError):
    def __str__(self):
        return str(self.args[0]) if self.args else "unknown dataset"


class InsufficientSample(CovHomogError, ValueError):
    """Sample size too small relative to dimension."""


class RankDeficient(CovHomogError, ValueError):
    """A design matrix does not have full column rank."""


class DegenerateData(CovHomogError, ValueError):
    """Data has no variance to decompose."""
