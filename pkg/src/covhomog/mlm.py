"""One-way MANOVA, Levene-type deviation transforms and residualization."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from . import numcore
from .errors import RankDeficient, ValidationError
from .report import fmt_number, json_number

STATISTIC_NAMES = ("Pillai", "Wilks", "Hotelling-Lawley", "Roy")


@dataclass(frozen=True)
class MultivariateTest:
    name: str
    value: float
    F: float
    df1: float
    df2: float
    p_value: float
    note: str = ""


@dataclass(frozen=True)
class ManovaResult:
    """Between (H) and within (E) SSCP matrices and the four classical tests.

    ``eigenvalues`` are the ``min(p, q)`` nonzero roots of ``E^-1 H`` in
    descending order, where ``q`` is the hypothesis degrees of freedom.
    """

    H: np.ndarray
    E: np.ndarray
    eigenvalues: np.ndarray
    p: int
    q: int
    error_df: int
    tests: tuple

    def __getitem__(self, name):
        for t in self.tests:
            if t.name == name:
                return t
        raise KeyError(name)

    @property
    def pillai(self):
        return self["Pillai"].value

    @property
    def wilks(self):
        return self["Wilks"].value

    @property
    def hotelling_lawley(self):
        return self["Hotelling-Lawley"].value

    @property
    def roy(self):
        return self["Roy"].value

    def to_dict(self):
        return {
            "p": self.p,
            "hypothesis_df": self.q,
            "error_df": self.error_df,
            "eigenvalues": [float(v) for v in self.eigenvalues],
            "tests": [
                {
                    "statistic": t.name,
                    "value": json_number(t.value),
                    "F": json_number(t.F),
                    "df1": json_number(t.df1),
                    "df2": json_number(t.df2),
                    "p_value": json_number(t.p_value),
                    "note": t.note,
                }
                for t in self.tests
            ],
        }

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2)

    def to_text(self):
        cols = ("statistic", "value", "F", "df1", "df2", "p")
        rows = [
            (t.name, fmt_number(t.value), fmt_number(t.F), _fmt_df(t.df1),
             _fmt_df(t.df2), fmt_number(t.p_value))
            for t in self.tests
        ]
        notes = [f"  ({t.note})" if t.note else "" for t in self.tests]
        widths = [max(len(c), *(len(r[i]) for r in rows)) for i, c in enumerate(cols)]
        fmt_row = lambda r: "  ".join(
            v.ljust(w) if i == 0 else v.rjust(w) for i, (v, w) in enumerate(zip(r, widths)))
        lines = [fmt_row(cols)] + [fmt_row(r) + note for r, note in zip(rows, notes)]
        return "\n".join(line.rstrip() for line in lines) + "\n"


def _fmt_df(v):
    v = float(v)
    return str(int(v)) if v.is_integer() else fmt_number(v)


def _f_test(name, value, F, df1, df2, note=""):
    if not (math.isfinite(F) and df1 > 0 and df2 > 0):
        return MultivariateTest(name, value, math.nan, df1, df2, math.nan, note)
    return MultivariateTest(name, value, F, df1, df2, numcore.f_sf(max(F, 0.0), df1, df2), note)


def multivariate_tests(eigenvalues, p, q, error_df):
    """The four MANOVA criteria and their F approximations.

    Parameters
    ----------
    eigenvalues : array_like
        Nonzero roots of ``E^-1 H``.
    p : int
        Number of response variables.
    q : int
        Hypothesis degrees of freedom (``g - 1`` for a one-way design).
    error_df : int
        Error degrees of freedom (``N - g`` for a one-way design).
    """
    lam = np.clip(np.asarray(eigenvalues, dtype=float), 0.0, None)
    ve = error_df
    s = min(p, q)
    m = 0.5 * (abs(p - q) - 1)
    n = 0.5 * (ve - p - 1)

    pillai = float(np.sum(lam / (1.0 + lam)))
    wilks = float(np.prod(1.0 / (1.0 + lam)))
    hlt = float(np.sum(lam))
    roy = float(lam[0]) if lam.size else 0.0

    if s == 0:
        return (
            MultivariateTest("Pillai", pillai, math.nan, 0, math.nan, math.nan),
            MultivariateTest("Wilks", wilks, math.nan, 0, math.nan, math.nan),
            MultivariateTest("Hotelling-Lawley", hlt, math.nan, 0, math.nan, math.nan),
            MultivariateTest("Roy", roy, math.nan, 0, math.nan, math.nan, "upper bound"),
        )

    # Pillai-Bartlett trace
    df1 = s * (2 * m + s + 1)
    df2 = s * (2 * n + s + 1)
    F = (df2 / df1) * pillai / (s - pillai) if pillai < s else math.inf
    tests = [_f_test("Pillai", pillai, F, df1, df2)]

    # Wilks lambda, Rao's F
    r = ve - 0.5 * (p - q + 1)
    u = 0.25 * (p * q - 2)
    denom = p * p + q * q - 5
    t = math.sqrt((p * p * q * q - 4) / denom) if denom > 0 else 1.0
    df1 = p * q
    df2 = r * t - 2 * u
    w = wilks ** (1.0 / t)
    F = (1.0 - w) / w * df2 / df1 if w > 0 else math.inf
    tests.append(_f_test("Wilks", wilks, F, df1, df2))

    # Hotelling-Lawley trace, McKeon's approximation when n > 0
    if n > 0:
        if n == 1:
            extra = 0.0
        else:
            b = (p + 2 * n) * (q + 2 * n) / (2 * (2 * n + 1) * (n - 1))
            extra = (p * q + 2) / (b - 1)
        df1 = p * q
        df2 = 4 + extra
        c = (2 + extra) / (2 * n)
        F = hlt / c * df2 / df1
        tests.append(_f_test("Hotelling-Lawley", hlt, F, df1, df2))
    else:
        df1 = s * (2 * m + s + 1)
        df2 = 2 * (s * n + 1)
        F = df2 * hlt / (s * s * (2 * m + s + 1))
        tests.append(_f_test("Hotelling-Lawley", hlt, F, df1, df2))

    # Roy's largest root
    d = max(p, q)
    df2 = ve - d + q
    F = roy * df2 / d
    tests.append(_f_test("Roy", roy, F, d, df2, "upper bound"))
    return tuple(tests)


def sscp_matrices(d):
    """Between-group ``H`` and within-group ``E`` sums of squares and products."""
    grand = d.values.mean(axis=0)
    p = d.n_vars
    H = np.zeros((p, p))
    E = np.zeros((p, p))
    for idx in d.group_indices().values():
        Y = d.values[idx]
        mean = Y.mean(axis=0)
        dm = mean - grand
        H += len(idx) * np.outer(dm, dm)
        dev = Y - mean
        E += dev.T @ dev
    return 0.5 * (H + H.T), 0.5 * (E + E.T)


def relative_eigenvalues(H, E):
    """Eigenvalues of ``E^-1 H`` via the whitened symmetric problem.

    With ``E = L L'`` the roots equal those of ``L^-1 H L^-T``.
    """
    L = numcore.cholesky(E)
    A = numcore.solve_lower(L, H)
    A = numcore.solve_lower(L, A.T)
    return numcore.sym_eigen(0.5 * (A + A.T)).values


def manova(d):
    """One-way MANOVA of the responses in ``d`` on its grouping factor.

    Raises
    ------
    NotPositiveDefinite
        If the within-group SSCP matrix is singular (e.g. ``N - g <= p``).
    """
    H, E = sscp_matrices(d)
    p = d.n_vars
    q = d.n_groups - 1
    ve = d.n_obs - d.n_groups
    lam = relative_eigenvalues(H, E)
    s = min(p, q)
    lam = np.clip(lam[:s], 0.0, None)
    return ManovaResult(H, E, lam, p, q, ve, multivariate_tests(lam, p, q, ve))


def _trimmed_mean(x, fraction):
    # symmetric trimming of `fraction` per tail; boundary order statistics
    # get fractional weight when fraction * n is not an integer
    x = np.sort(x)
    n = len(x)
    g = fraction * n
    k = int(math.floor(g))
    w = np.ones(n)
    w[:k] = 0.0
    w[n - k:] = 0.0
    if k < n - k:
        frac = g - k
        w[k] -= frac
        w[n - 1 - k] -= frac
    if w.sum() <= 0:
        return float(np.median(x))
    return float(np.dot(w, x) / w.sum())


def group_centers(d, center="median"):
    """Per-group location vectors used by :func:`levene_deviations`.

    ``center`` is ``"median"``, ``"mean"``, ``"trimmed"`` (10% per tail),
    ``("trimmed", fraction)`` or ``"trimmed:<fraction>"``.
    """
    kind, fraction = _parse_center(center)
    out = {}
    for name, idx in d.group_indices().items():
        Y = d.values[idx]
        if kind == "mean":
            out[name] = Y.mean(axis=0)
        elif kind == "median":
            out[name] = np.median(Y, axis=0)
        else:
            out[name] = np.array([_trimmed_mean(Y[:, j], fraction) for j in range(Y.shape[1])])
    return out


def _parse_center(center):
    if isinstance(center, tuple):
        kind, fraction = center
    elif isinstance(center, str) and center.startswith("trimmed:"):
        kind, fraction = "trimmed", float(center.split(":", 1)[1])
    else:
        kind, fraction = center, 0.1
    if kind not in ("median", "mean", "trimmed"):
        raise ValidationError(f"unknown center {center!r}; use median, mean or trimmed")
    if kind == "trimmed" and not 0.0 <= fraction < 0.5:
        raise ValidationError("trimming fraction must lie in [0, 0.5)")
    return kind, float(fraction)


def levene_deviations(d, center="median"):
    """Absolute deviations of each observation from its group center.

    Running :func:`manova` on the result gives a multivariate Levene-type
    test; with ``center="median"`` it is the Brown-Forsythe variant.
    """
    centers = group_centers(d, center)
    Z = np.empty_like(d.values)
    for name, idx in d.group_indices().items():
        Z[idx] = np.abs(d.values[idx] - centers[name])
    return d.with_values(Z)


def levene_test(d, center="median"):
    return manova(levene_deviations(d, center))


@dataclass(frozen=True)
class DesignMatrix:
    """Model matrix with named columns; must have full column rank."""

    values: np.ndarray
    column_names: tuple

    def __post_init__(self):
        X = np.array(self.values, dtype=float)
        if X.ndim == 1:
            X = X.reshape(-1, 1)
        names = tuple(self.column_names)
        if len(names) != X.shape[1]:
            raise ValidationError("one name per design column is required")
        object.__setattr__(self, "values", X)
        object.__setattr__(self, "column_names", names)

    @classmethod
    def from_groups(cls, d, covariates=None, covariate_names=None, intercept=True):
        """Intercept, treatment-coded group indicators and optional covariates.

        The first group (in order of appearance) is the reference level.
        """
        cols, names = [], []
        labels = np.array(d.group_labels, dtype=object)
        groups = d.group_names
        if intercept:
            cols.append(np.ones(d.n_obs))
            names.append("(Intercept)")
            groups = groups[1:]
        for gname in groups:
            cols.append((labels == gname).astype(float))
            names.append(f"group[{gname}]")
        if covariates is not None:
            C = np.asarray(covariates, dtype=float)
            if C.ndim == 1:
                C = C.reshape(-1, 1)
            if covariate_names is None:
                covariate_names = [f"x{j + 1}" for j in range(C.shape[1])]
            cols.extend(C.T)
            names.extend(covariate_names)
        return cls(np.column_stack(cols), tuple(names))


def residualize(Y, X):
    """Least-squares residuals ``Y - X (X'X)^-1 X'Y``.

    Parameters
    ----------
    Y : array_like, shape (N, p)
    X : DesignMatrix or array_like, shape (N, k)

    Raises
    ------
    RankDeficient
        If ``X`` does not have full column rank or ``N <= k``.
    """
    Xv = X.values if isinstance(X, DesignMatrix) else np.asarray(X, dtype=float)
    if Xv.ndim == 1:
        Xv = Xv.reshape(-1, 1)
    Y = np.asarray(Y, dtype=float)
    if Xv.shape[0] != Y.shape[0]:
        raise ValidationError("X and Y must have the same number of rows")
    N, k = Xv.shape
    if N <= k:
        raise RankDeficient(f"need more rows ({N}) than design columns ({k})")
    Q, R = np.linalg.qr(Xv)
    diag = np.abs(np.diag(R))
    if diag.min() <= 1e-10 * max(diag.max(), 1e-300):
        raise RankDeficient("design matrix is not of full column rank")
    return Y - Q @ (Q.T @ Y)


def residual_covariance(d, X=None):
    """Residual covariance with divisor ``N - rank(X)``.

    With the default group-indicator design this equals the pooled
    within-group covariance.
    """
    if X is None:
        X = DesignMatrix.from_groups(d)
    Xv = X.values if isinstance(X, DesignMatrix) else np.asarray(X, dtype=float)
    R = residualize(d.values, Xv)
    return R.T @ R / (d.n_obs - Xv.shape[1])

