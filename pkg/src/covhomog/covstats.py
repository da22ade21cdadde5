"""Group covariance summaries, Box's M test and eigenvalue size statistics."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import numcore
from .errors import DegenerateGroup, InsufficientSample, NotPositiveDefinite, ValidationError
from .report import fmt_number, json_number

POOLED = "pooled"


@dataclass(frozen=True)
class GroupCov:
    name: str
    n: int
    mean: np.ndarray
    cov: np.ndarray


@dataclass(frozen=True)
class CovSummary:
    """Per-group means and covariances with the pooled within-group covariance.

    Each group covariance uses divisor ``n_i - 1``; the pooled matrix is
    ``sum((n_i - 1) S_i) / (N - g)``.
    """

    groups: tuple
    pooled: np.ndarray
    variable_names: tuple

    @property
    def N(self):
        return sum(gr.n for gr in self.groups)

    @property
    def g(self):
        return len(self.groups)

    @property
    def p(self):
        return self.pooled.shape[0]

    @property
    def group_names(self):
        return tuple(gr.name for gr in self.groups)

    @property
    def grand_mean(self):
        w = np.array([gr.n for gr in self.groups], dtype=float)
        return np.average(np.array([gr.mean for gr in self.groups]), axis=0, weights=w)

    def matrices(self):
        """``(label, n_effective, S, is_pooled)`` per group, then for the pooled matrix.

        The pooled matrix carries the nominal sample size ``N - g + 1`` so
        that ``n - 1`` equals its degrees of freedom.
        """
        out = [(gr.name, gr.n, gr.cov, False) for gr in self.groups]
        out.append((POOLED, self.N - self.g + 1, self.pooled, True))
        return out


def _pooled(groups):
    N = sum(gr.n for gr in groups)
    g = len(groups)
    if N - g < 1:
        raise DegenerateGroup("pooled covariance needs N - g >= 1")
    # written as a correction to the first matrix so that identical group
    # matrices reproduce it bit for bit
    base = groups[0].cov
    return base + sum(((gr.n - 1) / (N - g)) * (gr.cov - base) for gr in groups)


def summarize_groups(groups, variable_names):
    """Build a :class:`CovSummary` from precomputed ``(name, n, mean, cov)``."""
    groups = tuple(
        GroupCov(str(name), int(n), np.asarray(mean, dtype=float), numcore.as_symmetric(cov))
        for name, n, mean, cov in groups
    )
    return CovSummary(groups, _pooled(groups), tuple(variable_names))


def summarize(d):
    """Minimal sufficient statistics of a grouped dataset.

    Raises
    ------
    DegenerateGroup
        If any group has fewer than two observations.
    """
    groups = []
    for name, idx in d.group_indices().items():
        if len(idx) < 2:
            raise DegenerateGroup(f"group {name!r} has {len(idx)} observation(s); need at least 2")
        Y = d.values[idx]
        mean = Y.mean(axis=0)
        dev = Y - mean
        cov = dev.T @ dev / (len(idx) - 1)
        groups.append(GroupCov(name, len(idx), mean, 0.5 * (cov + cov.T)))
    groups = tuple(groups)
    return CovSummary(groups, _pooled(groups), d.variable_names)


# ---------------------------------------------------------------------------
# Box's M


@dataclass(frozen=True)
class LogDetEntry:
    label: str
    n: int
    logdet: float
    lower: float
    upper: float
    pooled: bool = False


@dataclass(frozen=True)
class BoxMResult:
    """Box's M statistic, its chi-square approximation and log-determinants.

    ``logdets`` lists every group in data order followed by the pooled matrix.
    """

    M: float
    c1: float
    df: int
    chisq: float
    p_value: float
    ci_level: float
    logdets: tuple = field(default_factory=tuple)

    def to_dict(self):
        return {
            "test": "Box's M",
            "M": json_number(self.M),
            "c1": json_number(self.c1),
            "statistic": json_number(self.chisq),
            "df": self.df,
            "p_value": json_number(self.p_value),
            "ci_level": self.ci_level,
            "groups": [e.label for e in self.logdets],
            "n": [e.n for e in self.logdets],
            "logdet": [json_number(e.logdet) for e in self.logdets],
            "ci_lower": [json_number(e.lower) for e in self.logdets],
            "ci_upper": [json_number(e.upper) for e in self.logdets],
        }

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2)

    def to_text(self):
        lines = [
            "Box's M test for homogeneity of covariance matrices",
            f"M {fmt_number(self.M)}",
            f"c1 {fmt_number(self.c1)}",
            f"chisq {fmt_number(self.chisq)}",
            f"df {self.df}",
            f"p_value {fmt_number(self.p_value)}",
            "",
            f"log determinants ({100 * self.ci_level:g}% CI)",
        ]
        width = max(len(e.label) for e in self.logdets)
        cells = [(fmt_number(e.logdet), fmt_number(e.lower), fmt_number(e.upper)) for e in self.logdets]
        w = [max(len(c[k]) for c in cells) for k in range(3)]
        for e, (v, lo, hi) in zip(self.logdets, cells):
            lines.append(f"{e.label:<{width}}  {v:>{w[0]}}  [{lo:>{w[1]}}, {hi:>{w[2]}}]")
        return "\n".join(lines) + "\n"


def box_m_constants(ns, p):
    """Bias correction ``c1`` and degrees of freedom for the chi-square form."""
    ns = np.asarray(ns, dtype=float)
    g = len(ns)
    N = ns.sum()
    c1 = (np.sum(1.0 / (ns - 1.0)) - 1.0 / (N - g)) * (2 * p * p + 3 * p - 1) / (6.0 * (p + 1) * (g - 1))
    df = (g - 1) * p * (p + 1) // 2
    return float(c1), int(df)


def _logdet_named(S, label):
    try:
        return numcore.log_det(S)
    except NotPositiveDefinite as exc:
        raise NotPositiveDefinite("covariance matrix is not positive definite",
                                  pivot=exc.pivot, label=label) from None


def box_m(cs, ci_level=0.95):
    """Box's M test of equal covariance matrices.

    The statistic is ``M = (N-g) ln|S_p| - sum (n_i-1) ln|S_i|`` and the
    reported chi-square is ``(1 - c1) M`` on ``(g-1) p (p+1)/2`` degrees of
    freedom.

    Parameters
    ----------
    cs : CovSummary
    ci_level : float
        Coverage of the log-determinant intervals.

    Raises
    ------
    NotPositiveDefinite
        If a group or the pooled covariance is singular; ``label`` names it.
    """
    if cs.g < 2:
        raise ValidationError("Box's M needs at least two groups")
    p = cs.p
    entries = []
    for label, n, S, is_pooled in cs.matrices():
        ld = _logdet_named(S, label)
        try:
            lo, hi = logdet_ci(ld, n, p, ci_level)
        except InsufficientSample:
            lo = hi = math.nan
        entries.append(LogDetEntry(label, n, ld, lo, hi, is_pooled))
    ld_pooled = entries[-1].logdet
    M = sum((e.n - 1) * (ld_pooled - e.logdet) for e in entries[:-1])
    # M >= 0 by concavity of log det; clip rounding noise
    M = max(M, 0.0)
    c1, df = box_m_constants([gr.n for gr in cs.groups], p)
    chisq = (1.0 - c1) * M
    return BoxMResult(M, c1, df, chisq, numcore.chisq_sf(chisq, df), ci_level, tuple(entries))


def logdet_sd(n, p):
    """Asymptotic standard deviation of ``ln|S|`` for a sample of size ``n``."""
    if n <= p + 1:
        raise InsufficientSample(f"need n > p + 1 for a log-determinant interval (n={n}, p={p})")
    return math.sqrt(sum(2.0 / (n - k) for k in range(1, p + 1)))


def logdet_ci(logdet, n, p, level=0.95):
    """Normal-theory interval ``logdet -/+ z * sd`` with ``sd**2 = sum_k 2/(n-k)``."""
    z = numcore.normal_quantile(0.5 * (1.0 + level))
    half = z * logdet_sd(n, p)
    return logdet - half, logdet + half


# ---------------------------------------------------------------------------
# eigenvalue summaries


@dataclass(frozen=True)
class EigSizeStats:
    """Eigenvalue-based measures of the size of a covariance ellipsoid."""

    label: str
    eigenvalues: np.ndarray
    log_product: float
    sum: float
    precision: float
    max: float
    pooled: bool = False

    STAT_NAMES = ("log_product", "sum", "precision", "max")

    def as_dict(self):
        return {
            "label": self.label,
            "eigenvalues": [float(v) for v in self.eigenvalues],
            **{k: float(getattr(self, k)) for k in self.STAT_NAMES},
        }


def eig_size_stats(S, label="", pooled=False):
    """Generalized variance (as a log), trace, harmonic precision and largest root."""
    lam = numcore.sym_eigen(S).values
    if not np.all(lam > 0):
        raise NotPositiveDefinite("matrix has a nonpositive eigenvalue", label=label or None)
    return EigSizeStats(
        label=label,
        eigenvalues=lam,
        log_product=float(np.sum(np.log(lam))),
        sum=float(np.sum(lam)),
        precision=float(1.0 / np.sum(1.0 / lam)),
        max=float(lam[0]),
        pooled=pooled,
    )


def eig_stats(cs):
    """:func:`eig_size_stats` for every group and then the pooled matrix."""
    out = [eig_size_stats(gr.cov, gr.name) for gr in cs.groups]
    out.append(eig_size_stats(cs.pooled, POOLED, pooled=True))
    return out


def eig_stats_to_json(stats):
    return json.dumps({"matrices": [s.as_dict() for s in stats]}, indent=2)


def eig_stats_to_text(stats):
    width = max(len(s.label) for s in stats)
    head = f"{'matrix':<{width}}  " + "  ".join(f"{k:>11}" for k in EigSizeStats.STAT_NAMES)
    lines = [head]
    for s in stats:
        vals = "  ".join(f"{fmt_number(getattr(s, k)):>11}" for k in EigSizeStats.STAT_NAMES)
        lines.append(f"{s.label:<{width}}  {vals}")
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class ScreeSeries:
    label: str
    log_eigenvalues: np.ndarray
    pooled: bool = False


def scree_data(cs):
    """Descending natural-log eigenvalues for each group and the pooled matrix."""
    return [ScreeSeries(s.label, np.log(s.eigenvalues), s.pooled) for s in eig_stats(cs)]


def scree_to_json(series):
    return json.dumps(
        {"series": [{"label": s.label, "pooled": s.pooled,
                     "log_eigenvalues": [float(v) for v in s.log_eigenvalues]} for s in series]},
        indent=2,
    )


def scree_to_text(series):
    width = max(len(s.label) for s in series)
    lines = []
    for s in series:
        lines.append(f"{s.label:<{width}}  " + " ".join(fmt_number(v) for v in s.log_eigenvalues))
    return "\n".join(lines) + "\n"
