"""Data ellipses and principal-component views of grouped covariance."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from . import numcore
from .covstats import POOLED, summarize
from .errors import DegenerateData, NotPositiveDefinite, ValidationError

DEFAULT_COVERAGE = 0.68
DEFAULT_POINTS = 120


@dataclass(frozen=True)
class Ellipse2D:
    """Boundary of ``{y : (y - center)' S^-1 (y - center) <= radius**2}``.

    ``boundary`` holds ``m`` points; the closing point is not repeated.
    """

    label: str
    center: np.ndarray
    shape: np.ndarray
    radius: float
    boundary: np.ndarray
    pooled: bool = False

    @property
    def area(self):
        return math.pi * self.radius ** 2 * math.sqrt(np.linalg.det(self.shape))


def coverage_radius(coverage=DEFAULT_COVERAGE, dim=2):
    """Radius whose ellipse covers ``coverage`` of a ``dim``-variate normal."""
    return math.sqrt(numcore.chisq_quantile(coverage, dim))


def ellipse_boundary(center, S, c, m=DEFAULT_POINTS, label="", pooled=False):
    """Points ``center + c * V diag(sqrt(lambda)) (cos t, sin t)`` on a data ellipse.

    Parameters
    ----------
    center : array_like, shape (2,)
    S : array_like, shape (2, 2)
        Positive definite shape matrix.
    c : float
        Radius (``sqrt`` of a chi-square quantile for a coverage ellipse).
    m : int
        Number of boundary points, at least 8.
    """
    center = np.asarray(center, dtype=float)
    S = numcore.as_symmetric(S, "shape")
    if S.shape != (2, 2) or center.shape != (2,):
        raise ValidationError("ellipse_boundary works in two dimensions")
    if not c > 0:
        raise ValidationError("radius must be positive")
    if m < 8:
        raise ValidationError("need at least 8 boundary points")
    eig = numcore.sym_eigen(S)
    if not eig.values[-1] > 0:
        raise NotPositiveDefinite("ellipse shape matrix is singular", label=label or None)
    theta = 2.0 * math.pi * np.arange(m) / m
    circle = np.column_stack([np.cos(theta), np.sin(theta)])
    A = eig.vectors * np.sqrt(eig.values)
    pts = center + c * circle @ A.T
    return Ellipse2D(label, center, S, float(c), pts, pooled)


@dataclass(frozen=True)
class EllipsePanel:
    """Ellipses for one variable pair: every group, then the pooled matrix."""

    x_index: int
    y_index: int
    x_name: str
    y_name: str
    ellipses: tuple


def pairwise_ellipses(cs, coverage=DEFAULT_COVERAGE, centered=True, m=DEFAULT_POINTS, pairs=None):
    """Data ellipses for each variable pair ``(j, k)`` with ``j < k``.

    When ``centered`` every ellipse sits at the origin so only size and
    shape are compared; otherwise groups sit at their means and the pooled
    ellipse at the grand mean.
    """
    if cs.p < 2:
        raise ValidationError("pairwise ellipses need at least two variables")
    c = coverage_radius(coverage)
    grand = cs.grand_mean
    if pairs is None:
        pairs = list(itertools.combinations(range(cs.p), 2))
    panels = []
    for j, k in pairs:
        sub = np.ix_([j, k], [j, k])
        ells = []
        for gr in cs.groups:
            ctr = np.zeros(2) if centered else gr.mean[[j, k]]
            ells.append(ellipse_boundary(ctr, gr.cov[sub], c, m, gr.name))
        ctr = np.zeros(2) if centered else grand[[j, k]]
        ells.append(ellipse_boundary(ctr, cs.pooled[sub], c, m, POOLED, pooled=True))
        panels.append(EllipsePanel(j, k, cs.variable_names[j], cs.variable_names[k], tuple(ells)))
    return panels


def centered_pairwise_ellipses(cs, coverage=DEFAULT_COVERAGE, m=DEFAULT_POINTS):
    return pairwise_ellipses(cs, coverage, centered=True, m=m)


@dataclass(frozen=True)
class PcaProjection:
    loadings: np.ndarray
    scores: np.ndarray
    variance_proportions: np.ndarray
    grand_mean: np.ndarray
    variances: np.ndarray

    def reconstruct(self):
        return self.scores @ self.loadings.T + self.grand_mean


def fix_signs(vectors):
    """Flip columns so each one's largest-magnitude entry is positive."""
    V = np.array(vectors, dtype=float)
    for j in range(V.shape[1]):
        i = int(np.argmax(np.abs(V[:, j])))
        if V[i, j] < 0:
            V[:, j] = -V[:, j]
    return V


def pca(d):
    """Principal components of the total-sample covariance (divisor N - 1).

    Variables are not standardized.  Raises :class:`DegenerateData` if the
    data have no variance or ``N <= p``.
    """
    Y = d.values
    N, p = Y.shape
    if N <= p:
        raise DegenerateData(f"PCA needs more observations ({N}) than variables ({p})")
    mean = Y.mean(axis=0)
    X = Y - mean
    S = X.T @ X / (N - 1)
    total = np.trace(S)
    if not total > 0:
        raise DegenerateData("data have zero variance")
    eig = numcore.sym_eigen(S)
    values = np.clip(eig.values, 0.0, None)
    V = fix_signs(eig.vectors)
    return PcaProjection(V, X @ V, values / values.sum(), mean, values)


def group_cov_in_component_space(d, proj, components=(0, 1), centered=False):
    """Group and pooled covariances of selected principal-component scores.

    ``components`` are zero-based score columns.  With ``centered`` the group
    means are reported as zero, matching a display centered at the origin.
    """
    components = list(components)
    p = proj.scores.shape[1]
    if not components or any(not 0 <= c < p for c in components):
        raise ValidationError(f"component indices must lie in 0..{p - 1}")
    names = [f"PC{c + 1}" for c in components]
    sd = d.with_values(proj.scores[:, components], names)
    cs = summarize(sd)
    if centered:
        groups = tuple(
            type(gr)(gr.name, gr.n, np.zeros_like(gr.mean), gr.cov) for gr in cs.groups)
        cs = type(cs)(groups, cs.pooled, cs.variable_names)
    return cs
