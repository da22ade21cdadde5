"""Dense symmetric linear algebra and distribution functions.

Everything here works on small dense matrices (p up to a few dozen), which
is the regime of covariance matrices of multivariate response data.  The
eigensolver is cyclic Jacobi and the distribution functions are built on
the regularized incomplete gamma and beta functions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NotPositiveDefinite, ValidationError

SYMMETRY_RTOL = 1e-12
_EPS = np.finfo(float).eps
_FPMIN = 1e-300
_SPECIAL_TOL = 1e-15
_MAX_ITER = 10000


@dataclass(frozen=True)
class EigenDecomposition:
    """Eigenvalues in descending order with matching orthonormal columns."""

    values: np.ndarray
    vectors: np.ndarray

    def reconstruct(self):
        return (self.vectors * self.values) @ self.vectors.T


def as_symmetric(S, name="matrix"):
    """Validate a square symmetric matrix and return its symmetrized copy.

    Asymmetry is measured relative to the largest absolute entry and must
    not exceed ``SYMMETRY_RTOL``.
    """
    A = np.array(S, dtype=float)
    if A.ndim == 0:
        A = A.reshape(1, 1)
    if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] == 0:
        raise ValidationError(f"{name} must be a non-empty square matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ValidationError(f"{name} has non-finite entries")
    scale = np.max(np.abs(A))
    if scale > 0 and np.max(np.abs(A - A.T)) > SYMMETRY_RTOL * scale:
        raise ValidationError(f"{name} is not symmetric")
    return 0.5 * (A + A.T)


def sym_eigen(S, max_sweeps=100):
    """Eigendecomposition of a real symmetric matrix by cyclic Jacobi rotations.

    Parameters
    ----------
    S : array_like, shape (p, p)
        Symmetric matrix.
    max_sweeps : int
        Upper bound on full sweeps over the off-diagonal entries.

    Returns
    -------
    EigenDecomposition
        Eigenvalues sorted descending; eigenvectors as columns.
    """
    A = as_symmetric(S)
    p = A.shape[0]
    V = np.eye(p)
    for _ in range(max_sweeps):
        rotated = False
        for i in range(p - 1):
            for j in range(i + 1, p):
                aij = A[i, j]
                if aij == 0.0:
                    continue
                aii, ajj = A[i, i], A[j, j]
                if abs(aij) <= _EPS * 0.5 * math.sqrt(abs(aii * ajj)) or abs(aij) < _FPMIN:
                    A[i, j] = A[j, i] = 0.0
                    continue
                theta = (ajj - aii) / (2.0 * aij)
                t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                col_i = A[:, i].copy()
                col_j = A[:, j]
                A[:, i] = c * col_i - s * col_j
                A[:, j] = s * col_i + c * col_j
                row_i = A[i, :].copy()
                row_j = A[j, :]
                A[i, :] = c * row_i - s * row_j
                A[j, :] = s * row_i + c * row_j
                A[i, j] = A[j, i] = 0.0
                v_i = V[:, i].copy()
                v_j = V[:, j]
                V[:, i] = c * v_i - s * v_j
                V[:, j] = s * v_i + c * v_j
                rotated = True
        if not rotated:
            break
    values = np.diag(A).copy()
    order = np.argsort(-values, kind="stable")
    return EigenDecomposition(values=values[order], vectors=V[:, order])


def cholesky(S):
    """Lower-triangular ``L`` with ``L @ L.T == S``.

    Raises
    ------
    NotPositiveDefinite
        If a pivot is not strictly positive (relative to the diagonal scale);
        ``pivot`` holds its zero-based index.
    """
    A = as_symmetric(S)
    p = A.shape[0]
    L = np.zeros_like(A)
    floor = 1e-14 * max(np.max(np.abs(np.diag(A))), _FPMIN)
    for j in range(p):
        d = A[j, j] - np.dot(L[j, :j], L[j, :j])
        if not d > floor:
            raise NotPositiveDefinite(pivot=j)
        L[j, j] = math.sqrt(d)
        if j + 1 < p:
            L[j + 1:, j] = (A[j + 1:, j] - L[j + 1:, :j] @ L[j, :j]) / L[j, j]
    return L


def solve_lower(L, b):
    """Forward substitution for ``L x = b``; ``b`` may be a vector or matrix."""
    L = np.asarray(L, dtype=float)
    b = np.array(b, dtype=float)
    x = np.zeros_like(b)
    for i in range(L.shape[0]):
        x[i] = (b[i] - L[i, :i] @ x[:i]) / L[i, i]
    return x


def log_det(S):
    """Natural log of the determinant of a positive definite matrix."""
    L = cholesky(S)
    return 2.0 * float(np.sum(np.log(np.diag(L))))


def mahalanobis_sq(y, center, S):
    """Squared Mahalanobis distance ``(y - center)' S^-1 (y - center)``.

    ``y`` may be a single p-vector or an (m, p) array of points, in which case
    an array of m distances is returned.
    """
    L = cholesky(S)
    y = np.asarray(y, dtype=float)
    dev = y - np.asarray(center, dtype=float)
    z = solve_lower(L, dev.T)
    d2 = np.sum(z * z, axis=0)
    return float(d2) if np.ndim(d2) == 0 else d2


# ---------------------------------------------------------------------------
# special functions


def _gamma_series(a, x):
    # P(a, x) by its power series; converges fast for x < a + 1
    term = 1.0 / a
    total = term
    ap = a
    for _ in range(_MAX_ITER):
        ap += 1.0
        term *= x / ap
        total += term
        if abs(term) < abs(total) * _SPECIAL_TOL:
            break
    return total * math.exp(-x + a * math.log(x) - math.lgamma(a))


def _gamma_cf(a, x):
    # Q(a, x) by modified Lentz continued fraction; for x >= a + 1
    b = x + 1.0 - a
    c = 1.0 / _FPMIN
    d = 1.0 / b
    h = d
    for i in range(1, _MAX_ITER):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < _FPMIN:
            d = _FPMIN
        c = b + an / c
        if abs(c) < _FPMIN:
            c = _FPMIN
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _SPECIAL_TOL:
            break
    return math.exp(-x + a * math.log(x) - math.lgamma(a)) * h


def gamma_p(a, x):
    """Regularized lower incomplete gamma function P(a, x)."""
    if a <= 0 or x < 0:
        raise ValidationError("gamma_p requires a > 0 and x >= 0")
    if x == 0:
        return 0.0
    if x < a + 1.0:
        return _gamma_series(a, x)
    return 1.0 - _gamma_cf(a, x)


def gamma_q(a, x):
    """Regularized upper incomplete gamma function Q(a, x) = 1 - P(a, x)."""
    if a <= 0 or x < 0:
        raise ValidationError("gamma_q requires a > 0 and x >= 0")
    if x == 0:
        return 1.0
    if x < a + 1.0:
        return 1.0 - _gamma_series(a, x)
    return _gamma_cf(a, x)


def _beta_cf(a, b, x):
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _FPMIN:
        d = _FPMIN
    d = 1.0 / d
    h = d
    for m in range(1, _MAX_ITER):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _FPMIN:
            d = _FPMIN
        c = 1.0 + aa / c
        if abs(c) < _FPMIN:
            c = _FPMIN
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _FPMIN:
            d = _FPMIN
        c = 1.0 + aa / c
        if abs(c) < _FPMIN:
            c = _FPMIN
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _SPECIAL_TOL:
            break
    return h


def beta_inc(a, b, x):
    """Regularized incomplete beta function I_x(a, b)."""
    if a <= 0 or b <= 0:
        raise ValidationError("beta_inc requires a, b > 0")
    if not 0.0 <= x <= 1.0:
        raise ValidationError("beta_inc requires 0 <= x <= 1")
    if x == 0.0 or x == 1.0:
        return x
    log_front = (
        math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b)
        + a * math.log(x) + b * math.log1p(-x)
    )
    front = math.exp(log_front)
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _beta_cf(a, b, x) / a
    return 1.0 - front * _beta_cf(b, a, 1.0 - x) / b


# ---------------------------------------------------------------------------
# distributions


def _check_df(*dfs):
    for df in dfs:
        if not (df > 0 and math.isfinite(df)):
            raise ValidationError(f"degrees of freedom must be positive, got {df}")


def _check_prob(prob):
    if not 0.0 < prob < 1.0:
        raise ValidationError(f"probability must lie in (0, 1), got {prob}")


def chisq_cdf(x, df):
    _check_df(df)
    if x < 0:
        raise ValidationError("chi-square argument must be nonnegative")
    return gamma_p(0.5 * df, 0.5 * x)


def chisq_sf(x, df):
    """Upper-tail probability of the chi-square distribution."""
    _check_df(df)
    if x < 0:
        raise ValidationError("chi-square argument must be nonnegative")
    return gamma_q(0.5 * df, 0.5 * x)


def _chisq_pdf(x, df):
    if x <= 0:
        return 0.0
    k = 0.5 * df
    return math.exp((k - 1.0) * math.log(x) - 0.5 * x - k * math.log(2.0) - math.lgamma(k))


def chisq_quantile(prob, df):
    """Inverse chi-square CDF.

    Newton iterations on the log of the nearer tail probability (in log x
    for the lower tail), safeguarded by bisection, to near machine
    precision relative to the root.
    """
    _check_prob(prob)
    _check_df(df)
    a = 0.5 * df
    lower = prob <= 0.5
    target = math.log(prob) if lower else math.log1p(-prob)

    def tail(x):
        return gamma_p(a, 0.5 * x) if lower else gamma_q(a, 0.5 * x)

    if lower and prob < 0.05:
        # leading term of the series for P(a, x/2)
        x = 2.0 * math.exp((target + math.lgamma(a + 1.0)) / a)
    else:
        z = normal_quantile(prob)
        h = 2.0 / (9.0 * df)
        x = df * max(1.0 - h + z * math.sqrt(h), 0.1) ** 3
    x = max(x, 1e-300)
    lo, hi = 0.0, math.inf
    for _ in range(400):
        t = tail(x)
        r = (math.log(t) if t > 0 else -math.inf) - target
        # r increases with x for the lower tail and decreases for the upper
        if (r < 0) == lower:
            lo = x
        else:
            hi = x
        dens = _chisq_pdf(x, df)
        if r == 0:
            return x
        if lower and dens > 0 and t > 0:
            x_new = x * math.exp(-r * t / (dens * x))
        elif not lower and dens > 0 and t > 0:
            x_new = x + r * t / dens
        else:
            x_new = math.nan
        if not lo < x_new < hi:
            x_new = 2.0 * lo + 1.0 if hi == math.inf else (0.5 * (lo + hi) if lo > 0 else 0.5 * hi)
        if abs(x_new - x) <= 4 * _EPS * x:
            return x_new
        x = x_new
    return x


def f_sf(x, df1, df2):
    """Upper-tail probability of the F distribution."""
    _check_df(df1, df2)
    if x < 0:
        raise ValidationError("F argument must be nonnegative")
    if x == 0:
        return 1.0
    return beta_inc(0.5 * df2, 0.5 * df1, df2 / (df2 + df1 * x))


def normal_cdf(x):
    return 0.5 * math.erfc(-x / math.sqrt(2.0))


_A = (-3.969683028665376e01, 2.209460984245205e02, -2.759285104469687e02,
      1.383577518672690e02, -3.066479806614716e01, 2.506628277459239e00)
_B = (-5.447609879822406e01, 1.615858368580409e02, -1.556989798598866e02,
      6.680131188771972e01, -1.328068155288572e01)
_C = (-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e00,
      -2.549732539343734e00, 4.374664141464968e00, 2.938163982698783e00)
_D = (7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e00,
      3.754408661907416e00)


def normal_quantile(prob):
    """Inverse standard normal CDF.

    Rational approximation (Acklam) followed by one Halley correction, which
    brings the error to roughly machine precision.
    """
    _check_prob(prob)
    if prob > 0.5:
        return -normal_quantile(1.0 - prob)
    p_low = 0.02425
    if prob < p_low:
        q = math.sqrt(-2.0 * math.log(prob))
        x = (((((_C[0] * q + _C[1]) * q + _C[2]) * q + _C[3]) * q + _C[4]) * q + _C[5]) / \
            ((((_D[0] * q + _D[1]) * q + _D[2]) * q + _D[3]) * q + 1.0)
    else:
        q = prob - 0.5
        r = q * q
        x = (((((_A[0] * r + _A[1]) * r + _A[2]) * r + _A[3]) * r + _A[4]) * r + _A[5]) * q / \
            (((((_B[0] * r + _B[1]) * r + _B[2]) * r + _B[3]) * r + _B[4]) * r + 1.0)
    e = normal_cdf(x) - prob
    u = e * math.sqrt(2.0 * math.pi) * math.exp(0.5 * x * x)
    return x - u / (1.0 + 0.5 * x * u)
