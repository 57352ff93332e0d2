"""Lower-upper factorization of orthogonal polynomial evaluation matrices.

For a complete orthogonal system ``p_n`` on distinct points ``y_x`` whose
dual system lives on distinct points ``z_n``, the evaluation matrix
``P[n, x] = p_n(y_x)`` factors as ``P = B D C`` with

    C[k, x] = prod_{j<k} (y_j - y_x)        (upper triangular, cellular basis)
    B[n, k] = prod_{i<k} (z_i - z_n)        (lower triangular)
    D       = diag(delta_k)

Both triangular factors have closed-form inverses.  The same data also
gives an upper-times-lower expansion of ``P``.

Matrices are numpy arrays of ``dtype=object`` holding ``Fraction`` entries
in exact mode, and ``float64`` arrays otherwise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from . import families as fam
from .families import (
    INF,
    CheckResult,
    ConvergenceError,
    LittleQJacobiParams,
    ParameterError,
    QHahnParams,
    _qpow,
    _rpoch,
)
from .qseries import qbinom_power, qpoch
from .scalar import is_exact, one_like

DELTA_METHODS = ("limit_formula", "closed_jacobi", "closed_hahn", "sixphi4")


class SingularFactorError(ArithmeticError):
    """A diagonal coefficient or a grid difference vanished."""


def _new_matrix(size: int, exact: bool) -> np.ndarray:
    if exact:
        out = np.empty((size, size), dtype=object)
        out.fill(0)
        return out
    return np.zeros((size, size))


@dataclass
class TriangularMatrix:
    entries: np.ndarray
    orientation: str  # "lower" or "upper"

    def __post_init__(self):
        if self.orientation not in ("lower", "upper"):
            raise ValueError("orientation must be 'lower' or 'upper'")

    @property
    def size(self) -> int:
        return self.entries.shape[0]

    def __matmul__(self, other):
        rhs = other.entries if isinstance(other, TriangularMatrix) else other
        return self.entries @ rhs

    def is_triangular(self) -> bool:
        part = np.triu(self.entries, 1) if self.orientation == "lower" else np.tril(self.entries, -1)
        return all(v == 0 for v in part.ravel())


def _distinct(grid, label):
    seen = set()
    for v in grid:
        if v in seen:
            raise SingularFactorError(f"repeated {label} value {v!r}")
        seen.add(v)


def cellular(k: int, y, grid) -> object:
    """Cellular polynomial ``c_k(y) = prod_{j<k} (grid[j] - y)``."""
    if k > len(grid):
        raise ValueError("k exceeds grid size")
    result = one_like(y, *grid[:k])
    for j in range(k):
        result *= grid[j] - y
    return result


def cellular_matrix(grid) -> TriangularMatrix:
    """Upper triangular ``C[k, x] = c_k(y_x)``."""
    size = len(grid)
    out = _new_matrix(size, is_exact(*grid))
    for k in range(size):
        for x in range(k, size):
            out[k, x] = cellular(k, grid[x], grid)
    return TriangularMatrix(out, "upper")


def dual_matrix(zgrid) -> TriangularMatrix:
    """Lower triangular ``B[n, k] = prod_{i<k} (z_i - z_n)``."""
    size = len(zgrid)
    out = _new_matrix(size, is_exact(*zgrid))
    for n in range(size):
        for k in range(n + 1):
            out[n, k] = cellular(k, zgrid[n], zgrid)
    return TriangularMatrix(out, "lower")


def _inverse_entry(grid, k, n):
    # prod_{j<=n, j != k} (grid[j] - grid[k])^-1
    acc = one_like(*grid[: n + 1])
    for j in range(n + 1):
        if j != k:
            acc *= grid[j] - grid[k]
    return 1 / acc


def invert_triangular(M: TriangularMatrix, grid) -> TriangularMatrix:
    """Closed-form inverse of a cellular (upper) or dual (lower) matrix built on ``grid``."""
    _distinct(grid, "grid")
    size = M.size
    if len(grid) < size:
        raise ValueError("grid shorter than matrix")
    out = _new_matrix(size, is_exact(*grid[:size]))
    for k in range(size):
        for n in range(k, size):
            if M.orientation == "upper":
                out[k, n] = _inverse_entry(grid, k, n)
            else:
                out[n, k] = _inverse_entry(grid, k, n)
    return TriangularMatrix(out, M.orientation)


def lower_from_upper(P: np.ndarray, C: TriangularMatrix) -> TriangularMatrix:
    """Solve ``P = B C`` for lower triangular ``B`` by column elimination.

    Independent of the closed-form inverse; used to cross-check it.
    """
    size = C.size
    exact = P.dtype == object
    B = _new_matrix(size, exact)
    for k in range(size):
        if C.entries[k, k] == 0:
            raise SingularFactorError(f"zero diagonal in C at {k}")
        for n in range(size):
            acc = P[n, k]
            for j in range(k):
                acc = acc - B[n, j] * C.entries[j, k]
            B[n, k] = acc / C.entries[k, k]
    for n in range(size):
        for k in range(n + 1, size):
            if exact:
                B[n, k] = 0
            elif abs(B[n, k]) > 1e-9 * max(1.0, float(np.max(np.abs(B[n, :n + 1])))):
                raise SingularFactorError("P is not lower-times-upper for this C")
            else:
                B[n, k] = 0.0
    return TriangularMatrix(B, "lower")


# ---------------------------------------------------------------------------
# Systems


@dataclass
class OrthogonalSystem:
    """Evaluation data of a family on the grid ``y_x = q^x``.

    ``p_nu[n]`` is the value at the limit point ``y_nu`` of the unnormalized
    polynomial ``p_n``; family values are normalized to 1 there, so
    ``P[n, x] = p_nu[n] * family(n, x)``.  ``omega`` and ``w`` are the weights
    of the unnormalized system.
    """

    params: object
    size: int
    finite: bool
    y: list
    z: list
    y_nu: object
    p_nu: list
    evaluate: Callable = field(repr=False)
    family_weight: Callable = field(repr=False)
    family_dual_weight: Callable = field(repr=False)

    @property
    def exact(self) -> bool:
        return is_exact(*self.y, *self.z)

    @property
    def is_qhahn(self) -> bool:
        return isinstance(self.params, QHahnParams)

    def P_normalized(self, method: Optional[str] = None) -> np.ndarray:
        """Matrix of family values ``p_n^{a,b;q}(x)`` on the system's index window."""
        if method is None:
            method = "phi32" if self.is_qhahn else "phi21"
            if not self.exact:
                method = "haran"
        out = _new_matrix(self.size, self.exact)
        for n in range(self.size):
            for x in range(self.size):
                out[n, x] = self.evaluate(n, x, method)
        return out

    def P(self, method: Optional[str] = None) -> np.ndarray:
        Pn = self.P_normalized(method)
        for n in range(self.size):
            Pn[n, :] = Pn[n, :] * self.p_nu[n]
        return Pn

    def w(self, x):
        return self.family_weight(x)

    def omega(self, n):
        # reweighted so that the unnormalized system satisfies P W P^t = Omega^-1
        return self.family_dual_weight(n) / self.p_nu[n] ** 2


def _p_at_limit(n, a, b, q):
    try:
        return (-a) ** (-n) * _qpow(q, -(n * (n - 1) // 2)) * qpoch(a, q, n) / qpoch(b, q, n)
    except (OverflowError, ZeroDivisionError):
        # float mode only: q^(-n(n-1)/2) out of range
        return math.copysign(math.inf, (-1.0) ** n)


def build_system(params, cutoff: Optional[int] = None) -> OrthogonalSystem:
    """Instantiate the framework for a little q-Jacobi or q-Hahn parameter set.

    Little q-Jacobi systems are truncated to indices ``0..cutoff`` (default 20)
    with limit point ``y_nu = 0``; q-Hahn systems use ``0..N`` and ``y_nu = y_N``.
    """
    a, b, q = params.a, params.b, params.q
    if q == 0:
        raise ParameterError("the grid q^x degenerates at q = 0; use renormalized_factors")
    if isinstance(params, QHahnParams):
        size = params.N + 1
        finite = True
        y_nu = q**params.N
    else:
        size = (20 if cutoff is None else cutoff) + 1
        finite = False
        y_nu = 0 * q
    y = [q**x for x in range(size)]
    z = [_qpow(q, -i) + a * b * _qpow(q, i - 1) for i in range(size)]
    _distinct(y, "grid")
    _distinct(z, "dual grid")
    if not finite and y_nu in y:
        raise SingularFactorError("limit point coincides with a grid point")
    p_nu = [_p_at_limit(n, a, b, q) for n in range(size)]

    def evaluate(n, x, method="lu_series"):
        return fam.evaluate(params, n, x, method)

    return OrthogonalSystem(
        params=params,
        size=size,
        finite=finite,
        y=y,
        z=z,
        y_nu=y_nu,
        p_nu=p_nu,
        evaluate=evaluate,
        family_weight=lambda x: fam.weight(params, x),
        family_dual_weight=lambda n: fam.dual_weight(params, n),
    )


# ---------------------------------------------------------------------------
# Diagonal coefficients


def _sixphi4(m, a, b, q):
    """Very-well-poised confluent 6phi4 with ``A = ab/q`` and argument ``q^m / a``.

    The pair ``+-(qA)^(1/2)`` over ``+-A^(1/2)`` is folded into
    ``(1 - A q^(2k)) / (1 - A)``; the zero numerator contributes nothing and
    the 6phi4 convention factor is ``((-1)^k q^(k(k-1)/2))^-1``.
    """
    A = a * b / q
    one = one_like(a, b, q)
    arg = q**m / a
    total = 0 * one
    for k in range(m + 1):
        t = (
            (1 - A * q ** (2 * k))
            / (1 - A)
            * qpoch(A, q, k)
            * qpoch(a, q, k)
            * qpoch(_qpow(q, -m), q, k)
            / (qpoch(q, q, k) * qpoch(b, q, k) * qpoch(a * b * q**m, q, k))
        )
        t = t * arg**k / ((-1) ** k * qbinom_power(k, q))
        total += t
    return q**m / (qpoch(a * b, q, m) * qpoch(q, q, m)) * total


def delta(m: int, system: OrthogonalSystem, method: str = "limit_formula"):
    """Diagonal coefficient ``delta_m`` of ``P = B D C``."""
    if method not in DELTA_METHODS:
        raise ValueError(f"unknown delta method {method!r}")
    p = system.params
    a, b, q = p.a, p.b, p.q
    if method == "limit_formula":
        total = 0 * one_like(*system.y)
        z = system.z
        for n in range(m + 1):
            term = system.p_nu[n]
            for i in range(m + 1):
                if i != n:
                    term = term / (z[i] - z[n])
            total += term
        den = one_like(*system.y)
        for j in range(m):
            den *= system.y[j] - system.y_nu
        return total / den
    if method == "closed_jacobi":
        if system.is_qhahn:
            raise ValueError("closed_jacobi applies to little q-Jacobi systems only")
        return (q / a) ** m / (qpoch(b, q, m) * qpoch(q, q, m))
    if method == "closed_hahn":
        if not system.is_qhahn:
            raise ValueError("closed_hahn applies to q-Hahn systems only")
        return (q / a) ** m / (qpoch(b, q, m) * qpoch(q, q, m) * _rpoch(q**p.N, q, m))
    val = _sixphi4(m, a, b, q)
    if system.is_qhahn:
        val = val / _rpoch(q**p.N, q, m)
    return val


# ---------------------------------------------------------------------------
# Factorization


@dataclass
class Factorization:
    B: TriangularMatrix
    D: list
    C: TriangularMatrix
    residual: float

    def reconstruct(self) -> np.ndarray:
        BD = self.B.entries.copy()
        for k, d in enumerate(self.D):
            BD[:, k] = BD[:, k] * d
        return BD @ self.C.entries


def _max_abs(M: np.ndarray):
    vals = [abs(v) for v in M.ravel()]
    return max(vals) if vals else 0


def factor(system: OrthogonalSystem, method: Optional[str] = None, delta_method: str = "limit_formula") -> Factorization:
    """``P = B D C`` with closed-form ``B``, ``C`` and ``delta_k`` on the diagonal.

    The reported residual is ``max |P - B D C|`` measured row-wise after
    dividing row n by ``p_nu[n]``, i.e. on the matrix of normalized family
    values.  Exact systems give an exact residual.
    """
    B = dual_matrix(system.z)
    C = cellular_matrix(system.y)
    D = [delta(k, system, delta_method) for k in range(system.size)]
    for k, d in enumerate(D):
        if d == 0:
            raise SingularFactorError(f"delta_{k} vanishes")
    fact = Factorization(B, D, C, 0.0)
    R = fact.reconstruct()
    for n in range(system.size):
        R[n, :] = R[n, :] / system.p_nu[n]
    Pn = system.P_normalized(method)
    diff = _max_abs(Pn - R)
    fact.residual = diff if system.exact else float(diff)
    return fact


def renormalized_factors(params, size: int):
    """Lower and upper factors ``L``, ``U`` with ``P = L U`` on normalized values.

    ``U[k, x] = (q^x; q^-1)_k`` and ``L`` is the series coefficient matrix;
    at ``q == 0`` both are the piecewise limits (``U`` an indicator, ``L``
    lower bidiagonal).
    """
    a, b, q = params.a, params.b, params.q
    N = params.N if isinstance(params, QHahnParams) else None
    if N is not None and size > N + 1:
        raise ValueError("size exceeds N + 1")
    exact = is_exact(a, b, q)
    L = _new_matrix(size, exact)
    U = _new_matrix(size, exact)
    one = one_like(a, b, q)
    for k in range(size):
        for x in range(k, size):
            U[k, x] = one if q == 0 else fam.upper_entry(k, q**x, q)
    for n in range(size):
        for k in range(n + 1):
            if q != 0:
                L[n, k] = fam.lower_entry(n, k, a, b, q, N)
            elif k == n:
                L[n, n] = one if n == 0 else ((1 - a * b) / (1 - a) if n == 1 else 1 / (1 - a))
            elif k == n - 1:
                L[n, k] = -a * (1 - b) / (1 - a) if n == 1 else -a / (1 - a)
    return TriangularMatrix(L, "lower"), TriangularMatrix(U, "upper")


# ---------------------------------------------------------------------------
# Upper times lower


def _ul_term(k, n, x, system, dk):
    z, y = system.z, system.y
    t = 1 / dk
    for i in range(k + 1):
        if i != n:
            t = t / (z[i] - z[n])
    for j in range(k + 1):
        if j != x:
            t = t / (y[j] - y[x])
    return t


def _extend(system: OrthogonalSystem, size: int) -> OrthogonalSystem:
    if size <= system.size:
        return system
    return build_system(system.params, cutoff=size - 1)


def ul_value(n: int, x: int, system: OrthogonalSystem, tol: float = 1e-15, max_terms: int = 400):
    """Normalized value ``p_n(x)`` from the upper-times-lower expansion.

    Finite systems sum ``k = max(n, x) .. N`` exactly.  Truncated-infinite
    systems stop after three consecutive terms below ``tol * |partial sum|``.
    """
    p = system.params
    if system.finite:
        pref = system.p_nu[n] / (system.family_dual_weight(n) * system.family_weight(x))
        total = 0 * one_like(*system.y)
        for k in range(max(n, x), system.size):
            total += _ul_term(k, n, x, system, delta(k, system, "closed_hahn"))
        return pref * total
    # little q-Jacobi: float weights, growing window
    pf = LittleQJacobiParams(float(p.a), float(p.b), float(p.q), relaxed=True)
    sysf = build_system(pf, cutoff=max(n, x) + 40)
    pref = sysf.p_nu[n] / (sysf.family_dual_weight(n) * sysf.family_weight(x))
    total = 0.0
    quiet = 0
    k = max(n, x)
    while k < max(n, x) + max_terms:
        if k >= sysf.size:
            sysf = _extend(sysf, 2 * sysf.size)
        term = _ul_term(k, n, x, sysf, delta(k, sysf, "closed_jacobi"))
        total += term
        if term == 0.0 or abs(term) < tol * abs(total):
            quiet += 1
            if quiet >= 3:
                return pref * total
        else:
            quiet = 0
        k += 1
    raise ConvergenceError("upper-times-lower sum did not meet the stopping rule")


# ---------------------------------------------------------------------------
# Verification


def verify_vandermonde_identity(m: int, n: int, grid):
    """``|sum_{k=m}^n prod_{j<m}(y_j - y_k) prod_{j<=n, j!=k}(y_j - y_k)^-1 - delta_mn|``."""
    if m > n:
        raise ValueError("need m <= n")
    total = 0 * one_like(*grid[: n + 1])
    for k in range(m, n + 1):
        total += cellular(m, grid[k], grid) * _inverse_entry(grid, k, n)
    return abs(total - (1 if m == n else 0))


def inverse_residual(grid, orientation: str = "upper", order: str = "right"):
    """``max |M M^-1 - I|`` (``order="right"``) or ``max |M^-1 M - I|`` (``"left"``).

    ``M`` is the cellular matrix on ``grid`` (or the dual matrix when
    ``orientation="lower"``) and ``M^-1`` its closed-form inverse.  Exact
    grids give exact residuals.  In float64 the right product on a geometric
    grid ``q^x`` cancels terms of size ``q^(-n(n-1)/2)``, so expect its error
    to grow quickly as q decreases; the left product does not cancel.
    """
    M = cellular_matrix(grid) if orientation == "upper" else dual_matrix(grid)
    Mi = invert_triangular(M, grid)
    prod = M.entries @ Mi.entries if order == "right" else Mi.entries @ M.entries
    size = len(grid)
    return max(abs(prod[i, j] - (1 if i == j else 0)) for i in range(size) for j in range(size))


def verify_biorthogonality(system: OrthogonalSystem, window: Optional[int] = None) -> CheckResult:
    """Residual of ``P W P^t Omega = I`` and ``P^t Omega P W = I``.

    Both identities are checked on normalized family values (the row scaling
    by ``p_nu`` cancels).  For truncated-infinite systems only the leading
    ``window`` indices are compared (default half the cutoff) and the
    returned bound is the certified truncation tail there plus float slack.
    """
    size = system.size
    exact = system.exact and system.finite
    if system.finite:
        params = system.params
    else:
        p = system.params
        params = LittleQJacobiParams(float(p.a), float(p.b), float(p.q), relaxed=True)
    L, U = renormalized_factors(params, size)
    Pn = L.entries @ U.entries
    w = [fam.weight(params, x) for x in range(size)]
    om = [fam.dual_weight(params, n) for n in range(size)]
    W = window if window is not None else (size if system.finite else size // 2)
    zero = 0 * one_like(*w)
    residual = zero
    for n in range(W):
        for m in range(W):
            s = sum((Pn[n, x] * Pn[m, x] * w[x] for x in range(size)), zero) * om[m]
            residual = max(residual, abs(s - (1 if n == m else 0)))
    for x in range(W):
        for x2 in range(W):
            s = sum((Pn[n, x] * Pn[n, x2] * om[n] for n in range(size)), zero) * w[x2]
            residual = max(residual, abs(s - (1 if x == x2 else 0)))
    if system.finite:
        return CheckResult(residual, 0.0 if exact else 1e-10)
    a, b, q = params.a, params.b, params.q
    X = size - 1
    # x-sum tail beyond X: |p_n(x)| <= row bound for x >= n, w_x <= C a^x
    env = fam.weight_envelope(params) * a ** (X + 1) / (1 - a)
    rows = [fam.lower_row_bound(n, params) for n in range(W)]
    tail = max(rows[n] * rows[m] * env * om[m] for n in range(W) for m in range(W))
    # n-sum tail beyond X: for x < n, |p_n(x)| <= sum_{k<=x} |L_{n,k}|
    extra = range(X + 1, X + 41)
    cum = {}
    for n in extra:
        acc = 0.0
        for x in range(W):
            acc += abs(fam.lower_entry(n, x, a, b, q))
            cum[n, x] = acc
    om_extra = {n: fam.dual_weight(params, n) for n in extra}
    for x in range(W):
        for x2 in range(W):
            t = sum(cum[n, x] * cum[n, x2] * om_extra[n] for n in extra) * w[x2]
            tail = max(tail, t)
    return CheckResult(residual, tail + 1e-10)


def residual_curve(params, cutoffs) -> list:
    """``(cutoff, factor residual, biorthogonality residual)`` for each cutoff.

    Reported as-is; nothing is asserted about the behaviour as the cutoff grows.
    """
    rows = []
    for c in cutoffs:
        system = build_system(params, cutoff=c)
        rows.append((c, factor(system).residual, verify_biorthogonality(system).residual))
    return rows


__all__ = [
    "DELTA_METHODS",
    "Factorization",
    "OrthogonalSystem",
    "SingularFactorError",
    "TriangularMatrix",
    "build_system",
    "cellular",
    "cellular_matrix",
    "delta",
    "dual_matrix",
    "factor",
    "invert_triangular",
    "inverse_residual",
    "lower_from_upper",
    "renormalized_factors",
    "residual_curve",
    "ul_value",
    "verify_biorthogonality",
    "verify_vandermonde_identity",
]

