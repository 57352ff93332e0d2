"""Little q-Jacobi and q-Hahn polynomials and their q = 0 limits.

Both families use the rescaled parameters under which the termwise
``q -> 0`` limit exists::

    p_n^{a,b;q}(x)   = 2phi1(q^-n, ab q^(n-1); a; q, q^(x+1))
    Q_n^{a,b,N;q}(x) = 3phi2(q^-n, ab q^(n-1), q^(x-N); a, q^-N; q, q)

Every evaluation route is selectable through ``method``; all routes agree.
At ``q == 0`` the piecewise closed forms are returned and no series code is
touched.
"""

from __future__ import annotations

import enum
import functools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Union

from .qseries import qbinom_power, qhyp, qpoch, qpoch_inf
from .scalar import DEFAULT_RTOL, Scalar, is_exact, one_like, rel_diff


class ParameterError(ValueError):
    """Parameters outside the region where a family is defined."""


class ConvergenceError(RuntimeError):
    """A truncated infinite sum did not reach its stopping rule."""


class GridPoint(enum.Enum):
    INF = "inf"


#: The point at infinity of the little q-Jacobi grid (where ``q^x = 0``).
INF = GridPoint.INF

LITTLE_QJACOBI_METHODS = (
    "phi21",
    "phi31",
    "lu_series",
    "haran",
    "haran_phi32",
    "dual_phi21",
    "ul_series",
    "ul_phi22",
)
#: Routes that stay exact for rational parameters.
LITTLE_QJACOBI_EXACT_METHODS = ("phi21", "phi31", "lu_series", "haran", "haran_phi32", "dual_phi21")

QHAHN_METHODS = ("phi32", "phi32_dual", "lu_series", "haran", "reversed", "ul_series")

MAX_UL_TERMS = 2000


@dataclass(frozen=True)
class LittleQJacobiParams:
    a: Scalar
    b: Scalar
    q: Scalar
    relaxed: bool = False

    def __post_init__(self):
        if self.relaxed:
            return
        if not (0 < self.a < 1 and self.b < 1):
            raise ParameterError(f"little q-Jacobi needs 0 < a < 1, b < 1 (a={self.a}, b={self.b})")
        if not 0 <= self.q < 1:
            raise ParameterError(f"little q-Jacobi needs 0 <= q < 1 (q={self.q})")

    @property
    def exact(self) -> bool:
        return is_exact(self.a, self.b, self.q)


@dataclass(frozen=True)
class QHahnParams:
    a: Scalar
    b: Scalar
    N: int
    q: Scalar
    relaxed: bool = False

    def __post_init__(self):
        if int(self.N) != self.N or self.N < 1:
            raise ParameterError(f"N must be a positive integer (N={self.N})")
        if self.relaxed:
            return
        if not 0 <= self.q < 1:
            raise ParameterError(f"q-Hahn needs 0 <= q < 1 (q={self.q})")
        if 0 < self.a < 1 and self.b < 1:
            return
        if self.q > 0:
            edge = self.q ** (1 - self.N)
            if self.a > edge and self.b > edge:
                return
        raise ParameterError(
            f"q-Hahn needs 0 < a < 1, b < 1 or a, b > q^(1-N) (a={self.a}, b={self.b}, N={self.N})"
        )

    @property
    def exact(self) -> bool:
        return is_exact(self.a, self.b, self.q)


Params = Union[LittleQJacobiParams, QHahnParams]


def _check_method(method, allowed):
    if method not in allowed:
        raise ValueError(f"unknown method {method!r}; expected one of {allowed}")


def _qpow(q, e: int):
    """``q**e`` that also accepts negative exponents for exact scalars."""
    return q ** e if e >= 0 else 1 / q ** (-e)


@functools.lru_cache(maxsize=1 << 16, typed=True)
def _rpoch(x_pow, q, k: int):
    """``(q^x; q^-1)_k = prod_{j<k} (1 - q^(x-j))`` given ``x_pow = q^x``."""
    result = one_like(x_pow, q)
    factor = x_pow
    for _ in range(k):
        result *= 1 - factor
        factor = factor / q
    return result


# ---------------------------------------------------------------------------
# q = 0 closed forms


def little_0jacobi(n: int, x, a, b) -> Scalar:
    """Little 0-Jacobi function ``p_n^{a,b;0}(x)``, piecewise constant in x."""
    one = one_like(a, b)
    if n == 0 or x is INF:
        return one
    if n == 1:
        return -a * (1 - b) / (1 - a) if x == 0 else one
    if x < n - 1:
        return 0 * one
    if x == n - 1:
        return -a / (1 - a)
    return one


def zero_hahn(n: int, x: int, a, b, N: int) -> Scalar:
    """0-Hahn function on ``0..N``; coincides with the little 0-Jacobi function."""
    if not (0 <= n <= N and 0 <= x <= N):
        raise ParameterError(f"0-Hahn needs 0 <= n, x <= N (n={n}, x={x}, N={N})")
    return little_0jacobi(n, x, a, b)


# ---------------------------------------------------------------------------
# Little q-Jacobi


@functools.lru_cache(maxsize=1 << 16, typed=True)
def lower_entry(n: int, k: int, a, b, q, N=None) -> Scalar:
    """Entry ``L_{n,k}`` of the lower factor in ``P = L U`` (zero above the diagonal).

    With ``N`` given, the q-Hahn version carrying ``1/(q^N; q^-1)_k``.
    """
    if k > n:
        return 0 * one_like(a, b, q)
    val = (
        qbinom_power(n - k, q)
        * (-a) ** (n - k)
        * qpoch(b * q**k, q, n - k)
        * qpoch(a * b * _qpow(q, n - 1), q, k)
        / (qpoch(a, q, n) * qpoch(q, q, k))
        * _rpoch(q**n, q, k)
    )
    if N is not None:
        val /= _rpoch(q**N, q, k)
    return val


def upper_entry(k: int, x_pow, q) -> Scalar:
    """Entry ``U_{k,x} = (q^x; q^-1)_k`` given ``x_pow = q^x`` (0 for x at infinity)."""
    return _rpoch(x_pow, q, k)


def _lqj_lu(n, x, a, b, q):
    x_pow = 0 * q if x is INF else q**x
    top = n if x is INF else min(n, x)
    total = 0 * one_like(a, b, q)
    for k in range(top + 1):
        total += lower_entry(n, k, a, b, q) * upper_entry(k, x_pow, q)
    return total


def _lqj_haran(n, x, a, b, q):
    total = 0 * one_like(a, b, q)
    for k in range(min(n, x) + 1):
        e2 = (n - k) * (n + 2 * x - 3 * k - 1)  # always even
        total += (
            _qpow(q, e2 // 2)
            * (-a) ** (n - k)
            * qpoch(b * q**k, q, n - k)
            / (qpoch(a, q, n - k) * qpoch(q, q, k))
            * _rpoch(q**n, q, k)
            * _rpoch(q**x, q, k)
        )
    return total


def _lqj_ul_terms(n, x, a, b, q, tol=1e-17):
    # upper-times-lower expansion; infinite sum, float only
    a, b, q = float(a), float(b), float(q)
    start = max(n, x)
    a_inf = qpoch_inf(a, q)
    bx = qpoch(b, q, x)
    total = 0.0
    small = 0
    for k in range(start, start + MAX_UL_TERMS):
        term = (
            q ** ((k - x) * (k - x - 1) // 2)
            * (-a) ** (k - x)
            * qpoch_inf(a * b * q ** (n + k), q)
            * qpoch(b, q, k)
            / (a_inf * bx * qpoch(q, q, k))
            * _rpoch(q**k, q, n)
            * _rpoch(q**k, q, x)
        )
        yield term
        total += term
        if abs(term) < tol * abs(total) or term == 0.0:
            small += 1
            if small >= 3:
                return
        else:
            small = 0
    raise ConvergenceError("upper-times-lower series did not converge")


def _lqj_ul_series(n, x, a, b, q):
    total = 0.0
    for term in _lqj_ul_terms(n, x, a, b, q):
        total += term
    return total


def _lqj_ul_phi22(n, x, a, b, q, absolute=False):
    a, b, q = float(a), float(b), float(q)
    terms = MAX_UL_TERMS
    if n >= x:
        pre = (
            q ** ((n - x) * (n - x - 1) // 2)
            * (-a) ** (n - x)
            * qpoch_inf(a * b * q ** (2 * n), q)
            * qpoch(b, q, n)
            * _rpoch(q**n, q, x)
            / (qpoch_inf(a, q) * qpoch(b, q, x))
        )
        nums, dens, arg = [q ** (n + 1), b * q**n], [q ** (n - x + 1), a * b * q ** (2 * n)], q ** (n - x) * a
    else:
        pre = qpoch_inf(a * b * q ** (n + x), q) * _rpoch(q**x, q, n) / qpoch_inf(a, q)
        nums, dens, arg = [b * q**x, q ** (x + 1)], [q ** (x - n + 1), a * b * q ** (n + x)], a
    if absolute:
        pre = abs(pre)
    return pre * qhyp(nums, dens, q, arg, terms, absolute)


def little_qjacobi(n: int, x, p: LittleQJacobiParams, method: str = "lu_series") -> Scalar:
    """Evaluate ``p_n^{a,b;q}(x)`` for ``x`` in ``0, 1, ...`` or :data:`INF`.

    ``method`` picks the series representation; see :data:`LITTLE_QJACOBI_METHODS`.
    ``ul_series`` and ``ul_phi22`` need infinite products and always return floats.
    """
    _check_method(method, LITTLE_QJACOBI_METHODS)
    if n < 0:
        raise ValueError("degree must be nonnegative")
    if x is not INF and x < 0:
        raise ValueError("grid point must be nonnegative")
    a, b, q = p.a, p.b, p.q
    if q == 0:
        return little_0jacobi(n, x, a, b)
    if x is INF:
        # q^x -> 0: the lower-upper sum is the only route that reads it directly
        if method == "lu_series":
            return _lqj_lu(n, x, a, b, q)
        return qhyp([_qpow(q, -n), a * b * _qpow(q, n - 1)], [a], q, 0 * q)
    if method == "phi21":
        return qhyp([_qpow(q, -n), a * b * _qpow(q, n - 1)], [a], q, q ** (x + 1))
    if method == "phi31":
        pre = qbinom_power(n, q) * (-a) ** n * qpoch(b, q, n) / qpoch(a, q, n)
        return pre * qhyp([_qpow(q, -n), a * b * _qpow(q, n - 1), _qpow(q, -x)], [b], q, q ** (x + 1) / a)
    if method == "lu_series":
        return _lqj_lu(n, x, a, b, q)
    if method == "haran":
        return _lqj_haran(n, x, a, b, q)
    if method == "haran_phi32":
        c = _qpow(q, 1 - n) / a
        pre = q ** (n * x) * qpoch(b, q, n) / qpoch(c, q, n)
        return pre * qhyp([_qpow(q, -n), c, _qpow(q, -x)], [b, 0 * q], q, q)
    if method == "dual_phi21":
        if n >= x:
            pre = (
                qbinom_power(n - x, q)
                * (-a) ** (n - x)
                * qpoch(b, q, n)
                * _rpoch(q**n, q, x)
                / (qpoch(a, q, n) * qpoch(b, q, x))
            )
            return pre * qhyp([b * q**n, _qpow(q, -x)], [q ** (n - x + 1)], q, a * q**n)
        pre = _rpoch(q**x, q, n) / qpoch(a, q, n)
        return pre * qhyp([b * q**x, _qpow(q, -n)], [q ** (x - n + 1)], q, a * q**n)
    if method == "ul_series":
        return _lqj_ul_series(n, x, a, b, q)
    return _lqj_ul_phi22(n, x, a, b, q)


def little_qlaguerre(n: int, x, a, q, method: str = "lu_series", relaxed: bool = False) -> Scalar:
    """Little q-Laguerre (Wall) case, ``b = 0``."""
    b = 0 * one_like(a, q)
    return little_qjacobi(n, x, LittleQJacobiParams(a, b, q, relaxed), method)


# ---------------------------------------------------------------------------
# q-Hahn


def _qh_lu(n, x, a, b, N, q):
    total = 0 * one_like(a, b, q)
    xp = q**x
    for k in range(min(n, x) + 1):
        total += lower_entry(n, k, a, b, q, N) * upper_entry(k, xp, q)
    return total


def _qh_haran(n, x, a, b, N, q):
    total = 0 * one_like(a, b, q)
    for k in range(min(n, x) + 1):
        e2 = (n - k) * (n + 2 * x - 3 * k - 1)
        total += (
            _qpow(q, e2 // 2)
            * (-a) ** (n - k)
            * _rpoch(q ** (N - x), q, n - k)
            * qpoch(b * q**k, q, n - k)
            / (_rpoch(q**N, q, n) * qpoch(a, q, n - k) * qpoch(q, q, k))
            * _rpoch(q**n, q, k)
            * _rpoch(q**x, q, k)
        )
    return total


def _qh_reversed(n, x, a, b, N, q):
    m = N - x
    pre = qbinom_power(m, q) * (-a) ** m * qpoch(b * q**x, q, m) / qpoch(a, q, m)
    if b == 0:
        # b -> 0 limit: the two b^-1 parameters merge into the argument
        series = qhyp([_qpow(q, n - N), _qpow(q, x - N)], [_qpow(q, -N)], q, _qpow(q, 1 - n) / a)
    else:
        series = qhyp(
            [_qpow(q, n - N), _qpow(q, x - N), _qpow(q, 1 - N - n) / (a * b)],
            [_qpow(q, 1 - N) / b, _qpow(q, -N)],
            q,
            q,
        )
    return pre * series


def _qh_ul_series(n, x, a, b, N, q):
    total = 0 * one_like(a, b, q)
    for k in range(max(n, x), N + 1):
        total += (
            qbinom_power(k - x, q)
            * (-a) ** (k - x)
            * _rpoch(q**N, q, k)
            * qpoch(a * b * q ** (n + k), q, N - k)
            * _rpoch(a * _qpow(q, N - 1), q, x)
            * qpoch(b, q, k)
            / (qpoch(a, q, N) * qpoch(b, q, x) * qpoch(q, q, k))
            * _rpoch(q**k, q, n)
            * _rpoch(q**k, q, x)
            / (_rpoch(q**N, q, n) * _rpoch(q**N, q, x))
        )
    return total


def qhahn(n: int, x: int, p: QHahnParams, method: str = "lu_series") -> Scalar:
    """Evaluate ``Q_n^{a,b,N;q}(x)`` for ``0 <= n, x <= N``."""
    _check_method(method, QHAHN_METHODS)
    a, b, N, q = p.a, p.b, p.N, p.q
    if not (0 <= n <= N and 0 <= x <= N):
        raise ParameterError(f"q-Hahn needs 0 <= n, x <= N (n={n}, x={x}, N={N})")
    if q == 0:
        return zero_hahn(n, x, a, b, N)
    if method == "phi32":
        return qhyp([_qpow(q, -n), a * b * _qpow(q, n - 1), _qpow(q, x - N)], [a, _qpow(q, -N)], q, q)
    if method == "phi32_dual":
        pre = qbinom_power(n, q) * (-a) ** n * qpoch(b, q, n) / qpoch(a, q, n)
        return pre * qhyp(
            [_qpow(q, -n), a * b * _qpow(q, n - 1), _qpow(q, -x)],
            [b, _qpow(q, -N)],
            q,
            _qpow(q, x - N + 1) / a,
        )
    if method == "lu_series":
        return _qh_lu(n, x, a, b, N, q)
    if method == "haran":
        return _qh_haran(n, x, a, b, N, q)
    if method == "reversed":
        return _qh_reversed(n, x, a, b, N, q)
    return _qh_ul_series(n, x, a, b, N, q)


def qhahn_standard(n: int, arg, alpha, beta, N: int, q) -> Scalar:
    """Textbook q-Hahn ``Q_n(arg; alpha, beta, N | q)`` (argument is the 3phi2 entry)."""
    return qhyp([_qpow(q, -n), alpha * beta * _qpow(q, n + 1), arg], [alpha * q, _qpow(q, -N)], q, q)


def dual_qhahn_standard(n: int, x: int, gamma, delta, N: int, q) -> Scalar:
    """Textbook dual q-Hahn ``R_n(mu(x); gamma, delta, N | q)``."""
    return qhyp(
        [_qpow(q, -n), _qpow(q, -x), gamma * delta * _qpow(q, x + 1)], [gamma * q, _qpow(q, -N)], q, q
    )


# ---------------------------------------------------------------------------
# Weights


def weight(p: Params, x: int) -> Scalar:
    """Orthogonality weight ``w_x``.

    Exact for q-Hahn and for ``q == 0``; little q-Jacobi with ``q > 0`` needs
    infinite products and is returned as a float.
    """
    a, b, q = p.a, p.b, p.q
    if isinstance(p, QHahnParams):
        N = p.N
        if not 0 <= x <= N:
            raise ParameterError(f"x must lie in 0..N (x={x})")
        if q == 0:
            if x == 0:
                return (1 - a) / (1 - a * b)
            if x < N:
                return (1 - a) * (1 - b) / (1 - a * b) * a**x
            return (1 - b) / (1 - a * b) * a**N
        return (
            qpoch(a, q, N)
            / qpoch(a * b, q, N)
            * _rpoch(q**N, q, x)
            / _rpoch(a * _qpow(q, N - 1), q, x)
            * qpoch(b, q, x)
            / qpoch(q, q, x)
            * a**x
        )
    if q == 0:
        if x == 0:
            return (1 - a) / (1 - a * b)
        return (1 - a) * (1 - b) / (1 - a * b) * a**x
    af, bf, qf = float(a), float(b), float(q)
    return qpoch_inf(af, qf) / qpoch_inf(af * bf, qf) * qpoch(bf, qf, x) / qpoch(qf, qf, x) * af**x


def dual_weight(p: Params, n: int) -> Scalar:
    """Dual weight ``omega_n``; the reciprocal squared norm of the n-th function."""
    a, b, q = p.a, p.b, p.q
    one = one_like(a, b, q)
    if n == 0:
        return one
    if q == 0:
        if n == 1:
            return (1 - a) / (a * (1 - b))
        return (1 - a) * (1 - a * b) / (a**n * (1 - b))
    # (1 - ab q^(2n-1)) / (1 - ab q^(n-1)) * (ab; q)_n with the common factor cancelled
    val = (
        (1 - a * b * q ** (2 * n - 1))
        * qpoch(a, q, n)
        * qpoch(a * b, q, n - 1)
        / (a**n * qpoch(q, q, n) * qpoch(b, q, n))
    )
    if isinstance(p, QHahnParams):
        val *= _rpoch(q**p.N, q, n) / qpoch(a * b * q**p.N, q, n)
    return val


def evaluate(p: Params, n: int, x, method: str = "lu_series") -> Scalar:
    """Family-dispatching evaluation used by the factorization layer and the CLI."""
    if isinstance(p, QHahnParams):
        return qhahn(n, x, p, method)
    return little_qjacobi(n, x, p, method)


# ---------------------------------------------------------------------------
# Verification


class CheckResult(NamedTuple):
    residual: Scalar
    bound: float

    @property
    def passed(self) -> bool:
        return float(self.residual) <= self.bound


def lower_row_bound(n: int, p: LittleQJacobiParams) -> float:
    """Bound on ``|p_n(x)|`` valid for every ``x >= n``.

    For such x each upper entry ``(q^x; q^-1)_k`` lies in ``(0, 1]``, so the
    absolute row sum of the lower factor dominates.
    """
    a, b, q = (float(v) for v in (p.a, p.b, p.q))
    if q == 0:
        return max(1.0, a * abs(1 - b) / (1 - a), a / (1 - a))
    return sum(abs(lower_entry(n, k, a, b, q)) for k in range(n + 1))


def weight_envelope(p: LittleQJacobiParams) -> float:
    """Constant ``C`` with ``w_x <= C a^x`` for all x."""
    a, b, q = float(p.a), float(p.b), float(p.q)
    if q == 0:
        return (1 - a) / (1 - a * b) * max(1.0, abs(1 - b))
    return qpoch_inf(a, q) / qpoch_inf(a * b, q) * qpoch_inf(-abs(b), q) / qpoch_inf(q, q)


def _lqj_q0_inner(m, n, p):
    # exact: finite part plus the closed geometric tail where both functions are 1
    a, b = p.a, p.b
    start = max(m, n, 1)
    total = sum(
        (little_0jacobi(m, x, a, b) * little_0jacobi(n, x, a, b) * weight(p, x) for x in range(start)),
        0 * one_like(a, b),
    )
    return total + (1 - b) * a**start / (1 - a * b)


def verify_orthogonality(p: Params, m: int, n: int, tol: float = 1e-9, max_terms: int = 20_000) -> CheckResult:
    """Residual ``|sum_x p_m p_n w_x - delta_mn / omega_n|``.

    q-Hahn sums are finite.  Little q-Jacobi sums at ``q > 0`` are truncated
    at the first X whose certified tail is below ``tol / 10``; that tail is
    the reported bound (plus ``tol``).  The float sum uses the ``haran``
    form, which stays accurate for large x where the lower-upper sum loses
    digits.  At ``q == 0`` the tail is summed in closed form, so exact inputs
    give an exact residual.
    """
    target = (1 if m == n else 0) / dual_weight(p, n)
    if isinstance(p, QHahnParams):
        total = sum(
            (qhahn(m, x, p) * qhahn(n, x, p) * weight(p, x) for x in range(p.N + 1)),
            0 * one_like(p.a, p.b, p.q),
        )
        return CheckResult(abs(total - target), tol)
    if p.q == 0:
        return CheckResult(abs(_lqj_q0_inner(m, n, p) - target), tol)
    a = float(p.a)
    factor = lower_row_bound(m, p) * lower_row_bound(n, p) * weight_envelope(p) / (1 - a)
    start = max(m, n)
    X = start
    while factor * a**X >= tol / 10:
        X += 1
        if X > max_terms:
            raise ConvergenceError("orthogonality tail bound not reached within max_terms")
    pf = LittleQJacobiParams(float(p.a), float(p.b), float(p.q), p.relaxed)
    total = math.fsum(
        little_qjacobi(m, x, pf, "haran") * little_qjacobi(n, x, pf, "haran") * weight(pf, x) for x in range(X)
    )
    tail = factor * a**X
    return CheckResult(abs(total - float(target)), tol + tail)


def limit_q_to_0(n: int, x: int, a, b, q, N=None) -> float:
    """``|p_n^{a,b;q}(x) - p_n^{a,b;0}(x)|`` (or the q-Hahn version when N is given)."""
    if N is None:
        val = little_qjacobi(n, x, LittleQJacobiParams(a, b, q))
    else:
        val = qhahn(n, x, QHahnParams(a, b, N, q))
    return abs(float(val - little_0jacobi(n, x, a, b)))


def limit_n_to_inf(n: int, x: int, a, b, q, N: int) -> float:
    """``|Q_n^{a,b,N;q}(x) - p_n^{a,b;q}(x)|``."""
    return abs(float(qhahn(n, x, QHahnParams(a, b, N, q)) - little_qjacobi(n, x, LittleQJacobiParams(a, b, q))))


def n_to_inf_bound(n: int, x: int, a, b, q, N: int) -> float:
    """Triangle-inequality bound for :func:`limit_n_to_inf`.

    Both functions share the lower-upper sum; the q-Hahn lower entries only
    carry the extra factor ``1/(q^N; q^-1)_k``, so
    ``|Q - p| <= sum_k |L_k U_k| |1/(q^N; q^-1)_k - 1|``.
    """
    a, b, q = float(a), float(b), float(q)
    total = 0.0
    for k in range(min(n, x) + 1):
        lu = lower_entry(n, k, a, b, q) * upper_entry(k, q**x, q)
        total += abs(lu) * abs(1 / _rpoch(q**N, q, k) - 1)
    return total


def limit_asymptotic(n: int, x: int, a, b, q) -> float:
    """``|q^{-(n-x)(n-x-1)/2} p_n(x) - (-a)^{n-x}/(1-a)|`` for ``1 <= x <= n-1``."""
    if not 1 <= x <= n - 1:
        raise ValueError("asymptotic check needs 1 <= x <= n-1")
    val = little_qjacobi(n, x, LittleQJacobiParams(a, b, q)) / qbinom_power(n - x, q)
    return abs(float(val - (-a) ** (n - x) / (1 - a)))


def limit_check(kind: str, **args) -> float:
    """Dispatch to ``limit_q_to_0``, ``limit_n_to_inf`` or ``limit_asymptotic``."""
    table = {"q_to_0": limit_q_to_0, "N_to_inf": limit_n_to_inf, "asymptotic": limit_asymptotic}
    if kind not in table:
        raise ValueError(f"unknown limit kind {kind!r}")
    return table[kind](**args)


def duality_chain(n: int, x: int, a, b, N: int, q) -> list:
    """Normalized q-Hahn value followed by its five equal re-expressions."""
    lhs = _qpow(q, -(n * (n - 1) // 2)) * (-a) ** (-n) * qpoch(a, q, n) / qpoch(b, q, n)
    lhs *= qhahn(n, x, QHahnParams(a, b, N, q, relaxed=True), "lu_series")
    qi = 1 / q
    return [
        lhs,
        qhyp([_qpow(q, -n), a * b * _qpow(q, n - 1), _qpow(q, -x)], [b, _qpow(q, -N)], q, _qpow(q, x - N + 1) / a),
        qhyp([q**x, q**n, _qpow(q, 1 - n) / (a * b)], [1 / b, q**N], qi, qi),
        qhahn(n, N - x, QHahnParams(1 / b, 1 / a, N, qi, relaxed=True), "phi32"),
        qhahn_standard(n, q**x, q / b, q / a, N, qi),
        dual_qhahn_standard(x, n, q / b, q / a, N, qi),
    ]


def hahn_identification_chain(n: int, x: int, a, b, N: int, q) -> list:
    m = N - x
    lhs = _qpow(q, -(m * (m - 1) // 2)) * (-a) ** (-m) * qpoch(a, q, m) / qpoch(b * q**x, q, m)
    lhs *= qhahn(n, x, QHahnParams(a, b, N, q, relaxed=True), "lu_series")
    alpha = _qpow(q, -N) / b
    beta = _qpow(q, -N) / a
    return [
        lhs,
        qhahn_standard(N - n, _qpow(q, x - N), alpha, beta, N, q),
        dual_qhahn_standard(N - x, N - n, alpha, beta, N, q),
    ]


def verify_identity(kind: str, n: int, x: int, a, b, N: int, q) -> float:
    """Largest relative residual ``|lhs - rhs| / max(1, |lhs|, |rhs|)`` along an identity chain.

    ``duality_qhahn`` and ``hahn_identification`` need ``b != 0``.
    """
    if kind == "duality_qhahn":
        chain = duality_chain(n, x, a, b, N, q)
    elif kind == "hahn_identification":
        chain = hahn_identification_chain(n, x, a, b, N, q)
    elif kind == "reversed_vs_direct":
        p = QHahnParams(a, b, N, q, relaxed=True)
        chain = [qhahn(n, x, p, "phi32"), qhahn(n, x, p, "reversed")]
    else:
        raise ValueError(f"unknown identity {kind!r}")
    return max(rel_diff(chain[0], other) for other in chain[1:])


#: Defining series whose float evaluation cancels badly for larger n.
FLOAT_ILL_CONDITIONED = ("phi21", "phi32")

#: Methods that need infinite products and are evaluated in float64 only.
FLOAT_UL_METHODS = ("ul_series", "ul_phi22")


def _inf_factors(q: float) -> int:
    # number of factors qpoch_inf multiplies for an argument of size <= 1
    if q == 0:
        return 1
    return int(math.log(1e-17 * (1 - q)) / math.log(q)) + 1


def float_error_bound(n: int, x: int, p: Params, method: str) -> float:
    """A-priori float64 rounding bound for the float-sensitive series.

    Each term carries a relative rounding error of at most about
    ``c eps`` where ``c`` counts the roundings that form it (the factors of
    any infinite product included), so the error of the sum is bounded by
    ``c eps`` times the sum of absolute terms.  Other methods return ``0.0``
    (no claim).
    """
    if method not in FLOAT_ILL_CONDITIONED + FLOAT_UL_METHODS or p.q == 0:
        return 0.0
    a, b, q = float(p.a), float(p.b), float(p.q)
    eps = 2.220446049250313e-16
    if method == "phi21":
        scale = qhyp([q ** (-n), a * b * q ** (n - 1)], [a], q, q ** (x + 1), absolute=True)
        return (4 * n + 8) * eps * scale
    if method == "phi32":
        N = p.N
        scale = qhyp([q ** (-n), a * b * q ** (n - 1), q ** (x - N)], [a, q ** (-N)], q, q, absolute=True)
        return (4 * n + 8) * eps * scale
    if isinstance(p, QHahnParams):
        return 0.0
    if method == "ul_series":
        terms = [abs(t) for t in _lqj_ul_terms(n, x, a, b, q)]
        count = 2 * _inf_factors(q) + 4 * (n + x + len(terms)) + 16
        return count * eps * math.fsum(terms)
    count = 2 * _inf_factors(q) + 4 * (n + x + MAX_UL_TERMS.bit_length()) + 16
    return count * eps * _lqj_ul_phi22(n, x, a, b, q, absolute=True)


def method_spread(values) -> float:
    """Largest pairwise relative difference among evaluations of one quantity."""
    values = list(values)
    return max((rel_diff(u, v) for i, u in enumerate(values) for v in values[i + 1 :]), default=0.0)


__all__ = [
    "CheckResult",
    "ConvergenceError",
    "DEFAULT_RTOL",
    "GridPoint",
    "INF",
    "LITTLE_QJACOBI_EXACT_METHODS",
    "LITTLE_QJACOBI_METHODS",
    "LittleQJacobiParams",
    "ParameterError",
    "QHAHN_METHODS",
    "QHahnParams",
    "dual_qhahn_standard",
    "dual_weight",
    "evaluate",
    "FLOAT_ILL_CONDITIONED",
    "FLOAT_UL_METHODS",
    "float_error_bound",
    "hahn_identification_chain",
    "duality_chain",
    "limit_asymptotic",
    "limit_check",
    "limit_n_to_inf",
    "limit_q_to_0",
    "little_0jacobi",
    "little_qjacobi",
    "little_qlaguerre",
    "lower_entry",
    "method_spread",
    "n_to_inf_bound",
    "qhahn",
    "qhahn_standard",
    "upper_entry",
    "verify_identity",
    "verify_orthogonality",
    "weight",
    "zero_hahn",
]
