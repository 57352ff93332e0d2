"""q-Pochhammer symbols and terminating basic hypergeometric series.

Series follow the Gasper--Rahman convention

    r phi s (a_1..a_r; b_1..b_s; q, z)
        = sum_k (a_1..a_r; q)_k / (b_1..b_s, q; q)_k
                * ((-1)^k q^(k(k-1)/2))^(1+s-r) * z^k

so that rows with ``r != s + 1`` (3phi1, 2phi2, ...) carry the extra
sign/power factor.  Bases outside ``(0, 1)`` are allowed because every sum
evaluated here is finite.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence, Union

from .scalar import DEFAULT_RTOL, Scalar, is_exact, one_like

TERMINATING = "terminating"

#: Hard cap for non-terminating sums requested with a finite ``max_terms``.
MAX_SERIES_TERMS = 10_000


class SeriesError(ValueError):
    """Raised for ill-posed series (no terminating numerator, zero denominator)."""


# memoized: exact evaluations reuse the same symbols across many (n, x)
@functools.lru_cache(maxsize=1 << 16, typed=True)
def qpoch(a, base, k: int) -> Scalar:
    """Finite q-Pochhammer symbol ``(a; base)_k = prod_{j<k} (1 - a base^j)``."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    result = one_like(a, base)
    factor = a
    for _ in range(k):
        result *= 1 - factor
        factor *= base
    return result


def qpoch_multi(params: Sequence, base, k: int) -> Scalar:
    """``(a_1, ..., a_m; base)_k``, the product of single symbols."""
    result = one_like(base, *params)
    for a in params:
        result *= qpoch(a, base, k)
    return result


def qpoch_inf(a, base, tol: float = 1e-17) -> float:
    """Infinite product ``(a; base)_inf`` for ``0 <= base < 1``.

    Factors are taken while ``|a base^j| >= tol * (1 - base)``; the neglected
    tail then changes the product by a relative amount below ``tol``.  The
    result is always a float, an infinite product has no exact value here.
    """
    base_f = float(base)
    if not 0.0 <= base_f < 1.0:
        raise ValueError(f"(a; q)_inf needs 0 <= q < 1, got q={base!r}")
    a_f = float(a)
    threshold = tol * (1.0 - base_f)
    result = 1.0
    term = a_f
    for _ in range(MAX_SERIES_TERMS):
        if abs(term) < threshold:
            break
        result *= 1.0 - term
        term *= base_f
        if base_f == 0.0:
            break
    return result


def _log_abs(x) -> float:
    if isinstance(x, Fraction):
        return math.log(abs(x.numerator)) - math.log(x.denominator)
    return math.log(abs(float(x)))


def termination_index(u, base, rtol: float = DEFAULT_RTOL):
    """Return ``n >= 0`` if ``u == base^(-n)``, else ``None``.

    Exact scalars are compared exactly; floats within ``rtol * base^(-n)``.
    """
    if u == 1:
        return 0
    if u == 0 or base == 0 or base == 1:
        return None
    if u < 0 or base < 0:
        return None
    est = -_log_abs(u) / _log_abs(base)
    n = round(est)
    if n < 0:
        return None
    target = base ** (-n) if is_exact(base) else float(base) ** (-n)
    if is_exact(u, base):
        return n if u == target else None
    return n if abs(float(u) - float(target)) <= rtol * abs(float(target)) else None


@dataclass(frozen=True)
class SeriesSpec:
    numerators: tuple
    denominators: tuple
    base: Scalar
    argument: Scalar
    max_terms: Union[int, str] = TERMINATING
    rtol: float = field(default=DEFAULT_RTOL, compare=False)

    def order(self) -> tuple[int, int]:
        return len(self.numerators), len(self.denominators)

    def last_index(self) -> int:
        """Largest summation index that can contribute."""
        hits = [termination_index(u, self.base, self.rtol) for u in self.numerators]
        hits = [h for h in hits if h is not None]
        if self.max_terms == TERMINATING:
            if not hits:
                raise SeriesError("series declared terminating but no numerator equals base^(-n)")
            return min(hits)
        limit = int(self.max_terms) - 1
        return min([limit] + hits)


def basic_hyp(spec: SeriesSpec, absolute: bool = False) -> Scalar:
    """Evaluate ``r phi s`` term by term up to the termination index.

    With ``absolute=True`` the sum of ``|term|`` is returned instead; it is
    the scale against which float rounding in the plain sum should be judged.
    """
    r, s = spec.order()
    q, z = spec.base, spec.argument
    last = spec.last_index()
    one = one_like(q, z, *spec.numerators, *spec.denominators)
    total = one
    term = one
    acc = abs if absolute else (lambda t: t)
    q_pow = one  # q^k during the update from k to k+1
    power = 1 + s - r
    finite = spec.max_terms != TERMINATING
    quiet = 0
    for k in range(last):
        num = one
        for a in spec.numerators:
            num *= 1 - a * q_pow
        den = 1 - q * q_pow  # (q; q) factor
        for b in spec.denominators:
            den *= 1 - b * q_pow
        if den == 0:
            raise SeriesError(f"denominator vanishes at term {k + 1}")
        # ((-1)^k q^(k(k-1)/2))^power ratio between k+1 and k is (-q^k)^power
        sign_pow = (-q_pow) ** power if power >= 0 else 1 / (-q_pow) ** (-power)
        term = term * num / den * z * sign_pow
        total += acc(term)
        q_pow *= q
        if finite:
            # stop once three consecutive terms are negligible
            quiet = quiet + 1 if abs(term) <= 1e-17 * abs(total) else 0
            if quiet >= 3:
                break
    return total


def qhyp(numerators, denominators, base, argument, max_terms=TERMINATING, absolute=False) -> Scalar:
    """Shorthand for ``basic_hyp(SeriesSpec(...))``."""
    return basic_hyp(SeriesSpec(tuple(numerators), tuple(denominators), base, argument, max_terms), absolute)


def qbinom_power(k: int, base) -> Scalar:
    """``base^(k(k-1)/2)``, the quadratic power appearing in every sum form."""
    e = k * (k - 1) // 2
    return base ** e if e >= 0 else 1 / base ** (-e)
