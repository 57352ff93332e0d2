"""Product formula for the little 0-Jacobi functions and the p-adic picture.

Everything here lives at ``q = 0``: the functions ``p_n^{a,b;0}`` are
piecewise constant, the linearization coefficients ``c_{x,y,z}`` have a
six-case closed form, and for ``a = p^{-r(d-m)}, b = p^{-rm}`` the weights
are the masses of a Haar measure projected to an orbit space.

The convolution algebra is realised on functions on ``{0, 1, ..., }`` that
are constant from ``K`` on (the window).  In the ``g`` and ``ghat`` bases
the last index ``K`` therefore stands for the tail indicator ``c_K``; its
mass is ``nu(K)`` and ``nu(K + 1)`` is taken to be 0.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterator, Optional

from .families import LittleQJacobiParams, ParameterError, dual_weight, little_0jacobi, weight
from .scalar import Scalar, one_like

DEFAULT_WINDOW = 32
BASES = ("e", "c", "g", "ghat")


def _check_ab(a, b):
    if not (0 < a < 1 and b < 1):
        raise ParameterError(f"need 0 < a < 1 and b < 1 (a={a}, b={b})")


# ---------------------------------------------------------------------------
# Linearization coefficients


def product_coeff(x: int, y: int, z: int, a, b) -> Scalar:
    """Coefficient ``c_{x,y,z}`` in ``p_n(x) p_n(y) = sum_z c_{x,y,z} p_n(z)``."""
    one = one_like(a, b)
    if x != y:
        return one if z == min(x, y) else 0 * one
    if z < x:
        return 0 * one
    if x == 0:
        if z == 0:
            return (1 - 2 * a + a * b) / (1 - a)
        return (1 - b) * a**z
    if z == x:
        return (1 - 2 * a) / (1 - a)
    return a ** (z - x)


def linearize(n: int, x: int, y: int, a, b) -> Scalar:
    """``sum_z c_{x,y,z} p_n(z)``, with the infinite z-range summed in closed form.

    For ``x == y`` the coefficients are geometric in z and ``p_n(z) = 1`` once
    ``z >= n``, so everything past ``Z = max(n, x + 1)`` collapses to
    ``sum_{z >= Z} c_{x,x,z}``.
    """
    if x != y:
        return little_0jacobi(n, min(x, y), a, b)
    Z = max(n, x + 1)
    total = sum((product_coeff(x, x, z, a, b) * little_0jacobi(n, z, a, b) for z in range(x, Z)), 0 * one_like(a, b))
    # geometric tail, z >= Z > x
    head = (1 - b) * a**Z if x == 0 else a ** (Z - x)
    return total + head / (1 - a)


def verify_linearization(n_max: int, x: int, y: int, a, b) -> Scalar:
    """Max over ``n <= n_max`` of ``|p_n(x) p_n(y) - sum_z c_{x,y,z} p_n(z)|``."""
    _check_ab(a, b)
    worst = 0 * one_like(a, b)
    for n in range(n_max + 1):
        lhs = little_0jacobi(n, x, a, b) * little_0jacobi(n, y, a, b)
        worst = max(worst, abs(lhs - linearize(n, x, y, a, b)))
    return worst


def sym_coeff(x: int, y: int, z: int, a, b, method: str = "closed") -> Scalar:
    """Symmetric coefficient ``C_{x,y,z}`` (linearization against the weights)."""
    _check_ab(a, b)
    one = one_like(a, b)
    if method in ("spherical_sum", "spherical_abs"):
        # spherical_abs sums |terms|, the scale for float rounding in spherical_sum
        p0 = LittleQJacobiParams(a, b, 0 * one)
        total = 0 * one
        for n in range(min(x, y, z) + 2):
            term = little_0jacobi(n, x, a, b) * little_0jacobi(n, y, a, b) * little_0jacobi(n, z, a, b)
            term *= dual_weight(p0, n)
            total += abs(term) if method == "spherical_abs" else term
        return (1 - a) / (1 - a * b) * total
    if method != "closed":
        raise ValueError(f"unknown method {method!r}")
    x, y, z = sorted((x, y, z))
    if x < y:
        return 0 * one
    if x == 0:
        return (1 - 2 * a + a * b) / (1 - a) if z == 0 else one
    if x < z:
        return 1 / ((1 - b) * a**x)
    return (1 - 2 * a) / ((1 - a) * (1 - b) * a**x)


def nonneg_region(a, b) -> bool:
    """Whether every ``c_{x,y,z}`` is nonnegative."""
    _check_ab(a, b)
    return a <= Fraction(1, 2) and 2 - 1 / a <= b


def nonneg_scan(a, b, limit: int = 10):
    """Exhaustive sign check over ``x, y, z <= limit``.

    Returns ``(all_nonnegative, witness)``; the witness is the first
    ``(x, y, z, c)`` with ``c < 0``, or None.
    """
    _check_ab(a, b)
    for x in range(limit + 1):
        for y in range(limit + 1):
            for z in range(limit + 1):
                c = product_coeff(x, y, z, a, b)
                if c < 0:
                    return False, (x, y, z, c)
    return True, None


# ---------------------------------------------------------------------------
# p-adic parameters and measures


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    f = 2
    while f * f <= p:
        if p % f == 0:
            return False
        f += 1
    return True


@dataclass(frozen=True)
class PadicParams:
    p: int
    r: int
    d: int
    m: int
    e: int = 1  # ramification index; kept for the record, it enters no formula

    def __post_init__(self):
        if not _is_prime(self.p):
            raise ParameterError(f"p must be prime (p={self.p})")
        if self.r < 1 or self.d < 1 or self.e < 1:
            raise ParameterError("r, d and e must be positive integers")
        if not 1 <= self.m < self.d:
            raise ParameterError(f"need 1 <= m < d (m={self.m}, d={self.d})")

    @property
    def a(self) -> Fraction:
        return Fraction(1, self.p ** (self.r * (self.d - self.m)))

    @property
    def b(self) -> Fraction:
        return Fraction(1, self.p ** (self.r * self.m))


def padic_params(p: int, r: int, d: int, m: int) -> tuple[Fraction, Fraction]:
    pp = PadicParams(p, r, d, m)
    return pp.a, pp.b


def padic_sweep(p_max: int = 13, r_max: int = 3, d_max: int = 6) -> Iterator[PadicParams]:
    for p in range(2, p_max + 1):
        if not _is_prime(p):
            continue
        for r in range(1, r_max + 1):
            for d in range(2, d_max + 1):
                for m in range(1, d):
                    yield PadicParams(p, r, d, m)


@dataclass(frozen=True)
class OrbitMeasure:
    """Point masses ``mu(k) = w_k^{a,b;0}`` on the orbit space; ``mu(inf) = 0``."""

    a: Scalar
    b: Scalar

    def __post_init__(self):
        _check_ab(self.a, self.b)

    def mu(self, k) -> Scalar:
        if k == "inf":
            return 0 * one_like(self.a, self.b)
        a, b = self.a, self.b
        if k == 0:
            return (1 - a) / (1 - a * b)
        return (1 - a) * (1 - b) * a**k / (1 - a * b)

    def nu(self, i: int) -> Scalar:
        """``nu(i) = sum_{j >= i} mu(j)``."""
        if i == 0:
            return one_like(self.a, self.b)
        return (1 - self.b) * self.a**i / (1 - self.a * self.b)

    def total(self, upto: int) -> Scalar:
        return sum((self.mu(k) for k in range(upto + 1)), 0 * one_like(self.a, self.b))


def orbit_measure(a, b) -> OrbitMeasure:
    return OrbitMeasure(a, b)


def nu(i: int, measure: OrbitMeasure) -> Scalar:
    return measure.nu(i)


def laguerre_measure_check(p: int, r: int, m: int, j: int) -> Fraction:
    """``|(1 - p^-rm) p^-rjm - w_j^{a,0;0}|`` with ``a = p^-rm``."""
    if not _is_prime(p) or r < 1 or m < 1 or j < 0:
        raise ParameterError("need prime p, r >= 1, m >= 1, j >= 0")
    a = Fraction(1, p ** (r * m))
    orbit = (1 - a) * a**j
    return abs(orbit - weight(LittleQJacobiParams(a, Fraction(0), Fraction(0)), j))


# ---------------------------------------------------------------------------
# Convolution algebra on the window 0..K


@dataclass(frozen=True)
class ConvElement:
    basis: str
    coeffs: Dict[int, Scalar]
    measure: OrbitMeasure
    window: int = DEFAULT_WINDOW

    def __post_init__(self):
        if self.basis not in BASES:
            raise ValueError(f"unknown basis {self.basis!r}")
        bad = [i for i in self.coeffs if not 0 <= i <= self.window]
        if bad:
            raise ValueError(f"indices {bad} outside the window 0..{self.window}")

    def vector(self) -> list:
        zero = 0 * one_like(self.measure.a, self.measure.b)
        return [self.coeffs.get(i, zero) for i in range(self.window + 1)]

    def to(self, basis: str) -> "ConvElement":
        vec = _from_c(_to_c(self.vector(), self.basis, self.measure), basis, self.measure)
        return _element(basis, vec, self.measure)

    def at(self, x: int) -> Scalar:
        """Value of the element as a function at the point x."""
        g = self.to("g").vector()
        return g[min(x, self.window)]


def _element(basis, vec, measure) -> ConvElement:
    return ConvElement(basis, {i: v for i, v in enumerate(vec) if v != 0}, measure, len(vec) - 1)


def basis_element(basis: str, i: int, measure: OrbitMeasure, window: int = DEFAULT_WINDOW) -> ConvElement:
    return ConvElement(basis, {i: one_like(measure.a, measure.b)}, measure, window)


def _mass(i: int, K: int, measure: OrbitMeasure) -> Scalar:
    # mu(i) inside the window, nu(K) for the tail class
    return measure.nu(K) if i == K else measure.mu(i)


def _to_c(vec, basis, measure):
    K = len(vec) - 1
    if basis == "c":
        return list(vec)
    if basis == "ghat":
        vec = [v / _mass(i, K, measure) for i, v in enumerate(vec)]
        basis = "g"
    if basis == "g":
        # g_i = c_i - c_{i+1}, g_K = c_K
        return [vec[0]] + [vec[i] - vec[i - 1] for i in range(1, K + 1)]
    # e_i = c_i / nu(i) - c_{i-1} / nu(i-1)
    out = [(vec[i] - (vec[i + 1] if i < K else 0)) / measure.nu(i) for i in range(K + 1)]
    return out


def _from_c(vec, basis, measure):
    K = len(vec) - 1
    if basis == "c":
        return list(vec)
    if basis == "e":
        # c_i = nu(i) sum_{j <= i} e_j
        out = list(vec)
        acc = 0 * vec[0]
        for i in range(K, -1, -1):
            acc += measure.nu(i) * vec[i]
            out[i] = acc
        return out
    # c_i = sum_{j >= i} g_j (the tail counts as g_K)
    g = list(vec)
    acc = 0 * vec[0]
    for i in range(K + 1):
        acc += vec[i]
        g[i] = acc
    if basis == "g":
        return g
    return [v * _mass(i, K, measure) for i, v in enumerate(g)]


def conv_star(u: ConvElement, v: ConvElement) -> ConvElement:
    """Convolution product, expanded in the basis of ``u``.

    Both factors are moved to the idempotent ``e`` basis, multiplied
    coordinatewise there, and moved back.
    """
    if u.measure != v.measure or u.window != v.window:
        raise ValueError("elements live over different measures or windows")
    m = u.measure
    eu = _from_c(_to_c(u.vector(), u.basis, m), "e", m)
    ev = _from_c(_to_c(v.vector(), v.basis, m), "e", m)
    prod = [s * t for s, t in zip(eu, ev)]
    return _element(u.basis, _from_c(_to_c(prod, "e", m), u.basis, m), m)


def e_function(n: int, x: int, measure: OrbitMeasure) -> Scalar:
    """Explicit value of the idempotent ``e_n`` at the point x."""
    one = one_like(measure.a, measure.b)
    if n == 0:
        return one
    if x < n - 1:
        return 0 * one
    if x == n - 1:
        return -1 / measure.nu(n - 1)
    return 1 / measure.nu(n) - 1 / measure.nu(n - 1)


def star_table(basis: str, i: int, j: int, measure: OrbitMeasure, window: int = DEFAULT_WINDOW) -> ConvElement:
    """Closed multiplication table for the four bases on the window."""
    K = window
    one = one_like(measure.a, measure.b)
    lo, hi = min(i, j), max(i, j)

    def nu_w(k):
        return 0 * one if k > K else measure.nu(k)

    if basis == "e":
        coeffs = {i: one} if i == j else {}
    elif basis == "c":
        coeffs = {lo: measure.nu(hi)}
    elif basis == "g":
        if i != j:
            coeffs = {lo: _mass(hi, K, measure)}
        else:
            mi = _mass(i, K, measure)
            coeffs = {i: mi - nu_w(i + 1)}
            coeffs.update({k: mi for k in range(i + 1, K + 1)})
    elif basis == "ghat":
        if i != j:
            coeffs = {lo: one}
        else:
            mi = _mass(i, K, measure)
            coeffs = {i: 1 - nu_w(i + 1) / mi}
            coeffs.update({k: _mass(k, K, measure) / mi for k in range(i + 1, K + 1)})
    else:
        raise ValueError(f"unknown basis {basis!r}")
    return ConvElement(basis, {k: c for k, c in coeffs.items() if c != 0}, measure, window)


def _diff(u: ConvElement, v: ConvElement) -> Scalar:
    return max(abs(s - t) for s, t in zip(u.vector(), v.vector()))


def verify_star_tables(measure: OrbitMeasure, window: int = DEFAULT_WINDOW, bases=BASES) -> dict:
    """Max coefficient deviation between ``conv_star`` and each closed table."""
    out = {}
    for basis in bases:
        worst = 0 * one_like(measure.a, measure.b)
        elems = [basis_element(basis, i, measure, window) for i in range(window + 1)]
        for i in range(window + 1):
            for j in range(i, window + 1):
                got = conv_star(elems[i], elems[j])
                worst = max(worst, _diff(got, star_table(basis, i, j, measure, window)))
        out[basis] = worst
    return out


def verify_ghat_product(measure: OrbitMeasure, window: int = DEFAULT_WINDOW) -> Scalar:
    """Compare ``ghat_x * ghat_y`` with the linearization coefficients ``c_{x,y,z}``.

    For ``x, y < K`` the coefficient of ``ghat_z`` must be ``c_{x,y,z}`` when
    ``z < K`` and ``sum_{z >= K} c_{x,y,z}`` for the tail class.
    """
    a, b, K = measure.a, measure.b, window
    worst = 0 * one_like(a, b)
    elems = [basis_element("ghat", i, measure, K) for i in range(K)]
    for x in range(K):
        for y in range(x, K):
            vec = conv_star(elems[x], elems[y]).vector()
            for z in range(K):
                worst = max(worst, abs(vec[z] - product_coeff(x, y, z, a, b)))
            if x == y:
                tail = ((1 - b) * a**K if x == 0 else a ** (K - x)) / (1 - a)
            else:
                tail = 0 * worst
            worst = max(worst, abs(vec[K] - tail))
    return worst


def verify_idempotents(measure: OrbitMeasure, window: int = DEFAULT_WINDOW, x_max: Optional[int] = None) -> Scalar:
    """Check ``e_n = omega_n p_n^{a,b;0}`` pointwise and ``e_n * e_n = e_n`` after basis round trips."""
    a, b = measure.a, measure.b
    p0 = LittleQJacobiParams(a, b, 0 * one_like(a, b))
    x_max = window + 3 if x_max is None else x_max
    worst = 0 * one_like(a, b)
    for n in range(window + 1):
        for x in range(x_max + 1):
            explicit = e_function(n, x, measure)
            worst = max(worst, abs(explicit - dual_weight(p0, n) * little_0jacobi(n, x, a, b)))
            if x <= window:
                worst = max(worst, abs(basis_element("e", n, measure, window).at(x) - explicit))
        en = basis_element("e", n, measure, window)
        for basis in ("c", "g", "ghat"):
            moved = en.to(basis)
            sq = conv_star(moved, moved).to("e")
            worst = max(worst, _diff(sq, en))
    return worst
