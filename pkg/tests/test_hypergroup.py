import itertools
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qortho import hypergroup as hg
from qortho.families import ParameterError, little_0jacobi, weight, LittleQJacobiParams

A, B = F(1, 2), F(1, 4)
PAIRS = [(A, B), (F(1, 3), F(1, 2)), (F(3, 4), F(-1, 2)), (F(1, 5), F(-3)), (F(9, 10), F(9, 10))]


def test_product_coeff_examples():
    for z in range(8):
        assert hg.product_coeff(2, 5, z, A, B) == (1 if z == 2 else 0)
    assert hg.product_coeff(0, 0, 3, A, B) == F(3, 32)
    assert hg.product_coeff(1, 1, 1, A, B) == 0
    assert hg.product_coeff(0, 0, 0, A, B) == (1 - 2 * A + A * B) / (1 - A)
    assert hg.product_coeff(3, 3, 1, A, B) == 0
    assert hg.product_coeff(2, 2, 5, A, B) == A**3


def test_min_rule():
    for x, y in itertools.product(range(6), repeat=2):
        if x != y:
            for n in range(8):
                assert little_0jacobi(n, x, A, B) * little_0jacobi(n, y, A, B) == little_0jacobi(n, min(x, y), A, B)


@pytest.mark.parametrize("a,b", PAIRS)
def test_linearization_exact(a, b):
    for x in range(8):
        for y in range(8):
            assert hg.verify_linearization(20, x, y, a, b) == 0


def test_linearization_against_truncated_sum():
    # independent oracle: brute-force z-sum to a large cutoff in floats
    a, b = 0.5, 0.25
    for n in range(6):
        for x in range(4):
            direct = sum(hg.product_coeff(x, x, z, a, b) * little_0jacobi(n, z, a, b) for z in range(200))
            assert abs(direct - little_0jacobi(n, x, a, b) ** 2) < 1e-14


@pytest.mark.parametrize("a,b", PAIRS)
def test_sym_coeff_symmetric_both_methods(a, b):
    for x, y, z in itertools.product(range(6), repeat=3):
        vals = {hg.sym_coeff(*p, a, b, method=m) for p in itertools.permutations((x, y, z)) for m in ("closed", "spherical_sum")}
        assert len(vals) == 1


def test_sym_coeff_examples():
    assert hg.sym_coeff(0, 1, 2, A, B) == 0
    assert hg.sym_coeff(0, 0, 2, A, B) == 1
    assert hg.sym_coeff(1, 1, 3, A, B) == F(8, 3)
    assert hg.sym_coeff(1, 1, 3, A, B, "spherical_sum") == F(8, 3)
    with pytest.raises(ValueError):
        hg.sym_coeff(0, 0, 0, A, B, "nope")


def test_sym_coeff_relation_to_c():
    # c_{x,y,z} = (1-ab)/(1-a) C_{x,y,z} w_z
    p0 = LittleQJacobiParams(A, B, F(0))
    for x, y, z in itertools.product(range(6), repeat=3):
        lhs = hg.product_coeff(x, y, z, A, B)
        assert lhs == (1 - A * B) / (1 - A) * hg.sym_coeff(x, y, z, A, B) * weight(p0, z)


def test_nonneg_examples():
    assert hg.nonneg_region(A, B) and hg.nonneg_scan(A, B) == (True, None)
    ok, wit = hg.nonneg_scan(F(3, 4), F(1, 4))
    assert not hg.nonneg_region(F(3, 4), F(1, 4)) and not ok
    assert hg.product_coeff(1, 1, 1, F(3, 4), F(1, 4)) == -2
    assert hg.nonneg_region(A, F(0))
    with pytest.raises(ParameterError):
        hg.nonneg_region(F(0), B)


@settings(max_examples=60)
@given(
    a=st.fractions(min_value=F(1, 20), max_value=F(19, 20), max_denominator=20),
    b=st.fractions(min_value=F(-3), max_value=F(19, 20), max_denominator=20),
)
def test_nonneg_region_matches_scan(a, b):
    assert hg.nonneg_region(a, b) == hg.nonneg_scan(a, b, limit=4)[0]


def test_padic_examples():
    assert hg.padic_params(2, 1, 2, 1) == (F(1, 2), F(1, 2))
    assert hg.padic_params(3, 1, 3, 1) == (F(1, 9), F(1, 3))
    assert all(hg.nonneg_region(p.a, p.b) for p in hg.padic_sweep())
    with pytest.raises(ParameterError):
        hg.PadicParams(4, 1, 2, 1)
    with pytest.raises(ParameterError):
        hg.PadicParams(2, 1, 2, 2)
    assert hg.PadicParams(5, 1, 3, 1, e=2).a == F(1, 25)


def test_orbit_measure():
    m = hg.orbit_measure(A, B)
    assert hg.nu(0, m) == 1
    assert hg.nu(2, m) == F(3, 14)
    assert m.mu("inf") == 0
    assert abs(1 - m.total(50)) <= A**50 / (1 - A)
    for i in range(10):
        assert m.nu(i) - m.nu(i + 1) == m.mu(i)


def test_laguerre_measure():
    assert hg.laguerre_measure_check(2, 1, 1, 0) == 0
    assert hg.laguerre_measure_check(2, 1, 1, 3) == 0
    assert (1 - F(1, 2)) * F(1, 2) ** 3 == F(1, 16)
    for p in (2, 3, 5):
        for r in (1, 2):
            for m in (1, 2):
                assert all(hg.laguerre_measure_check(p, r, m, j) == 0 for j in range(6))


# --- convolution algebra -----------------------------------------------------------


@pytest.fixture(scope="module")
def measure():
    return hg.orbit_measure(A, B)


def test_star_examples(measure):
    e = lambda i: hg.basis_element("e", i, measure)
    assert hg.conv_star(e(2), e(2)).coeffs == {2: 1}
    assert hg.conv_star(e(2), e(3)).coeffs == {}
    c1, c2 = hg.basis_element("c", 1, measure), hg.basis_element("c", 2, measure)
    assert hg.conv_star(c1, c2).coeffs == {1: measure.nu(2)}
    g2, g5 = hg.basis_element("ghat", 2, measure), hg.basis_element("ghat", 5, measure)
    assert hg.conv_star(g2, g5).coeffs == {2: 1}
    sq = hg.conv_star(g2, g2).vector()
    assert all(sq[z] == hg.product_coeff(2, 2, z, A, B) for z in range(32))


def test_star_tables_small_window(measure):
    res = hg.verify_star_tables(measure, window=10)
    assert res == {"e": 0, "c": 0, "g": 0, "ghat": 0}
    assert hg.verify_ghat_product(measure, window=10) == 0


def test_idempotents(measure):
    assert hg.verify_idempotents(measure, window=8) == 0


def test_roundtrip_conversions(measure):
    v = hg.ConvElement("g", {0: F(1, 3), 4: F(-2), 32: F(5, 7)}, measure)
    for basis in hg.BASES:
        assert v.to(basis).to("g") == v
    assert v.at(4) == -2 and v.at(100) == F(5, 7)


def test_c_in_terms_of_e_pointwise(measure):
    for i in range(6):
        for x in range(10):
            lhs = 1 if x >= i else 0
            assert lhs == measure.nu(i) * sum(hg.e_function(j, x, measure) for j in range(i + 1))


@settings(max_examples=15, deadline=None)
@given(data=st.data())
def test_commutative_associative(data):
    m = hg.orbit_measure(F(1, 3), F(1, 2))
    K = 12
    coeff = st.fractions(min_value=-2, max_value=2, max_denominator=8)

    def element():
        basis = data.draw(st.sampled_from(hg.BASES))
        idx = data.draw(st.lists(st.integers(0, K), min_size=1, max_size=4))
        return hg.ConvElement(basis, {i: data.draw(coeff) for i in idx}, m, K)

    u, v, w = element(), element(), element()
    uv = hg.conv_star(u, v).to("g")
    vu = hg.conv_star(v, u).to("g")
    assert uv == vu
    left = hg.conv_star(hg.conv_star(u, v), w).to("g")
    right = hg.conv_star(u, hg.conv_star(v, w)).to("g")
    assert left == right


def test_mismatched_measures():
    u = hg.basis_element("e", 1, hg.orbit_measure(A, B))
    v = hg.basis_element("e", 1, hg.orbit_measure(A, F(0)))
    with pytest.raises(ValueError):
        hg.conv_star(u, v)
    with pytest.raises(ValueError):
        hg.ConvElement("e", {40: F(1)}, hg.orbit_measure(A, B))
