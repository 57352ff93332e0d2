"""Acceptance suite: one PASS/FAIL line per criterion.

Run with ``pytest -v -s tests/test_acceptance.py`` or as a script,
``python3 tests/test_acceptance.py``.  Tolerances are the stated ones; a
criterion that does not hold is reported as FAIL, never loosened.
"""

import itertools
import sys
import time
from fractions import Fraction as F

import pytest

from qortho import families as fam
from qortho import hypergroup as hg
from qortho.families import LittleQJacobiParams, QHahnParams
from qortho.lufact import (
    build_system,
    delta,
    factor,
    inverse_residual,
    renormalized_factors,
    verify_vandermonde_identity,
)

THIRDS = (F(1, 4), F(1, 2), F(3, 4))
TRIPLES = [(a, b, q) for a in THIRDS for b in (F(-1, 2), F(0), F(1, 2)) for q in THIRDS]


def _line(num, ok, detail, seconds):
    return f"criterion {num}: {'PASS' if ok else 'FAIL'} ({detail}; {seconds:.1f}s)"


def criterion_1():
    """Pairwise method agreement, n, x <= 20 and N = 20, 27 triples."""
    tol = 1e-10
    worst_lqj = worst_qh = 0.0
    for a, b, q in TRIPLES:
        p = LittleQJacobiParams(a, b, q)
        h = QHahnParams(a, b, 20, q)
        for n in range(21):
            for x in range(21):
                vals = [fam.little_qjacobi(n, x, p, m) for m in fam.LITTLE_QJACOBI_METHODS]
                worst_lqj = max(worst_lqj, fam.method_spread(vals))
                vals = [fam.qhahn(n, x, h, m) for m in fam.QHAHN_METHODS]
                worst_qh = max(worst_qh, fam.method_spread(vals))
    ok = worst_lqj <= tol and worst_qh <= tol
    return ok, f"{len(TRIPLES)} triples, max spread little q-Jacobi {worst_lqj:.2e}, q-Hahn {worst_qh:.2e}"


def criterion_2():
    """Orthogonality for m, n <= 12; q = 0 exact."""
    tol = 1e-9
    worst = 0.0
    for a, b, q in ((F(1, 2), F(1, 4), F(1, 2)), (F(3, 4), F(-1, 2), F(1, 3)), (F(1, 4), F(0), F(3, 4))):
        for p in (LittleQJacobiParams(a, b, q), QHahnParams(a, b, 12, q)):
            for m in range(13):
                for n in range(13):
                    worst = max(worst, float(fam.verify_orthogonality(p, m, n, tol).residual))
    zero = 0
    for a, b in ((F(1, 2), F(1, 4)), (F(3, 4), F(-1, 2)), (F(1, 4), F(0))):
        for p in (LittleQJacobiParams(a, b, F(0)), QHahnParams(a, b, 12, F(0))):
            for m in range(13):
                for n in range(13):
                    zero = max(zero, fam.verify_orthogonality(p, m, n).residual)
    ok = worst <= tol and zero == 0
    return ok, f"max residual q>0 {worst:.2e}, q=0 exact residual {zero}"


def criterion_3():
    """q -> 0 limits within 10 q at q = 1e-3, 1e-4, n, x <= 10."""
    worst = 0.0
    for a in THIRDS:
        for b in (F(-1, 2), F(0), F(1, 4), F(3, 4)):
            for q in (F(1, 1000), F(1, 10000)):
                for n in range(11):
                    for x in range(11):
                        worst = max(worst, fam.limit_q_to_0(n, x, a, b, q) / (10 * q))
                        worst = max(worst, fam.limit_q_to_0(n, x, a, b, q, 10) / (10 * q))
                        if 1 <= x <= n - 1:
                            worst = max(worst, fam.limit_asymptotic(n, x, a, b, q) / (10 * q))
    return worst <= 1, f"max deviation / (10 q) = {float(worst):.3f}"


def criterion_4():
    """N -> infinity at N = 40, q = 1/2, n, x <= 10, deviation <= 1e-9."""
    q = F(1, 2)
    worst = 0.0
    for a in (F(1, 4), F(1, 2)):
        for b in (F(-1, 2), F(0), F(1, 4), F(3, 4)):
            for n in range(11):
                for x in range(11):
                    worst = max(worst, fam.limit_n_to_inf(n, x, a, b, q, 40))
    return worst <= 1e-9, f"a in {{1/4, 1/2}}, max deviation {worst:.3e}"


def _q0_lower(n, k, a, b):
    if k == n:
        return 1 if n == 0 else ((1 - a * b) / (1 - a) if n == 1 else 1 / (1 - a))
    if k == n - 1:
        return -a * (1 - b) / (1 - a) if n == 1 else -a / (1 - a)
    return 0


def criterion_5():
    """Factorization residuals, q = 0 factors, closed inverses, Vandermonde identity."""
    float_worst = 0.0
    for a, b in ((0.5, 0.25), (0.75, -0.5), (0.25, 0.0)):
        for q in (0.25, 0.5, 0.75):
            for size in range(1, 11):
                float_worst = max(float_worst, factor(build_system(LittleQJacobiParams(a, b, q), cutoff=size - 1)).residual)
                if size > 1:
                    float_worst = max(float_worst, factor(build_system(QHahnParams(a, b, size - 1, q))).residual)
    exact_worst = 0
    inv_worst = 0
    for a, b, q in ((F(1, 2), F(1, 4), F(1, 2)), (F(3, 4), F(-1, 2), F(1, 3))):
        for size in (1, 2, 5, 10, 15, 20):
            s = build_system(LittleQJacobiParams(a, b, q), cutoff=size - 1)
            exact_worst = max(exact_worst, factor(s).residual)
            inv_worst = max(inv_worst, inverse_residual(s.y, "upper", "right"), inverse_residual(s.z, "lower", "right"))
            if size > 1:
                h = build_system(QHahnParams(a, b, size - 1, q))
                exact_worst = max(exact_worst, factor(h).residual)
                inv_worst = max(inv_worst, inverse_residual(h.z, "lower", "right"))
    q0_worst = 0
    for a, b in ((F(1, 2), F(1, 4)), (F(3, 4), F(-1, 2)), (F(1, 3), F(0))):
        L, U = renormalized_factors(LittleQJacobiParams(a, b, F(0)), 12)
        for i, j in itertools.product(range(12), repeat=2):
            q0_worst = max(q0_worst, abs(L.entries[i, j] - _q0_lower(i, j, a, b)))
            q0_worst = max(q0_worst, abs(U.entries[i, j] - (1 if i <= j else 0)))
    vdm_worst = 0
    for q in (0.25, 0.5, 0.75, F(1, 2), F(2, 3)):
        # float grids are taken at their exact binary values; the sum itself cancels
        # terms of size q^(-n^2) and is evaluated exactly
        grid = [F(q) ** x for x in range(11)]
        for n in range(11):
            for m in range(n + 1):
                vdm_worst = max(vdm_worst, verify_vandermonde_identity(m, n, grid))
    ok = float_worst <= 1e-9 and exact_worst == 0 and q0_worst == 0 and inv_worst == 0 and vdm_worst <= 1e-12
    detail = (
        f"float {float_worst:.2e}, rational {exact_worst}, q=0 factors {q0_worst}, "
        f"C C^-1 - I {inv_worst}, Vandermonde {vdm_worst}"
    )
    return ok, detail


def criterion_6():
    """delta agreement across formulas for m <= 10."""
    worst = 0.0
    exact_mismatch = 0
    for a, b, q in ((F(1, 2), F(1, 4), F(1, 2)), (F(3, 4), F(-1, 2), F(1, 3)), (F(1, 3), F(0), F(2, 3))):
        for params, methods in (
            (LittleQJacobiParams(a, b, q), ("limit_formula", "closed_jacobi", "sixphi4")),
            (QHahnParams(a, b, 10, q), ("limit_formula", "closed_hahn", "sixphi4")),
        ):
            s = build_system(params, cutoff=10) if isinstance(params, LittleQJacobiParams) else build_system(params)
            sf = (
                build_system(LittleQJacobiParams(float(a), float(b), float(q)), cutoff=10)
                if isinstance(params, LittleQJacobiParams)
                else build_system(QHahnParams(float(a), float(b), 10, float(q)))
            )
            for m in range(11):
                vals = {delta(m, s, meth) for meth in methods}
                exact_mismatch += len(vals) != 1
                worst = max(worst, fam.method_spread(delta(m, sf, meth) for meth in methods))
    ok = exact_mismatch == 0 and worst <= 1e-9
    return ok, f"exact disagreements {exact_mismatch}, float max relative spread {worst:.2e}"


AB_PAIRS = [
    (F(1, 2), F(1, 4)),
    (F(1, 3), F(1, 2)),
    (F(1, 4), F(-1, 2)),
    (F(1, 4), F(1, 16)),
    (F(3, 4), F(1, 4)),
    (F(3, 4), F(-1, 2)),
    (F(9, 10), F(9, 10)),
    (F(1, 5), F(-3)),
    (F(2, 3), F(0)),
]


def criterion_7():
    """Exact linearization and the nonnegativity region with witnesses."""
    lin = 0
    inside = sum(hg.nonneg_region(a, b) for a, b in AB_PAIRS)
    for a, b in AB_PAIRS:
        for x in range(16):
            for y in range(16):
                lin = max(lin, hg.verify_linearization(30, x, y, a, b))
    mismatch, witnesses = 0, 0
    for i in range(1, 21):
        for j in range(1, 21):
            a, b = F(i, 21), F(-1) + F(2 * j, 21)
            ok, wit = hg.nonneg_scan(a, b)
            mismatch += ok != hg.nonneg_region(a, b)
            if not ok:
                x, y, z, c = wit
                witnesses += c < 0 and hg.product_coeff(x, y, z, a, b) == c
    falses = sum(not hg.nonneg_region(F(i, 21), F(-1) + F(2 * j, 21)) for i in range(1, 21) for j in range(1, 21))
    ok = lin == 0 and mismatch == 0 and witnesses == falses and 0 < inside < len(AB_PAIRS)
    detail = (
        f"{len(AB_PAIRS)} pairs ({inside} inside region), linearization residual {lin}; "
        f"20x20 scan mismatches {mismatch}, witnesses {witnesses}/{falses}"
    )
    return ok, detail


def criterion_8():
    """Star tables on window 32 and the ghat products."""
    worst = {}
    ghat = 0
    for a, b in ((F(1, 2), F(1, 4)), (F(1, 9), F(1, 3))):
        m = hg.orbit_measure(a, b)
        for basis, v in hg.verify_star_tables(m, 32).items():
            worst[basis] = max(worst.get(basis, 0), v)
        ghat = max(ghat, hg.verify_ghat_product(m, 32))
    ok = all(v == 0 for v in worst.values()) and ghat == 0
    return ok, f"table residuals {worst}, ghat residual {ghat}"


def criterion_9():
    """p-adic parameters lie in the region; orbit measure matches the q = 0 weights."""
    sweep = list(hg.padic_sweep(13, 3, 6))
    bad = [p for p in sweep if not hg.nonneg_region(p.a, p.b)]
    lag = 0
    for p in (2, 3, 5, 7, 11, 13):
        for r in range(1, 4):
            for m in range(1, 6):
                for j in range(11):
                    lag = max(lag, hg.laguerre_measure_check(p, r, m, j))
    ok = not bad and lag == 0 and len(sweep) == 6 * 3 * 15
    return ok, f"{len(sweep)} parameter sets, outside region {len(bad)}, Laguerre residual {lag}"


def criterion_10():
    """Duality and identification identities, n, x <= N <= 8, 9 triples."""
    triples = [(a, b, q) for a in THIRDS for b, q in ((F(-1, 2), F(1, 2)), (F(1, 3), F(3, 4)), (F(3, 4), F(1, 4)))]
    worst = 0.0
    for a, b, q in triples:
        for N in range(1, 9):
            for n in range(N + 1):
                for x in range(N + 1):
                    for kind in ("duality_qhahn", "reversed_vs_direct", "hahn_identification"):
                        worst = max(worst, fam.verify_identity(kind, n, x, a, b, N, q))
    return worst <= 1e-10, f"{len(triples)} triples, max residual {float(worst):.2e}"


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
            criterion_6, criterion_7, criterion_8, criterion_9, criterion_10]


def run(num):
    start = time.perf_counter()
    ok, detail = CRITERIA[num - 1]()
    return ok, _line(num, ok, detail, time.perf_counter() - start)


@pytest.mark.parametrize("num", range(1, 11))
def test_criterion(num, capsys):
    ok, line = run(num)
    with capsys.disabled():
        print("\n" + line)
    assert ok, line


if __name__ == "__main__":
    results = [run(num) for num in range(1, 11)]
    for _, line in results:
        print(line)
    sys.exit(0 if all(ok for ok, _ in results) else 1)
