"""Command line front end: ``qortho eval | factor | verify``.

Exit codes: 0 when everything passes, 1 when a verification check fails,
2 for usage or parameter errors (reported as a JSON error record on stderr).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from fractions import Fraction
from importlib import resources

import numpy as np

from . import families as fam
from . import hypergroup as hg
from . import lufact as lu
from .families import ConvergenceError, LittleQJacobiParams, ParameterError, QHahnParams
from .scalar import is_exact, parse_scalar

FAMILIES = ("littleqjacobi", "little0jacobi", "littleqlaguerre", "qhahn", "zerohahn")
SUITES = ("orthogonality", "methods", "limits", "lu", "product", "padic", "all")
DEFAULT_DRAWS = 3
PRIMES = (2, 3, 5, 7, 11, 13)


class UsageError(ValueError):
    pass


# ---------------------------------------------------------------------------
# configuration


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--family", choices=FAMILIES, default="littleqjacobi")
    for name in ("a", "b", "q"):
        common.add_argument(f"--{name}", default=None, help="decimal or fraction such as 1/3")
    common.add_argument("--N", type=int, default=None)
    common.add_argument("--p", type=int, default=None, help="prime for the p-adic suite")
    common.add_argument("--r", type=int, default=None)
    common.add_argument("--d", type=int, default=None)
    common.add_argument("--m", type=int, default=None)
    common.add_argument("--n-max", type=int, default=None)
    common.add_argument("--x-max", type=int, default=None)
    common.add_argument("--method", default=None)
    common.add_argument("--tol", type=float, default=None)
    common.add_argument("--precision", choices=("f64", "rational"), default=None)
    common.add_argument("--cutoff", type=int, default=None)
    common.add_argument("--format", choices=("csv", "json"), default="json")
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--draws", type=int, default=None, help="random grid points (default 3 when --seed is set)")
    common.add_argument("--relaxed", action="store_true", help="skip parameter-region checks")

    parser = argparse.ArgumentParser(prog="qortho", description="little q-Jacobi / q-Hahn toolkit")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("eval", parents=[common], help="tabulate family values")
    sub.add_parser("factor", parents=[common], help="lower-diagonal-upper factorization")
    ver = sub.add_parser("verify", parents=[common], help="run verification suites")
    ver.add_argument("suite", choices=SUITES, nargs="?", default="all")
    return parser


def _resolve_precision(args) -> bool:
    """True for rational mode.  Fraction literals force it."""
    forced = False
    for name in ("a", "b", "q"):
        text = getattr(args, name)
        if text is not None:
            try:
                _, exact = parse_scalar(text)
            except (ValueError, ZeroDivisionError):
                raise UsageError(f"cannot parse --{name} {text!r}")
            forced = forced or exact
    if forced:
        if args.precision == "f64":
            raise UsageError("fraction literals force rational precision; drop --precision f64")
        return True
    return args.precision == "rational"


def _scalar(text, exact: bool):
    value, _ = parse_scalar(text)
    if exact:
        return Fraction(text.replace(" ", "")) if "/" in text else Fraction(text)
    return float(value)


def _fmt(value, exact: bool):
    """JSON-ready scalar: strings in rational mode, numbers otherwise."""
    if isinstance(value, bool) or value is None:
        return value
    if isinstance(value, (int, np.integer)) and not exact:
        return int(value)
    if exact:
        return str(Fraction(value)) if not isinstance(value, float) else repr(value)
    return float(value)


def _text(value) -> str:
    # locale-free rendering for CSV and parameter maps
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _explicit_point(args, exact: bool):
    point = {}
    for name in ("a", "b", "q"):
        text = getattr(args, name)
        if text is not None:
            point[name] = _scalar(text, exact)
    if args.N is not None:
        point["N"] = args.N
    return point


# ---------------------------------------------------------------------------
# eval


def _family_params(args, exact: bool, family: str):
    pt = _explicit_point(args, exact)
    zero = Fraction(0) if exact else 0.0
    if "a" not in pt:
        raise UsageError("--a is required")
    a = pt["a"]
    b = pt.get("b", zero)
    q = pt.get("q", zero if family in ("little0jacobi", "zerohahn") else None)
    if family in ("little0jacobi", "zerohahn"):
        q = zero
    if q is None:
        raise UsageError("--q is required for this family")
    if family == "littleqlaguerre":
        b = zero
    if family in ("qhahn", "zerohahn"):
        if args.N is None:
            raise UsageError("--N is required for q-Hahn families")
        return QHahnParams(a, b, args.N, q, relaxed=args.relaxed)
    return LittleQJacobiParams(a, b, q, relaxed=args.relaxed)


def cmd_eval(args, out) -> int:
    exact = _resolve_precision(args)
    params = _family_params(args, exact, args.family)
    method = args.method or "lu_series"
    n_max = 2 if args.n_max is None else args.n_max
    x_max = 2 if args.x_max is None else args.x_max
    if isinstance(params, QHahnParams):
        n_max, x_max = min(n_max, params.N), min(x_max, params.N)
    rows = []
    for n in range(n_max + 1):
        for x in range(x_max + 1):
            rows.append((n, x, fam.evaluate(params, n, x, method)))
    if args.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["n", "x", "value", "method"])
        for n, x, v in rows:
            w.writerow([n, x, _text(v), method])
        out.write(buf.getvalue())
    else:
        doc = {
            "family": args.family,
            "params": _param_map(params),
            "precision": "rational" if exact else "f64",
            "method": method,
            "rows": [{"n": n, "x": x, "value": _fmt(v, exact)} for n, x, v in rows],
        }
        out.write(json.dumps(doc, indent=2) + "\n")
    return 0


def _param_map(params) -> dict:
    out = {"a": _text(params.a), "b": _text(params.b), "q": _text(params.q)}
    if isinstance(params, QHahnParams):
        out["N"] = str(params.N)
    return out


# ---------------------------------------------------------------------------
# factor


def _matrix(M, exact):
    return [[_fmt(v, exact) for v in row] for row in M]


def cmd_factor(args, out) -> int:
    exact = _resolve_precision(args)
    family = args.family
    params = _family_params(args, exact, family)
    if params.q == 0:
        size = (params.N + 1) if isinstance(params, QHahnParams) else (10 if args.cutoff is None else args.cutoff) + 1
        L, U = lu.renormalized_factors(params, size)
        P0 = np.array(
            [[fam.little_0jacobi(n, x, params.a, params.b) for x in range(size)] for n in range(size)], dtype=object
        )
        resid = max(abs(v) for v in (P0 - L.entries @ U.entries).ravel())
        mats = {"L": L.entries, "U": U.entries}
        diag = None
    else:
        system = lu.build_system(params, cutoff=10 if args.cutoff is None else args.cutoff)
        f = lu.factor(system)
        resid = f.residual
        mats = {"B": f.B.entries, "C": f.C.entries}
        diag = f.D
    exact_out = exact
    if args.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["matrix", "row", "col", "value"])
        for name, M in mats.items():
            for i in range(M.shape[0]):
                for j in range(M.shape[1]):
                    w.writerow([name, i, j, _text(M[i, j])])
        if diag is not None:
            for k, d in enumerate(diag):
                w.writerow(["D", k, k, _text(d)])
        w.writerow(["residual", "", "", _text(resid)])
        out.write(buf.getvalue())
    else:
        doc = {"family": family, "params": _param_map(params), "precision": "rational" if exact else "f64"}
        for name, M in mats.items():
            doc[name] = _matrix(M, exact_out)
        if diag is not None:
            doc["D"] = [_fmt(d, exact_out) for d in diag]
        doc["residual"] = _fmt(resid, exact_out)
        out.write(json.dumps(doc, indent=2) + "\n")
    return 0


# ---------------------------------------------------------------------------
# verify


def _draw_fraction(rng, lo, hi, strict_lo=True, strict_hi=True):
    """Uniform-ish rational with denominator <= 16 in the interval (lo, hi)."""
    while True:
        den = int(rng.integers(1, 17))
        num = int(rng.integers(int(lo * den) - 1, int(hi * den) + 2))
        v = Fraction(num, den)
        if (v > lo if strict_lo else v >= lo) and (v < hi if strict_hi else v <= hi):
            return v


def _draw_points(args, exact, suite, count):
    if count <= 0:
        return []
    rng = np.random.Generator(np.random.PCG64(args.seed if args.seed is not None else 0))
    pts = []
    for _ in range(count):
        # the q -> 0 constant grows like 1/(1-a); keep a <= 3/4 for the limit suite
        a = _draw_fraction(rng, 0, Fraction(3, 4) if suite == "limits" else 1, strict_hi=suite != "limits")
        b = _draw_fraction(rng, -1, 1, strict_lo=False)
        q = _draw_fraction(rng, 0, 1)
        N = int(rng.integers(2, 9))
        p = PRIMES[int(rng.integers(0, len(PRIMES)))]
        r = int(rng.integers(1, 4))
        d = int(rng.integers(2, 7))
        m = int(rng.integers(1, d))
        pt = {"a": a, "b": b, "q": q, "N": N, "p": p, "r": r, "d": d, "m": m}
        if not exact:
            pt.update({k: float(pt[k]) for k in ("a", "b", "q")})
        pts.append(pt)
    return pts


def _grid(args, exact, suite):
    pts = []
    explicit = _explicit_point(args, exact)
    for k in ("p", "r", "d", "m"):
        if getattr(args, k) is not None:
            explicit[k] = getattr(args, k)
    if explicit:
        pts.append(explicit)
    draws = args.draws if args.draws is not None else (DEFAULT_DRAWS if args.seed is not None else 0)
    pts.extend(_draw_points(args, exact, suite, draws))
    return pts


class Report:
    def __init__(self, exact):
        self.exact = exact
        self.records = []

    def add(self, suite, check, params, residual, bound):
        res_f = float(residual)
        passed = bool(res_f <= float(bound))
        p = {"check": check}
        p.update({k: _text(v) for k, v in params.items()})
        self.records.append(
            {
                "suite": suite,
                "params": p,
                "residual": _fmt(residual, self.exact),
                "bound": _fmt(bound, self.exact),
                "pass": passed,
            }
        )


def _need(pt, *keys):
    return all(k in pt for k in keys)


def _lqj(pt, args):
    return LittleQJacobiParams(pt["a"], pt["b"], pt["q"], relaxed=args.relaxed)


def _suite_orthogonality(pt, args, rep):
    if not _need(pt, "a", "b", "q"):
        return
    tol = args.tol or 1e-9
    top = 12 if args.n_max is None else args.n_max
    cases = [("little_qjacobi", _lqj(pt, args))]
    if "N" in pt:
        cases.append(("qhahn", QHahnParams(pt["a"], pt["b"], pt["N"], pt["q"], relaxed=args.relaxed)))
    for name, p in cases:
        lim = min(top, p.N) if isinstance(p, QHahnParams) else top
        worst, bound = 0, tol
        for m in range(lim + 1):
            for n in range(lim + 1):
                r = fam.verify_orthogonality(p, m, n, tol)
                if float(r.residual) - r.bound > float(worst) - bound:
                    worst, bound = r.residual, r.bound
        rep.add("orthogonality", name, dict(pt, n_max=lim), worst, bound)


def _conditioned(rows, tol):
    """Normalized deviation ``|v - ref| / (tol max(1, |ref|) + float bound)``; passes at <= 1."""
    worst = 0.0
    for v, ref, fb in rows:
        worst = max(worst, abs(float(v) - float(ref)) / (tol * max(1.0, abs(float(ref))) + fb))
    return worst


def _suite_methods(pt, args, rep):
    if not _need(pt, "a", "b", "q"):
        return
    tol = args.tol or 1e-10
    top_n = 8 if args.n_max is None else args.n_max
    top_x = 8 if args.x_max is None else args.x_max
    exact = is_exact(pt["a"], pt["b"], pt["q"])
    p = _lqj(pt, args)
    # float-sensitive forms are judged against their own rounding bound
    sensitive = fam.FLOAT_UL_METHODS + (() if exact else ("phi21",))
    methods = [m for m in fam.LITTLE_QJACOBI_METHODS if m not in sensitive]
    worst, cond = 0.0, {m: [] for m in sensitive}
    for n in range(top_n + 1):
        for x in range(top_x + 1):
            vals = [fam.little_qjacobi(n, x, p, m) for m in methods]
            worst = max(worst, fam.method_spread(vals))
            ref = vals[methods.index("haran")]
            for m in sensitive:
                cond[m].append((fam.little_qjacobi(n, x, p, m), ref, fam.float_error_bound(n, x, p, m)))
    grid = dict(pt, n_max=top_n, x_max=top_x)
    rep.add("methods", "little_qjacobi_methods", grid, worst, tol)
    for m in sensitive:
        rep.add("methods", f"little_qjacobi_{m}_conditioned", grid, _conditioned(cond[m], tol), 1.0)
    if "N" not in pt:
        return
    qp = QHahnParams(pt["a"], pt["b"], pt["N"], pt["q"], relaxed=args.relaxed)
    lim_n, lim_x = min(top_n, qp.N), min(top_x, qp.N)
    methods = fam.QHAHN_METHODS if exact else fam.QHAHN_METHODS[1:]
    worst, cond = 0.0, []
    for n in range(lim_n + 1):
        for x in range(lim_x + 1):
            vals = [fam.qhahn(n, x, qp, m) for m in methods]
            worst = max(worst, fam.method_spread(vals))
            if not exact:
                cond.append((fam.qhahn(n, x, qp, "phi32"), vals[1], fam.float_error_bound(n, x, qp, "phi32")))
    rep.add("methods", "qhahn_methods", dict(pt, n_max=lim_n, x_max=lim_x), worst, tol)
    if cond:
        rep.add("methods", "qhahn_phi32_conditioned", dict(pt, n_max=lim_n, x_max=lim_x), _conditioned(cond, tol), 1.0)
    if qp.q == 0:
        return
    # identities hold for all real parameters; float inputs are converted exactly
    a, b, q = (Fraction(v) for v in (qp.a, qp.b, qp.q))
    for kind in ("duality_qhahn", "reversed_vs_direct", "hahn_identification"):
        if kind != "reversed_vs_direct" and b == 0:
            continue
        worst = 0.0
        for n in range(lim_n + 1):
            for x in range(lim_x + 1):
                worst = max(worst, fam.verify_identity(kind, n, x, a, b, qp.N, q))
        rep.add("methods", kind, dict(pt, n_max=lim_n, x_max=lim_x), worst, tol)


def _suite_limits(pt, args, rep):
    if not _need(pt, "a", "b"):
        return
    a, b = pt["a"], pt["b"]
    top = 10 if args.n_max is None else args.n_max
    exact = is_exact(a, b)
    if "q" in pt and pt["q"] <= Fraction(1, 100):
        qs = [pt["q"]]
    else:
        qs = [Fraction(1, 1000), Fraction(1, 10000)] if exact else [1e-3, 1e-4]
    base = {k: v for k, v in pt.items() if k in ("a", "b")}
    for q in qs:
        worst = max(fam.limit_q_to_0(n, x, a, b, q) for n in range(top + 1) for x in range(top + 1))
        rep.add("limits", "q_to_0", dict(base, q=q, n_max=top), worst, 10 * q)
        N = pt.get("N", top)
        lim = min(top, N)
        worst = max(fam.limit_q_to_0(n, x, a, b, q, N) for n in range(lim + 1) for x in range(lim + 1))
        rep.add("limits", "zero_hahn", dict(base, q=q, N=N, n_max=lim), worst, 10 * q)
        worst = max(
            (fam.limit_asymptotic(n, x, a, b, q) for n in range(2, top + 1) for x in range(1, n)), default=0.0
        )
        rep.add("limits", "asymptotic", dict(base, q=q, n_max=top), worst, 10 * q)
    # N -> infinity at the reference point q = 1/2, N = 40
    q, N = (Fraction(1, 2) if exact else 0.5), 40
    lim = min(top, 10)
    worst, bound = 0.0, 0.0
    for n in range(lim + 1):
        for x in range(lim + 1):
            worst = max(worst, fam.limit_n_to_inf(n, x, a, b, q, N))
            bound = max(bound, fam.n_to_inf_bound(n, x, a, b, q, N))
    tol = args.tol or 1e-9
    rep.add("limits", "N_to_inf", dict(base, q=q, N=N, n_max=lim), worst, max(tol, bound * (1 + 1e-6)))


def _suite_lu(pt, args, rep):
    if not _need(pt, "a", "b", "q") or pt["q"] == 0:
        return
    exact = is_exact(pt["a"], pt["b"], pt["q"])
    tol = 0 if exact else (args.tol or 1e-9)
    # float default stays at size 10; beyond that the residual grows past 1e-9 for q near 1
    cutoff = (8 if exact else 9) if args.cutoff is None else args.cutoff
    systems = [("little_qjacobi", lu.build_system(_lqj(pt, args), cutoff=cutoff))]
    if "N" in pt:
        systems.append(("qhahn", lu.build_system(QHahnParams(pt["a"], pt["b"], pt["N"], pt["q"], relaxed=args.relaxed))))
    for name, system in systems:
        f = lu.factor(system)
        rep.add("lu", f"{name}_factor", dict(pt, size=system.size), f.residual, tol)
        dm = ("closed_hahn" if system.is_qhahn else "closed_jacobi", "sixphi4")
        worst = 0.0
        for m in range(system.size):
            vals = [lu.delta(m, system, "limit_formula")] + [lu.delta(m, system, k) for k in dm]
            worst = max(worst, fam.method_spread(vals) if not exact else max(float(v != vals[0]) for v in vals))
        rep.add("lu", f"{name}_delta", dict(pt, size=system.size), worst, 0 if exact else 1e-9)
        r = lu.verify_biorthogonality(system)
        rep.add("lu", f"{name}_biorthogonality", dict(pt, size=system.size), r.residual, r.bound)
    grid = systems[0][1].y
    order = "right" if exact else "left"
    res = lu.inverse_residual(grid, "upper", order)
    rep.add("lu", f"cellular_inverse_{order}", dict(pt, size=len(grid)), res, 0 if exact else 1e-8)
    # a rational identity in the grid values: evaluate it exactly on the (exactly converted) grid
    xgrid = [Fraction(v) for v in grid]
    worst = max(lu.verify_vandermonde_identity(m, n, xgrid) for n in range(len(grid)) for m in range(n + 1))
    rep.add("lu", "vandermonde_identity", dict(pt, size=len(grid)), worst, 0)


def _suite_product(pt, args, rep):
    if not _need(pt, "a", "b"):
        return
    a, b = pt["a"], pt["b"]
    exact = is_exact(a, b)
    base = {"a": a, "b": b}
    tol = 0 if exact else (args.tol or 1e-12)
    n_max = 30 if args.n_max is None else args.n_max
    x_max = 15 if args.x_max is None else args.x_max
    worst = max(hg.verify_linearization(n_max, x, y, a, b) for x in range(x_max + 1) for y in range(x_max + 1))
    rep.add("product", "linearization", dict(base, n_max=n_max, x_max=x_max), worst, tol)
    worst = 0 if exact else 0.0
    lim = min(x_max, 8)
    for x in range(lim + 1):
        for y in range(lim + 1):
            for z in range(lim + 1):
                ref = hg.sym_coeff(x, y, z, a, b)
                # float mode: allow rounding relative to the absolute term sum
                slack = 0.0 if exact else 64 * 2.220446049250313e-16 * float(hg.sym_coeff(x, y, z, a, b, "spherical_abs"))
                for u, v, w in ((y, x, z), (z, y, x), (x, z, y)):
                    dev = abs(hg.sym_coeff(u, v, w, a, b, "spherical_sum") - ref)
                    worst = max(worst, dev if exact else float(dev) / (tol * max(1.0, abs(ref)) + slack))
    rep.add("product", "sym_coeff", dict(base, x_max=lim), worst, 0 if exact else 1.0)
    scan, witness = hg.nonneg_scan(a, b)
    agree = scan == hg.nonneg_region(a, b)
    extra = {"nonneg": str(scan).lower()}
    if witness is not None:
        extra["witness"] = ",".join(_text(v) for v in witness)
    rep.add("product", "nonneg_region", dict(base, **extra), 0 if agree else 1, 0)
    K = 32 if args.cutoff is None else args.cutoff
    measure = hg.orbit_measure(a, b)
    tables = hg.verify_star_tables(measure, K)
    for basis, res in tables.items():
        rep.add("product", f"star_{basis}", dict(base, window=K), res, tol if exact else 1e-10)
    rep.add("product", "ghat_vs_product_coeff", dict(base, window=K), hg.verify_ghat_product(measure, K), tol if exact else 1e-10)


def _suite_padic(pt, args, rep):
    if not _need(pt, "p", "r", "d", "m"):
        return
    pp = hg.PadicParams(pt["p"], pt["r"], pt["d"], pt["m"])
    base = {k: pt[k] for k in ("p", "r", "d", "m")}
    rep.add("padic", "nonneg_region", dict(base, a=pp.a, b=pp.b), 0 if hg.nonneg_region(pp.a, pp.b) else 1, 0)
    top = 10 if args.x_max is None else args.x_max
    worst = max(hg.laguerre_measure_check(pp.p, pp.r, pp.m, j) for j in range(top + 1))
    rep.add("padic", "laguerre_measure", dict(base, j_max=top), worst, 0)
    measure = hg.orbit_measure(pp.a, pp.b)
    tail = abs(1 - measure.total(top) - measure.nu(top + 1))
    rep.add("padic", "measure_total", dict(base, k_max=top), tail, 0)


SUITE_FUNCS = {
    "orthogonality": _suite_orthogonality,
    "methods": _suite_methods,
    "limits": _suite_limits,
    "lu": _suite_lu,
    "product": _suite_product,
    "padic": _suite_padic,
}


def cmd_verify(args, out) -> int:
    exact = _resolve_precision(args)
    rep = Report(exact)
    suites = [s for s in SUITE_FUNCS] if args.suite == "all" else [args.suite]
    for suite in suites:
        for pt in _grid(args, exact, suite):
            SUITE_FUNCS[suite](pt, args, rep)
    failed = sum(1 for r in rep.records if not r["pass"])
    doc = {
        "seed": args.seed,
        "suite": args.suite,
        "precision": "rational" if exact else "f64",
        "records": rep.records,
        "summary": {"total": len(rep.records), "failed": failed},
    }
    if args.format == "csv":
        buf = io.StringIO()
        buf.write(f"# seed={args.seed}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["suite", "params", "residual", "bound", "pass"])
        for r in rep.records:
            params = ";".join(f"{k}={v}" for k, v in r["params"].items())
            w.writerow([r["suite"], params, _text(r["residual"]), _text(r["bound"]), str(r["pass"]).lower()])
        out.write(buf.getvalue())
    else:
        out.write(json.dumps(doc, indent=2) + "\n")
    return 1 if failed else 0


def report_schema() -> dict:
    """The published JSON schema for ``verify`` reports."""
    text = resources.files("qortho").joinpath("schemas/verify_report.schema.json").read_text()
    return json.loads(text)


def main(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    handler = {"eval": cmd_eval, "factor": cmd_factor, "verify": cmd_verify}[args.command]
    try:
        return handler(args, out)
    except (UsageError, ParameterError, ValueError) as exc:
        kind = "parameter" if isinstance(exc, ParameterError) else "usage"
        err.write(json.dumps({"error": kind, "message": str(exc)}) + "\n")
        return 2
    except (lu.SingularFactorError, ConvergenceError, ZeroDivisionError) as exc:
        err.write(json.dumps({"error": "numerical", "message": str(exc)}) + "\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
