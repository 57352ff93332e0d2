"""Little q-Jacobi and q-Hahn polynomials, their LU factorizations and q = 0 limits."""

from .families import (
    INF,
    CheckResult,
    ConvergenceError,
    LittleQJacobiParams,
    ParameterError,
    QHahnParams,
    dual_weight,
    little_0jacobi,
    little_qjacobi,
    little_qlaguerre,
    limit_check,
    qhahn,
    verify_identity,
    verify_orthogonality,
    weight,
    zero_hahn,
)
from .hypergroup import (
    ConvElement,
    OrbitMeasure,
    PadicParams,
    conv_star,
    laguerre_measure_check,
    nonneg_region,
    nu,
    orbit_measure,
    padic_params,
    product_coeff,
    sym_coeff,
    verify_linearization,
)
from .lufact import (
    Factorization,
    OrthogonalSystem,
    TriangularMatrix,
    build_system,
    cellular,
    delta,
    factor,
    invert_triangular,
    ul_value,
    verify_biorthogonality,
    verify_vandermonde_identity,
)
from .qseries import SeriesSpec, basic_hyp, qhyp, qpoch, qpoch_inf

__version__ = "0.1.0"
