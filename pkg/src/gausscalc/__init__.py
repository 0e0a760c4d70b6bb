"""gausscalc: exact calculus of heat flow, Hermite bases, and dilations
on polynomials in infinitely many Gaussian coordinates.

The package keeps two strictly separated layers.  The symbolic layer
(`poly`, `semigroups`, `matrixrep`) works in arbitrary-precision
rationals, so operator identities are checked as exact term-map
equality, never against a tolerance.  The numeric layer (`gaussian`)
integrates against the product Gaussian measure by tensor Gauss-Hermite
quadrature and seeded Monte Carlo, and exists to cross-check the
symbolic layer through an independent, measure-level route.
"""

from .gaussian import (
    MC_DEFAULT_SAMPLES,
    NODE_CAP,
    CharCheck,
    LpEstimate,
    Variance,
    char_check,
    expectation_quadrature,
    gauss_hermite_rule,
    gaussian_moment,
    inner_product,
    lp_norm,
    variance_of,
)
from .matrixrep import (
    DIMENSION_CAP,
    BchReport,
    GradedBasis,
    OperatorMatrix,
    bch_check,
    diagonal_matrix,
    euler_matrix,
    expm,
    graded_basis,
    identity_matrix,
    laplacian_matrix,
    number_op_matrix,
    operator_matrix,
)
from .poly import (
    MultiIndex,
    Polynomial,
    PolyParseError,
    as_fraction,
    parse,
    serialize,
)
from .semigroups import (
    CheckResult,
    ConvolutionCheck,
    HermiteExpansion,
    VarianceParams,
    dilate,
    euler_d,
    heat,
    heat_convolution_oracle,
    hermite,
    hermite_expand,
    hermite_semigroup,
    l2_contraction_ratio,
    laplacian,
    nonclosability_example,
    number_op,
    verify_commutator,
    verify_ident2,
    verify_nested_commutator,
)

__version__ = "0.1.0"

__all__ = [
    "MC_DEFAULT_SAMPLES",
    "NODE_CAP",
    "DIMENSION_CAP",
    "BchReport",
    "CharCheck",
    "CheckResult",
    "ConvolutionCheck",
    "GradedBasis",
    "HermiteExpansion",
    "LpEstimate",
    "MultiIndex",
    "OperatorMatrix",
    "PolyParseError",
    "Polynomial",
    "Variance",
    "VarianceParams",
    "as_fraction",
    "bch_check",
    "char_check",
    "diagonal_matrix",
    "dilate",
    "euler_d",
    "euler_matrix",
    "expectation_quadrature",
    "expm",
    "gauss_hermite_rule",
    "gaussian_moment",
    "graded_basis",
    "heat",
    "heat_convolution_oracle",
    "hermite",
    "hermite_expand",
    "hermite_semigroup",
    "identity_matrix",
    "inner_product",
    "l2_contraction_ratio",
    "laplacian",
    "laplacian_matrix",
    "lp_norm",
    "nonclosability_example",
    "number_op",
    "number_op_matrix",
    "operator_matrix",
    "parse",
    "serialize",
    "variance_of",
    "verify_commutator",
    "verify_ident2",
    "verify_nested_commutator",
]
