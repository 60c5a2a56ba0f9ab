"""Exact arithmetic substrate: rationals, Gamma-ratio constants, polynomials,
Sturm certification and low-degree algebraic numbers."""
from fractions import Fraction as Rational

from .algebraic import (
    AlgebraicNumber,
    NoPositiveRoot,
    compare,
    from_surd,
    make_root,
    rational_between,
    real_approx,
    real_from_json,
    real_roots,
    real_to_json,
    simplest_between,
    solve_quadratic_positive_root,
)
from .gamma import GammaRatioConstant, UnreducibleGammaRatio, gamma_float, gamma_quotient, gamma_ratio_reduce
from .parametric import ParametricBoundary, discriminant_u, nonneg_boundary, resultant_u, sign_cells
from .poly import BivariatePoly, UniPoly, as_fraction
from .serialize import decimal_string, rational_from_json, rational_to_json
from .sturm import NonnegCertificate, count_roots, isolate_roots, refine_root, sturm_nonneg, sturm_sequence

__all__ = [
    "AlgebraicNumber",
    "BivariatePoly",
    "GammaRatioConstant",
    "NoPositiveRoot",
    "NonnegCertificate",
    "ParametricBoundary",
    "Rational",
    "UniPoly",
    "UnreducibleGammaRatio",
    "as_fraction",
    "compare",
    "count_roots",
    "decimal_string",
    "discriminant_u",
    "from_surd",
    "gamma_float",
    "gamma_quotient",
    "gamma_ratio_reduce",
    "isolate_roots",
    "make_root",
    "nonneg_boundary",
    "rational_between",
    "rational_from_json",
    "rational_to_json",
    "real_approx",
    "real_from_json",
    "real_roots",
    "real_to_json",
    "refine_root",
    "resultant_u",
    "sign_cells",
    "simplest_between",
    "solve_quadratic_positive_root",
    "sturm_nonneg",
    "sturm_sequence",
]
