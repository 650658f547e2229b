"""Exact and Monte Carlo moments of Haar-distributed orthogonal matrices."""

from .diagram import (
    Diagram,
    Factor,
    Monomial,
    ParseError,
    canonicalize,
    parse_monomial,
    required_dimension,
    vanishes_by_invariance,
)
from .exact import (
    Classification,
    DimensionTooSmall,
    IntegralResult,
    classify,
    double_factorial,
    evaluate,
    f1,
    fan,
    order6_catalog,
    x_integral,
    z_closed_form,
    z_integral,
)
from .montecarlo import MCEstimate, mc_estimate, mc_estimate_many, o2_exact, sample_haar

__version__ = "0.1.0"
