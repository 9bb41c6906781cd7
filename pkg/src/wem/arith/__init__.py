"""Exact scalar, polynomial and power-series arithmetic."""

from .cyclotomic import (
    CyclotomicElement,
    OrderMismatchError,
    coerce_scalar,
    common_order,
    cyclotomic_polynomial,
    is_rational,
    multiplicative_order,
    root_of_unity,
)
from .polynomial import MultiPolynomial, determinant, integrate_standard_simplex
from .series import NonInvertibleSeriesError, TruncatedSeries, exponential_coefficients

__all__ = [
    "CyclotomicElement",
    "MultiPolynomial",
    "NonInvertibleSeriesError",
    "OrderMismatchError",
    "TruncatedSeries",
    "coerce_scalar",
    "common_order",
    "cyclotomic_polynomial",
    "determinant",
    "exponential_coefficients",
    "integrate_standard_simplex",
    "is_rational",
    "multiplicative_order",
    "root_of_unity",
]
