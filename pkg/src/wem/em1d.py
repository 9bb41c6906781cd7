"""One-dimensional weighted sums and Euler-Maclaurin formulas with remainder."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import ceil, floor, pi
from typing import Callable, Optional, Sequence

import numpy as np

from .emseries import chi_series, kernel, operator, periodized_bernoulli
from .functions import SmoothFunction
from .quadrature import DEFAULT_TOLERANCE, integrate_1d
from .serialize import rational_str, scalar_json


class InvalidIntervalError(ValueError):
    pass


class UnboundedSupportError(ValueError):
    pass


def _q(q):
    return q if isinstance(q, float) else Fraction(q)


def _twist_number(twist) -> complex:
    if twist is None:
        return 1
    r = Fraction(twist) % 1
    if (4 * r).denominator == 1:
        # quarter turns are exact: 1, i, -1, -i
        return (1, 1j, -1, -1j)[int(4 * r)]
    return complex(np.exp(2j * pi * float(r)))


def _support(f) -> tuple:
    box = getattr(f, "support_box", None)
    if box is None:
        raise UnboundedSupportError("f must have compact support")
    (lo,), (hi,) = box
    return lo, hi


# -- sums ---------------------------------------------------------------------

def weighted_interval_sum(f: Callable, a: int, b: int, q):
    """q f(a) + f(a+1) + ... + f(b-1) + q f(b)."""
    if a >= b:
        raise InvalidIntervalError(f"need a < b, got [{a}, {b}]")
    q = _q(q)
    total = q * f(a) + q * f(b)
    for n in range(a + 1, b):
        total = total + f(n)
    return total


def weighted_ray_sum(f: Callable, a: int, q, support: Optional[tuple] = None):
    """q f(a) + f(a+1) + ... over the (bounded) support of f."""
    lo, hi = support if support is not None else _support(f)
    q = _q(q)
    total = q * f(a)
    for n in range(max(a + 1, ceil(lo)), floor(hi) + 1):
        total = total + f(n)
    return total


def twisted_ray_sum(f: Callable, twist, q, a: int = 0, support: Optional[tuple] = None):
    """q f(a) + sum_{n >= 1} lambda^n f(a + n), with lambda = exp(2 pi i twist)."""
    lo, hi = support if support is not None else _support(f)
    lam = _twist_number(twist)
    total = _q(q) * f(a)
    for n in range(max(1, ceil(lo) - a), floor(hi) - a + 1):
        total = total + lam**n * f(a + n)
    return total


def lawrence_defect(f: Callable, a: int, b: int, q, support: tuple):
    """Sigma^q_[a,b] - (Sigma^q_[a,inf) - Sigma^{1-q}_[b,inf)); exactly 0."""
    q = _q(q)
    lhs = weighted_interval_sum(f, a, b, q)
    rhs = weighted_ray_sum(f, a, q, support) - weighted_ray_sum(f, b, 1 - q, support)
    return lhs - rhs


# -- reports -----------------------------------------------------------------------

@dataclass
class EM1DReport:
    weighted_sum: object
    main_term: object
    remainder_by_difference: object
    remainder_by_integral: object
    k: int
    quadrature_error: float
    converged: bool
    parameters: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "weightedSum": scalar_json(self.weighted_sum),
            "mainTerm": scalar_json(self.main_term),
            "remainderByDifference": scalar_json(self.remainder_by_difference),
            "remainderByIntegral": scalar_json(self.remainder_by_integral),
            "k": self.k,
            "achievedTolerance": self.quadrature_error,
            "converged": self.converged,
            "parameters": self.parameters,
        }


def _require_smooth(f: SmoothFunction, m: int):
    if m <= 1:
        raise ValueError("the order m must be greater than 1")
    if f.smoothness < m:
        raise ValueError(f"f is only C^{f.smoothness}, need C^{m}")


def _ray_main(f: SmoothFunction, a: float, coeffs: Sequence, lo: float, hi: float):
    """sum_j c_j d^j/dh^j int_{a-h}^inf f at h = 0; the j-th derivative is (-1)^(j-1) f^(j-1)(a)."""
    main, err = 0.0, 0.0
    if coeffs[0] != 0 and hi > a:
        integral = integrate_1d(f.derivative_1d(0), max(a, lo), hi)
        main, err = _cnum(coeffs[0]) * integral.value, integral.error
    for j in range(1, len(coeffs)):
        c = coeffs[j]
        if c == 0:
            continue
        main = main + _cnum(c) * (-1) ** (j - 1) * float(f.derivative_1d(j - 1)(a))
    return main, err


def _cnum(c):
    if isinstance(c, Fraction):
        return float(c)
    if hasattr(c, "to_complex"):
        return c.to_complex()
    return c


def em_interval(f: SmoothFunction, a: int, b: int, q, m: int, tol: float = DEFAULT_TOLERANCE) -> EM1DReport:
    """Weighted Euler-Maclaurin on [a, b] with both remainder evaluations."""
    _require_smooth(f, m)
    if a >= b:
        raise InvalidIntervalError(f"need a < b, got [{a}, {b}]")
    q = Fraction(q)
    k = m // 2
    chi = chi_series(q, 2 * k)
    lo, hi = a, b
    integral = integrate_1d(f.derivative_1d(0), lo, hi, tol=tol)
    main = float(chi[0]) ** 2 * integral.value
    for j in range(1, 2 * k + 1):
        c = float(chi[j]) * float(chi[0])
        main += c * (-1) ** (j - 1) * float(f.derivative_1d(j - 1)(a))
        main += c * float(f.derivative_1d(j - 1)(b))
    total = weighted_interval_sum(f, a, b, q)
    rem = integrate_1d(f.derivative_1d(m), a, b, periodized_bernoulli(m), tol)
    rem_value = (-1) ** (m - 1) * rem.value
    return EM1DReport(total, main, total - main, rem_value, k, integral.error + rem.error,
                      integral.converged and rem.converged,
                      {"kind": "interval", "a": a, "b": b, "q": rational_str(q), "m": m})


def em_ray(f: SmoothFunction, a: int, q, m: int, tol: float = DEFAULT_TOLERANCE) -> EM1DReport:
    """Weighted Euler-Maclaurin on the ray [a, inf) with chi_q^{2k}, k = floor(m/2)."""
    _require_smooth(f, m)
    q = Fraction(q)
    lo, hi = _support(f)
    k = m // 2
    coeffs = [chi_series(q, 2 * k)[j] for j in range(2 * k + 1)]
    main, err = _ray_main(f, a, coeffs, lo, hi)
    total = weighted_ray_sum(f, a, q, (lo, hi))
    rem = integrate_1d(f.derivative_1d(m), max(a, lo), hi, periodized_bernoulli(m), tol) if hi > a else None
    rem_value = (-1) ** (m - 1) * rem.value if rem else 0.0
    rem_err = rem.error if rem else 0.0
    return EM1DReport(total, main, total - main, rem_value, k, err + rem_err,
                      rem is None or rem.converged,
                      {"kind": "ray", "a": a, "q": rational_str(q), "m": m})


def em_twisted_ray(f: SmoothFunction, twist, q, k: int, a: int = 0,
                   tol: float = DEFAULT_TOLERANCE) -> EM1DReport:
    """Twisted weighted sum q f(a) + sum lambda^n f(a+n) against N_q^{k,lambda} and Q_{k,lambda}."""
    _require_smooth(f, k)
    q = Fraction(q)
    twist = Fraction(twist) % 1
    lo, hi = _support(f)
    op = operator(q, twist, k)
    coeffs = [op[j] for j in range(op.degree_bound + 1)]
    main, err = _ray_main(f, a, coeffs, lo, hi)
    total = twisted_ray_sum(f, twist, q, a, (lo, hi))
    g = f.derivative_1d(k)
    shifted = lambda x: g(np.asarray(x) + a)  # noqa: E731  kernel lives on the ray's own coordinate
    rem = integrate_1d(shifted, max(0.0, lo - a), hi - a, kernel(k, twist), tol) if hi > a else None
    rem_value = (-1) ** (k - 1) * rem.value if rem else 0.0
    rem_err = rem.error if rem else 0.0
    return EM1DReport(total, main, total - main, rem_value, k, err + rem_err,
                      rem is None or rem.converged,
                      {"kind": "twisted-ray", "a": a, "twist": rational_str(twist), "q": rational_str(q), "k": k})


# -- exact path for polynomials on an interval -------------------------------------

def em_interval_polynomial(coeffs: Sequence, a: int, b: int, q, m: int) -> Fraction:
    """Main term of the interval formula for a polynomial, in exact arithmetic.

    ``coeffs`` lists the polynomial's coefficients by increasing degree.
    """
    if m <= 1:
        raise ValueError("the order m must be greater than 1")
    q = Fraction(q)
    k = m // 2
    chi = chi_series(q, 2 * k)
    p = [Fraction(c) for c in coeffs]

    def deriv(poly, j):
        for _ in range(j):
            poly = [i * c for i, c in enumerate(poly)][1:]
        return poly

    def ev(poly, x):
        return sum(c * Fraction(x) ** i for i, c in enumerate(poly))

    antiderivative = [Fraction(0)] + [c / (i + 1) for i, c in enumerate(p)]
    main = chi[0] ** 2 * (ev(antiderivative, b) - ev(antiderivative, a))
    for j in range(1, 2 * k + 1):
        dj = deriv(p, j - 1)
        main += chi[j] * chi[0] * ((-1) ** (j - 1) * ev(dj, a) + ev(dj, b))
    return main


def polynomial_interval_sum(coeffs: Sequence, a: int, b: int, q) -> Fraction:
    p = [Fraction(c) for c in coeffs]
    return weighted_interval_sum(lambda x: sum(c * Fraction(x) ** i for i, c in enumerate(p)), a, b, q)
