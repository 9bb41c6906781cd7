"""Todd, L and Hirzebruch chi_q series, twisted operators and periodic kernels.

A twist is identified by its rotation number ``r`` in [0, 1): the root of
unity is ``lambda = exp(2 pi i r)``, and ``r = 0`` is the untwisted case.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb, factorial, pi
from typing import List, Sequence, Tuple

import numpy as np

from .arith import CyclotomicElement, TruncatedSeries, is_rational, root_of_unity
from .serialize import rational_str, scalar_json


def _rotation(twist) -> Fraction:
    return Fraction(twist) % 1


def twist_value(twist) -> CyclotomicElement:
    """The root of unity with the given rotation number."""
    return root_of_unity(_rotation(twist))


# -- Bernoulli numbers and classical series -----------------------------------

@lru_cache(maxsize=None)
def _bernoulli_table(n: int) -> Tuple[Fraction, ...]:
    # sum_{j<=m} C(m+1, j) b_j = 0 with b_1 = -1/2
    b = [Fraction(1)]
    for m in range(1, n + 1):
        b.append(-sum(comb(m + 1, j) * b[j] for j in range(m)) / (m + 1))
    return tuple(b)


def bernoulli_number(n: int) -> Fraction:
    """b_n with ``S/(1 - e^{-S}) = 1 - b_1 S + sum b_2n/(2n)! S^2n`` (so b_1 = -1/2)."""
    if n < 0:
        raise ValueError("n must be non-negative")
    return _bernoulli_table(n)[n]


def bernoulli_polynomial(m: int) -> List[Fraction]:
    """Coefficients (low degree first) of B_m(x) = sum C(m, j) b_j x^(m-j)."""
    coeffs = [Fraction(0)] * (m + 1)
    for j in range(m + 1):
        coeffs[m - j] += comb(m, j) * bernoulli_number(j)
    return coeffs


def todd_series(k: int) -> TruncatedSeries:
    """Todd(S) = S/(1 - e^{-S}) truncated at degree k."""
    if k < 0:
        raise ValueError("k must be non-negative")
    coeffs = [Fraction(1)]
    for j in range(1, k + 1):
        coeffs.append((-1) ** j * bernoulli_number(j) / factorial(j))
    return TruncatedSeries(coeffs, k)


def l_series(k: int) -> TruncatedSeries:
    """L(S) = (S/2)/tanh(S/2) truncated at degree k."""
    if k < 0:
        raise ValueError("k must be non-negative")
    coeffs = [Fraction(0)] * (k + 1)
    for j in range(0, k + 1, 2):
        coeffs[j] = bernoulli_number(j) / factorial(j)
    return TruncatedSeries(coeffs, k)


def chi_series(q, k: int) -> TruncatedSeries:
    """chi_q(S) = q Todd(S) + (1-q) Todd(-S), truncated at the even bound k."""
    if k < 0 or k % 2:
        raise ValueError("chi truncation bound must be a non-negative even integer")
    q = Fraction(q)
    series = l_series(k)
    if k >= 1:
        coeffs = list(series.coefficients)
        coeffs[1] = q - Fraction(1, 2)
        series = TruncatedSeries(coeffs, k)
    return series


# -- periodized kernels -------------------------------------------------------

def _pintegrate(coeffs: Sequence) -> list:
    """Antiderivative vanishing at 0."""
    return [Fraction(0)] + [c / (i + 1) for i, c in enumerate(coeffs)]


def _peval(coeffs: Sequence, x):
    acc = Fraction(0)
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def _pderiv(coeffs: Sequence) -> list:
    return [c * i for i, c in enumerate(coeffs)][1:] or [Fraction(0)]


def _padd_const(coeffs: Sequence, c) -> list:
    out = list(coeffs)
    out[0] = out[0] + c
    return out


@dataclass(frozen=True)
class PeriodizedKernel:
    """Periodic piecewise polynomial; piece j is a polynomial in ``t = x - j``, 0 < t < 1.

    ``period`` is 1 for the untwisted Bernoulli kernels and the order N of the
    twist otherwise.
    """

    degree: int
    twist: Fraction
    pieces: Tuple[Tuple[object, ...], ...]

    @property
    def period(self) -> int:
        return len(self.pieces)

    def piece(self, j: int) -> Tuple[object, ...]:
        return self.pieces[j % self.period]

    def value(self, x) -> object:
        """Exact value at a non-integer rational x; at integers the one-sided
        limits are averaged (only relevant for degree 1)."""
        x = Fraction(x)
        j = x.numerator // x.denominator
        t = x - j
        if t != 0:
            return _peval(self.piece(j), t)
        right = _peval(self.piece(j), Fraction(0))
        left = _peval(self.piece(j - 1), Fraction(1))
        if left == right:
            return right
        return (left + right) / 2

    def limit_from_right(self, j: int = 0):
        return _peval(self.piece(j), Fraction(0))

    def limit_from_left(self, j: int = 0):
        return _peval(self.piece(j - 1), Fraction(1))

    def integral_over_period(self):
        total = Fraction(0)
        for p in self.pieces:
            total = total + _peval(_pintegrate(p), Fraction(1))
        return total

    def derivative_pieces(self) -> Tuple[Tuple[object, ...], ...]:
        return tuple(tuple(_pderiv(p)) for p in self.pieces)

    def complex_pieces(self) -> np.ndarray:
        """Array of shape (period, degree + 1) with complex coefficients."""
        cached = self.__dict__.get("_complex")
        if cached is not None:
            return cached
        width = max(len(p) for p in self.pieces)
        out = np.zeros((self.period, width), dtype=complex)
        for j, p in enumerate(self.pieces):
            for i, c in enumerate(p):
                out[j, i] = c.to_complex() if isinstance(c, CyclotomicElement) else float(c)
        object.__setattr__(self, "_complex", out)
        return out

    def evaluate(self, x) -> np.ndarray:
        """Vectorized floating-point evaluation (complex when twisted)."""
        x = np.asarray(x, dtype=float)
        cells = np.floor(x)
        t = x - cells
        idx = np.mod(cells.astype(np.int64), self.period)
        coeffs = self.complex_pieces()
        acc = np.zeros_like(x, dtype=complex)
        for i in range(coeffs.shape[1] - 1, -1, -1):
            acc = acc * t + coeffs[idx, i]
        if self.twist == 0:
            return acc.real
        return acc

    def to_json(self) -> dict:
        return {
            "degree": self.degree,
            "twist": rational_str(self.twist),
            "period": self.period,
            "pieces": [[scalar_json(c) for c in p] for p in self.pieces],
        }


@lru_cache(maxsize=None)
def periodized_bernoulli(m: int) -> PeriodizedKernel:
    """P_m(x) = B_m({x}) / m!."""
    if m < 1:
        raise ValueError("kernel degree must be at least 1")
    piece = tuple(c / factorial(m) for c in bernoulli_polynomial(m))
    return PeriodizedKernel(m, Fraction(0), (piece,))


@lru_cache(maxsize=None)
def _twisted_pieces(m: int, twist: Fraction) -> Tuple[Tuple[object, ...], ...]:
    lam = root_of_unity(twist)
    N = twist.denominator
    if m == 1:
        # jump -lambda^j at each integer j; the constant is fixed by mean zero
        partial = [Fraction(0)]
        for j in range(1, N):
            partial.append(partial[-1] + lam**j)
        c = sum(partial, Fraction(0)) / N
        return tuple((c - s,) for s in partial)
    prev = _twisted_pieces(m - 1, twist)
    antider = [_pintegrate(p) for p in prev]
    offsets = [Fraction(0)]
    for p in antider[:-1]:
        offsets.append(offsets[-1] + _peval(p, Fraction(1)))
    # integral over one period of the pieces before adding the free constant
    mass = Fraction(0)
    for p, a in zip(antider, offsets):
        mass = mass + _peval(_pintegrate(p), Fraction(1)) + a
    C = -mass / N
    return tuple(tuple(_padd_const(p, a + C)) for p, a in zip(antider, offsets))


def twisted_kernel(m: int, twist) -> PeriodizedKernel:
    """Q_{m,lambda}: periodic antiderivatives of ``-sum lambda^n delta(x - n)`` with mean zero."""
    if m < 1:
        raise ValueError("kernel degree must be at least 1")
    r = _rotation(twist)
    if r == 0:
        raise ValueError("untwisted kernel: use periodized_bernoulli")
    return PeriodizedKernel(m, r, _twisted_pieces(m, r))


def kernel(m: int, twist) -> PeriodizedKernel:
    """Q_{m,lambda} with Q_{m,1} = P_m."""
    r = _rotation(twist)
    return periodized_bernoulli(m) if r == 0 else twisted_kernel(m, r)


def kernel_at_zero(m: int, twist):
    """Q_{m,lambda}(0); continuous at 0 for m >= 2."""
    if m < 2:
        raise ValueError("kernel value at 0 is defined only for m >= 2")
    return kernel(m, twist).limit_from_right(0)


def fourier_bernoulli(m: int, x, terms: int = 10_000) -> float:
    """Partial Fourier sum of P_m at x (numerical cross-check only)."""
    n = np.arange(1, terms + 1, dtype=float)
    if m % 2 == 0:
        k = m // 2
        return float((-1) ** (k - 1) * np.sum(2 * np.cos(2 * pi * n * x) / (2 * pi * n) ** m))
    k = (m - 1) // 2
    return float((-1) ** (k - 1) * np.sum(2 * np.sin(2 * pi * n * x) / (2 * pi * n) ** m))


# -- operator polynomials -----------------------------------------------------

@dataclass(frozen=True)
class OperatorPolynomial:
    """N_q^{k,lambda}(S) as a coefficient list; the twist is a rotation number."""

    q: Fraction
    twist: Fraction
    order: int
    coefficients: TruncatedSeries

    def __getitem__(self, j: int):
        return self.coefficients[j]

    @property
    def degree_bound(self) -> int:
        return self.coefficients.bound

    def to_json(self) -> dict:
        return {
            "q": rational_str(self.q),
            "twist": rational_str(self.twist),
            "k": self.order,
            "coefficients": [scalar_json(c) for c in self.coefficients.coefficients],
        }


@lru_cache(maxsize=None)
def twisted_operator(q, twist, k: int) -> OperatorPolynomial:
    """N_q^{k,lambda}(S) for lambda != 1 from the piecewise kernel construction."""
    r = _rotation(twist)
    if r == 0:
        raise ValueError("lambda = 1: the operator is chi_q^{2 floor(k/2)}, use operator()")
    if k < 2:
        raise ValueError("twisted operator needs k > 1")
    q = Fraction(q)
    lam = root_of_unity(r)
    coeffs = [Fraction(0), q + lam / (1 - lam)]
    coeffs += [kernel_at_zero(m, r) for m in range(2, k + 1)]
    return OperatorPolynomial(q, r, k, TruncatedSeries(coeffs, k))


@lru_cache(maxsize=None)
def operator(q, twist, k: int) -> OperatorPolynomial:
    """N_q^{k,lambda}, with N_q^{k,1} = chi_q^{2 floor(k/2)}."""
    r = _rotation(twist)
    q = Fraction(q)
    if r == 0:
        return OperatorPolynomial(q, r, k, chi_series(q, 2 * (k // 2)))
    return twisted_operator(q, r, k)


def operator_from_generating_function(q, twist, k: int) -> TruncatedSeries:
    """Taylor coefficients of ``S (q + lambda/(e^S - lambda))`` up to S^k.

    Independent closed form used to cross-check the kernel construction.
    For lambda = 1 this is chi_q(S) itself.
    """
    q = Fraction(q)
    r = _rotation(twist)
    lam = root_of_unity(r)
    exp = TruncatedSeries.exponential(k + 1)
    if r == 0:
        # S/(e^S - 1) = 1 / ((e^S - 1)/S)
        inner = (exp - 1).shift_down().reciprocal()
        return inner + q * TruncatedSeries.variable(k)
    denom = exp.truncate(k) - lam
    body = (denom.reciprocal() * lam + q).truncate(k - 1)
    return body.shift_up(k)


def is_rational_series(series: TruncatedSeries) -> bool:
    return all(is_rational(c) is not None if isinstance(c, CyclotomicElement) else True
               for c in series.coefficients)
