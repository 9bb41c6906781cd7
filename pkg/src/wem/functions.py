"""Smooth compactly supported test functions with closed-form derivatives.

A function is a finite sum of separable terms ``c * u_1(x_1) ... u_n(x_n)``.
Each factor ``u_k`` supplies vectorized evaluators of all its derivatives:
polynomials and sines directly, the standard bump through an exact recurrence
for its derivative numerators, products through the Leibniz rule, and the
plateau cutoff through sympy.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import comb, inf, pi
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
import sympy as sp

from .arith import MultiPolynomial

Evaluator = Callable[[np.ndarray], np.ndarray]


class Factor:
    """A univariate factor; subclasses define ``support`` and ``_derivative``."""

    support: Tuple[float, float] = (-inf, inf)

    def derivative(self, order: int) -> Evaluator:
        cache = self.__dict__.setdefault("_evaluators", {})
        if order not in cache:
            cache[order] = self._derivative(order)
        return cache[order]

    def _derivative(self, order: int) -> Evaluator:
        raise NotImplementedError

    def __call__(self, x) -> np.ndarray:
        return self.derivative(0)(np.asarray(x, dtype=float))

    def __mul__(self, other: "Factor") -> "Factor":
        return Product((self, other))


class Polynomial(Factor):
    def __init__(self, coeffs: Sequence):
        self.coeffs = [Fraction(c) for c in coeffs] or [Fraction(0)]

    def _derivative(self, order: int) -> Evaluator:
        c = list(self.coeffs)
        for _ in range(order):
            c = [i * a for i, a in enumerate(c)][1:] or [Fraction(0)]
        arr = np.array([float(a) for a in c])
        return lambda x: np.polynomial.polynomial.polyval(x, arr) * np.ones_like(x)


class Sine(Factor):
    """sin(frequency * x)."""

    def __init__(self, frequency: float = 1.0):
        self.frequency = float(frequency)

    def _derivative(self, order: int) -> Evaluator:
        w = self.frequency
        return lambda x: w**order * np.sin(w * x + order * pi / 2)


@lru_cache(maxsize=None)
def bump_numerator(j: int) -> Tuple[Fraction, ...]:
    """P_j with phi^(j)(u) = P_j(u) exp(-1/w) / w^(2j), w = 1 - u^2, phi = exp(-1/w).

    P_{j+1} = P_j' w^2 + 4 j u w P_j - 2 u P_j.
    """
    if j == 0:
        return (Fraction(1),)
    p = list(bump_numerator(j - 1))
    jj = j - 1
    w = [Fraction(1), Fraction(0), Fraction(-1)]
    w2 = _pmul(w, w)
    dp = [i * a for i, a in enumerate(p)][1:] or [Fraction(0)]
    terms = [_pmul(dp, w2), _pmul([Fraction(0), Fraction(4 * jj)], _pmul(w, p)), _pmul([Fraction(0), Fraction(-2)], p)]
    out = [Fraction(0)] * max(len(t) for t in terms)
    for t in terms:
        for i, a in enumerate(t):
            out[i] += a
    return tuple(out)


def _pmul(a: Sequence, b: Sequence) -> List:
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return out


class Bump(Factor):
    """phi((x - center) / radius) with phi(u) = exp(-1/(1 - u^2)) on |u| < 1."""

    def __init__(self, center: float, radius: float):
        if radius <= 0:
            raise ValueError("radius must be positive")
        self.center = float(center)
        self.radius = float(radius)
        self.support = (self.center - self.radius, self.center + self.radius)

    def _derivative(self, order: int) -> Evaluator:
        # P_j has the parity of j: P_j(u) = u^(j mod 2) R(u^2)
        coeffs = bump_numerator(order)[order % 2::2]
        # the monomial coefficients cancel heavily for high orders
        dtype = np.longdouble if order >= 6 else float
        num = np.array([dtype(a.numerator) / dtype(a.denominator) for a in coeffs])
        c, r = self.center, self.radius
        scale = r ** (-order)
        odd = order % 2

        def ev(x: np.ndarray) -> np.ndarray:
            u = (np.asarray(x, dtype=float) - c) / r
            out = np.zeros_like(u)
            inside = np.abs(u) < 1
            ui = u[inside]
            w = 1 - ui * ui
            with np.errstate(under="ignore", divide="ignore"):
                mag = np.exp(-1 / w - 2 * order * np.log(w))
            uu = ui.astype(dtype)
            poly = np.polynomial.polynomial.polyval(uu * uu, num)
            if odd:
                poly = poly * uu
            out[inside] = scale * poly.astype(float) * mag
            return out

        return ev


class Product(Factor):
    def __init__(self, factors: Sequence[Factor]):
        flat: List[Factor] = []
        for f in factors:
            flat.extend(f.factors if isinstance(f, Product) else [f])
        self.factors = tuple(flat)
        lo = max(f.support[0] for f in self.factors)
        hi = min(f.support[1] for f in self.factors)
        self.support = (lo, hi)

    def _derivative(self, order: int) -> Evaluator:
        fs = self.factors
        if len(fs) == 1:
            return fs[0].derivative(order)
        head, rest = fs[0], Product(fs[1:])

        def ev(x: np.ndarray) -> np.ndarray:
            total = np.zeros_like(np.asarray(x, dtype=float))
            for i in range(order + 1):
                total = total + comb(order, i) * head.derivative(i)(x) * rest.derivative(order - i)(x)
            return total

        return ev


_x = sp.Symbol("x", real=True)


class Piecewise(Factor):
    """Piecewise sympy expression; ``pieces[i]`` holds on (breaks[i-1], breaks[i])."""

    def __init__(self, breaks: Sequence[float], pieces: Sequence):
        if len(pieces) != len(breaks) + 1:
            raise ValueError("need one more piece than breakpoints")
        self.breaks = tuple(float(b) for b in breaks)
        self.pieces = tuple(sp.sympify(p) for p in pieces)
        lo = -inf if self.pieces[0] != 0 else self.breaks[0]
        hi = inf if self.pieces[-1] != 0 else self.breaks[-1]
        self.support = (lo, hi)

    def _derivative(self, order: int) -> Evaluator:
        exprs = [sp.diff(p, _x, order) if order else p for p in self.pieces]
        fns = [None if e == 0 else sp.lambdify(_x, e, modules="numpy") for e in exprs]
        polynomial = [e.is_polynomial(_x) for e in exprs]
        breaks = self.breaks

        def piece(i: int, x: np.ndarray) -> np.ndarray:
            if fns[i] is None:
                return np.zeros_like(x)
            with np.errstate(all="ignore"):
                return np.broadcast_to(np.asarray(fns[i](x), dtype=float), x.shape).copy()

        def ev(x: np.ndarray) -> np.ndarray:
            x = np.asarray(x, dtype=float)
            idx = np.searchsorted(breaks, x)
            out = np.zeros_like(x)
            for i in range(len(fns)):
                mask = idx == i
                if mask.any():
                    out[mask] = piece(i, x[mask])
            # at a breakpoint the exp(-1/y) pieces are singular; the function is
            # smooth there, so use the neighbour that is a polynomial
            for b, x0 in enumerate(breaks):
                mask = x == x0
                if mask.any():
                    side = b + 1 if polynomial[b + 1] else b
                    out[mask] = piece(side, x[mask])
            # exp(-1/y) * poly(1/y) near a flat edge can still produce inf * 0
            return np.where(np.isfinite(out), out, 0.0)

        return ev

    @classmethod
    def plateau(cls, lo: float, hi: float, margin: float = 1.0) -> "Piecewise":
        """Smooth cutoff: 1 on [lo, hi], 0 outside (lo - margin, hi + margin)."""
        m = sp.nsimplify(margin)

        def step(y):
            e0 = sp.exp(-1 / y)
            e1 = sp.exp(-1 / (1 - y))
            return e0 / (e0 + e1)

        rise = step((_x - (sp.nsimplify(lo) - m)) / m)
        fall = step(((sp.nsimplify(hi) + m) - _x) / m)
        breaks = (lo - margin, lo, hi, hi + margin)
        return cls(breaks, (0, rise, 1, fall, 0))


@dataclass
class SmoothFunction:
    """sum_t coeff_t * prod_k factors_t[k](x_k) on R^n."""

    terms: List[Tuple[float, Tuple[Factor, ...]]]
    smoothness: float = inf
    name: str = "smooth"
    params: dict = field(default_factory=dict)

    @property
    def dimension(self) -> int:
        return len(self.terms[0][1])

    @property
    def support_box(self) -> Optional[Tuple[Tuple[float, ...], Tuple[float, ...]]]:
        n = self.dimension
        lo = [inf] * n
        hi = [-inf] * n
        for _, fs in self.terms:
            for k, u in enumerate(fs):
                lo[k] = min(lo[k], u.support[0])
                hi[k] = max(hi[k], u.support[1])
        if any(np.isinf(lo)) or any(np.isinf(hi)):
            return None
        return tuple(lo), tuple(hi)

    def partial(self, beta: Sequence[int]) -> Evaluator:
        """Vectorized evaluator of d^beta f on arrays of shape (..., n)."""
        beta = tuple(beta)
        factors = [(c, [u.derivative(b) for u, b in zip(fs, beta)]) for c, fs in self.terms]

        def evaluate(points: np.ndarray) -> np.ndarray:
            points = np.asarray(points, dtype=float)
            total = np.zeros(points.shape[:-1])
            for c, us in factors:
                prod = np.full(points.shape[:-1], c, dtype=float)
                for k, u in enumerate(us):
                    prod = prod * u(points[..., k])
                total = total + prod
            return total

        return evaluate

    def __call__(self, x) -> float:
        """f at one point; scalars are accepted for univariate f."""
        if np.ndim(x) == 0:
            x = (x,)
        pts = np.asarray([tuple(float(c) for c in x)], dtype=float)
        return float(self.partial((0,) * self.dimension)(pts)[0])

    def values(self, points: np.ndarray) -> np.ndarray:
        return self.partial((0,) * self.dimension)(points)

    def derivative_1d(self, order: int) -> Evaluator:
        """Evaluator of f^(order) on plain arrays, for n = 1."""
        if self.dimension != 1:
            raise ValueError("derivative_1d needs a univariate function")
        ev = self.partial((order,))
        return lambda x: ev(np.asarray(x, dtype=float)[..., None])

    def scaled(self, factor: float) -> "SmoothFunction":
        return SmoothFunction([(c * factor, fs) for c, fs in self.terms], self.smoothness, self.name, self.params)


@lru_cache(maxsize=None)
def directional_expansion(alphas: Tuple[Tuple[float, ...], ...],
                          orders: Tuple[int, ...]) -> Tuple[Tuple[Tuple[int, ...], float], ...]:
    """Expand prod_i (alpha_i . grad)^{orders_i} into sum_beta c_beta d^beta."""
    n = len(alphas[0])
    poly: Dict[Tuple[int, ...], float] = {(0,) * n: 1.0}
    for a, r in zip(alphas, orders):
        for _ in range(r):
            nxt: Dict[Tuple[int, ...], float] = {}
            for beta, c in poly.items():
                for k in range(n):
                    if a[k] == 0:
                        continue
                    nb = beta[:k] + (beta[k] + 1,) + beta[k + 1:]
                    nxt[nb] = nxt.get(nb, 0.0) + c * float(a[k])
            poly = nxt
    return tuple(sorted(poly.items()))


# -- families -------------------------------------------------------------------

def polynomial_times_bump(p: Optional[MultiPolynomial], center: Sequence[float], radius,
                          name: str = "bump") -> SmoothFunction:
    """p(x) * prod_k phi((x_k - c_k) / r_k) with the standard bump phi."""
    n = len(center)
    radii = [float(r) for r in radius] if isinstance(radius, (list, tuple)) else [float(radius)] * n
    bumps = [Bump(c, r) for c, r in zip(center, radii)]
    if p is None:
        p = MultiPolynomial.constant(n, 1)
    terms = []
    for e, c in p.items():
        fs = tuple(b if ek == 0 else Polynomial([0] * ek + [1]) * b for ek, b in zip(e, bumps))
        terms.append((float(c), fs))
    return SmoothFunction(terms, name=name, params={
        "center": [float(c) for c in center], "radius": radii,
        "polynomial": [{"exponents": list(e), "coefficient": str(c)} for e, c in p.items()]})


def bump(center: Sequence[float], radius, name: str = "bump") -> SmoothFunction:
    return polynomial_times_bump(None, center, radius, name)


def cutoff_polynomial(coeffs: Sequence, lo: float, hi: float, margin: float = 1.0) -> SmoothFunction:
    """Univariate polynomial times a plateau equal to 1 on [lo, hi]."""
    u = Polynomial(coeffs) * Piecewise.plateau(lo, hi, margin)
    return SmoothFunction([(1.0, (u,))], name="cutoff-polynomial",
                          params={"coefficients": [str(Fraction(c)) for c in coeffs],
                                  "lo": lo, "hi": hi, "margin": margin})


def sin_times_bump(center: float, radius: float, frequency: float = 1.0) -> SmoothFunction:
    u = Sine(frequency) * Bump(center, radius)
    return SmoothFunction([(1.0, (u,))], name="sin-bump",
                          params={"center": center, "radius": radius, "frequency": frequency})


def multi_indices(n: int, total: int) -> List[Tuple[int, ...]]:
    """All beta in N^n with |beta| = total."""
    return [e for e in itertools.product(range(total + 1), repeat=n) if sum(e) == total]
