"""Exact arithmetic in cyclotomic fields Q[z]/(Phi_M(z)).

Roots of unity are represented exactly as residues modulo the M-th cyclotomic
polynomial. Elements of different orders are combined by embedding both into
the ring of order ``lcm(M1, M2)`` via ``z_M = z_{M'}^{M'/M}``.
"""

from __future__ import annotations

import cmath
from fractions import Fraction
from functools import lru_cache
from math import lcm
from typing import Optional, Sequence, Tuple

from .polynomial import MultiPolynomial


class OrderMismatchError(ValueError):
    """A root of unity does not live in the requested ambient ring."""


# -- integer polynomial helpers (coefficient lists, low degree first) ---------

def _trim(p: list) -> list:
    while len(p) > 1 and p[-1] == 0:
        p.pop()
    return p


def _pmul(a: Sequence, b: Sequence) -> list:
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x == 0:
            continue
        for j, y in enumerate(b):
            out[i + j] += x * y
    return out


def _pdivmod_monic(num: Sequence, den: Sequence) -> Tuple[list, list]:
    num = list(num)
    dd = len(den) - 1
    if len(num) - 1 < dd:
        return [0], num
    quot = [0] * (len(num) - dd)
    for i in range(len(num) - 1, dd - 1, -1):
        c = num[i]
        if c == 0:
            continue
        quot[i - dd] = c
        for j in range(dd + 1):
            num[i - dd + j] -= c * den[j]
    rem = num[:dd] or [0]
    return quot, rem


@lru_cache(maxsize=None)
def _phi(M: int) -> Tuple[int, ...]:
    if M < 1:
        raise ValueError("cyclotomic order must be positive")
    num = [-1] + [0] * (M - 1) + [1]
    for d in range(1, M):
        if M % d == 0:
            num, rem = _pdivmod_monic(num, _phi(d))
            assert all(r == 0 for r in rem)
    return tuple(_trim(num))


def cyclotomic_polynomial(M: int) -> MultiPolynomial:
    """Phi_M as a univariate integer polynomial."""
    return MultiPolynomial.univariate([Fraction(c) for c in _phi(M)])


def _reduce(coeffs: Sequence, M: int) -> Tuple[Fraction, ...]:
    phi = _phi(M)
    deg = len(phi) - 1
    work = [Fraction(c) for c in coeffs]
    for i in range(len(work) - 1, deg - 1, -1):
        c = work[i]
        if c == 0:
            continue
        for j in range(deg + 1):
            work[i - deg + j] -= c * phi[j]
    work = work[:deg] + [Fraction(0)] * max(0, deg - len(work))
    return tuple(work[:deg])


# -- field inverse via the extended Euclidean algorithm over Q ----------------

def _qtrim(p: list) -> list:
    while len(p) > 1 and p[-1] == 0:
        p.pop()
    return p


def _qdivmod(a: list, b: list) -> Tuple[list, list]:
    a = list(a)
    db = len(b) - 1
    if len(a) - 1 < db:
        return [Fraction(0)], a
    q = [Fraction(0)] * (len(a) - db)
    lead = b[-1]
    for i in range(len(a) - 1, db - 1, -1):
        c = a[i] / lead
        q[i - db] = c
        if c:
            for j in range(db + 1):
                a[i - db + j] -= c * b[j]
    return q, _qtrim(a[:db] or [Fraction(0)])


def _qsub(a: list, b: list) -> list:
    n = max(len(a), len(b))
    a = a + [Fraction(0)] * (n - len(a))
    b = b + [Fraction(0)] * (n - len(b))
    return _qtrim([x - y for x, y in zip(a, b)])


def _qmul(a: list, b: list) -> list:
    return _qtrim([Fraction(c) for c in _pmul(a, b)])


class CyclotomicElement:
    """Element of Q(zeta_M) as coefficients of 1, z, ..., z^(deg Phi_M - 1)."""

    __slots__ = ("order", "coefficients")

    def __init__(self, order: int, coefficients: Sequence = ()):
        self.order = int(order)
        self.coefficients = _reduce(list(coefficients) or [0], self.order)

    # -- construction -----------------------------------------------------

    @classmethod
    def from_rational(cls, value, order: int = 1) -> "CyclotomicElement":
        return cls(order, [Fraction(value)])

    @classmethod
    def generator(cls, order: int) -> "CyclotomicElement":
        return cls(order, [0, 1])

    def embed(self, order: int) -> "CyclotomicElement":
        if order % self.order:
            raise OrderMismatchError(f"cannot embed order {self.order} into order {order}")
        if order == self.order:
            return self
        step = order // self.order
        coeffs = [Fraction(0)] * (step * (len(self.coefficients) - 1) + 1)
        for i, c in enumerate(self.coefficients):
            coeffs[i * step] = c
        return CyclotomicElement(order, coeffs)

    # -- arithmetic -------------------------------------------------------

    def _lift(self, other) -> Tuple["CyclotomicElement", "CyclotomicElement"]:
        if isinstance(other, CyclotomicElement):
            if other.order == self.order:
                return self, other
            m = lcm(self.order, other.order)
            return self.embed(m), other.embed(m)
        if isinstance(other, (int, Fraction)):
            return self, CyclotomicElement(self.order, [Fraction(other)])
        return NotImplemented, NotImplemented

    def __add__(self, other):
        a, b = self._lift(other)
        if a is NotImplemented:
            return NotImplemented
        n = max(len(a.coefficients), len(b.coefficients))
        ca = list(a.coefficients) + [0] * (n - len(a.coefficients))
        cb = list(b.coefficients) + [0] * (n - len(b.coefficients))
        return CyclotomicElement(a.order, [x + y for x, y in zip(ca, cb)])

    __radd__ = __add__

    def __neg__(self):
        return CyclotomicElement(self.order, [-c for c in self.coefficients])

    def __sub__(self, other):
        a, b = self._lift(other)
        if a is NotImplemented:
            return NotImplemented
        return a + (-b)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        a, b = self._lift(other)
        if a is NotImplemented:
            return NotImplemented
        return CyclotomicElement(a.order, _pmul(a.coefficients, b.coefficients))

    __rmul__ = __mul__

    def inverse(self) -> "CyclotomicElement":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero in a cyclotomic field")
        phi = [Fraction(c) for c in _phi(self.order)]
        r0, r1 = phi, _qtrim(list(self.coefficients))
        s0, s1 = [Fraction(0)], [Fraction(1)]
        while len(r1) > 1 or r1[0] != 0:
            q, r = _qdivmod(r0, r1)
            r0, r1 = r1, r
            s0, s1 = s1, _qsub(s0, _qmul(q, s1))
        # r0 is a nonzero constant since Phi_M is irreducible
        c = r0[0]
        return CyclotomicElement(self.order, [x / c for x in s0])

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return CyclotomicElement(self.order, [c / Fraction(other) for c in self.coefficients])
        a, b = self._lift(other)
        if a is NotImplemented:
            return NotImplemented
        return a * b.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        result = CyclotomicElement(self.order, [1])
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coefficients)

    def __eq__(self, other):
        a, b = self._lift(other)
        if a is NotImplemented:
            return NotImplemented
        return a.coefficients == b.coefficients

    def __hash__(self):
        r = is_rational(self)
        if r is not None:
            return hash(r)
        return hash((self.order, self.coefficients))

    def to_complex(self) -> complex:
        z = cmath.exp(2j * cmath.pi / self.order)
        return complex(sum(float(c) * z**i for i, c in enumerate(self.coefficients)))

    def to_json(self) -> dict:
        from ..serialize import rational_str

        return {"order": self.order, "coefficients": [rational_str(c) for c in self.coefficients]}

    def __repr__(self):
        r = is_rational(self)
        if r is not None:
            return f"Cyclo({r})"
        terms = [f"{c}*z^{i}" for i, c in enumerate(self.coefficients) if c]
        return f"Cyclo[{self.order}](" + " + ".join(terms) + ")"


def root_of_unity(rotation, order: Optional[int] = None) -> CyclotomicElement:
    """``exp(2 pi i * rotation)`` inside the ring of the given order.

    ``rotation`` is reduced mod 1 first. With no order given, the smallest
    ring (order = denominator of the rotation) is used.
    """
    r = Fraction(rotation) % 1
    N = r.denominator
    if order is None:
        order = N
    if order % N:
        raise OrderMismatchError(f"rotation {r} needs order divisible by {N}, got {order}")
    power = r.numerator * (order // N)
    coeffs = [Fraction(0)] * (power + 1)
    coeffs[power] = Fraction(1)
    return CyclotomicElement(order, coeffs)


def is_rational(x) -> Optional[Fraction]:
    """The rational value of ``x`` if it is rational, else None."""
    if isinstance(x, (int, Fraction)):
        return Fraction(x)
    if all(c == 0 for c in x.coefficients[1:]):
        return x.coefficients[0]
    return None


def multiplicative_order(x: CyclotomicElement) -> Optional[int]:
    """Order of ``x`` as a root of unity, or None if it is not one."""
    bound = lcm(2, x.order)
    for n in range(1, bound + 1):
        if bound % n == 0 and x**n == 1:
            return n
    return None


def common_order(rotations) -> int:
    m = 1
    for r in rotations:
        m = lcm(m, Fraction(r).denominator)
    return m


def coerce_scalar(x, order: int):
    """Promote an int/Fraction/CyclotomicElement into the ring of ``order``."""
    if isinstance(x, CyclotomicElement):
        return x.embed(order)
    return CyclotomicElement(order, [Fraction(x)])


__all__ = [
    "CyclotomicElement",
    "OrderMismatchError",
    "common_order",
    "coerce_scalar",
    "cyclotomic_polynomial",
    "is_rational",
    "multiplicative_order",
    "root_of_unity",
]
