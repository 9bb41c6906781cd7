"""Sparse multivariate polynomials over exact scalars."""

from __future__ import annotations

from fractions import Fraction
from math import factorial
from typing import Dict, Iterable, Mapping, Tuple

Exponent = Tuple[int, ...]


def _is_zero(c) -> bool:
    return c == 0


class MultiPolynomial:
    """Polynomial in ``nvars`` variables stored as ``{exponent: coefficient}``.

    Coefficients may be ints, Fractions or any exact scalar supporting ring
    operations (cyclotomic elements included). Zero coefficients are never
    stored.
    """

    __slots__ = ("nvars", "_terms")

    def __init__(self, nvars: int, terms: Mapping[Exponent, object] | None = None):
        if nvars < 1:
            raise ValueError("a polynomial needs at least one variable")
        self.nvars = nvars
        clean: Dict[Exponent, object] = {}
        for exp, c in (terms or {}).items():
            exp = tuple(int(e) for e in exp)
            if len(exp) != nvars or any(e < 0 for e in exp):
                raise ValueError(f"bad exponent {exp} for {nvars} variables")
            if isinstance(c, int):
                c = Fraction(c)
            if not _is_zero(c):
                clean[exp] = clean[exp] + c if exp in clean else c
                if _is_zero(clean[exp]):
                    del clean[exp]
        self._terms = clean

    # -- constructors -------------------------------------------------------

    @classmethod
    def constant(cls, nvars: int, c) -> "MultiPolynomial":
        return cls(nvars, {(0,) * nvars: c})

    @classmethod
    def variable(cls, nvars: int, i: int) -> "MultiPolynomial":
        exp = [0] * nvars
        exp[i] = 1
        return cls(nvars, {tuple(exp): Fraction(1)})

    @classmethod
    def monomial(cls, exponent: Iterable[int], c=1) -> "MultiPolynomial":
        exponent = tuple(exponent)
        return cls(len(exponent), {exponent: Fraction(c) if isinstance(c, int) else c})

    @classmethod
    def linear(cls, coeffs, const=0) -> "MultiPolynomial":
        """Affine form ``const + sum coeffs[i] * x_i``."""
        n = len(coeffs)
        terms: Dict[Exponent, object] = {(0,) * n: const}
        for i, c in enumerate(coeffs):
            e = [0] * n
            e[i] = 1
            terms[tuple(e)] = c
        return cls(n, terms)

    @classmethod
    def univariate(cls, coeffs) -> "MultiPolynomial":
        return cls(1, {(i,): c for i, c in enumerate(coeffs)})

    # -- access ---------------------------------------------------------------

    @property
    def terms(self) -> Dict[Exponent, object]:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def coefficient(self, exponent: Iterable[int]):
        return self._terms.get(tuple(exponent), Fraction(0))

    def is_zero(self) -> bool:
        return not self._terms

    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        return max((sum(e) for e in self._terms), default=-1)

    def univariate_coeffs(self) -> list:
        if self.nvars != 1:
            raise ValueError("not univariate")
        out = [Fraction(0)] * (self.degree() + 1)
        for (e,), c in self._terms.items():
            out[e] = c
        return out

    # -- arithmetic -----------------------------------------------------------

    def _coerce(self, other) -> "MultiPolynomial":
        if isinstance(other, MultiPolynomial):
            if other.nvars != self.nvars:
                raise ValueError("variable count mismatch")
            return other
        return MultiPolynomial.constant(self.nvars, other)

    def __add__(self, other):
        other = self._coerce(other)
        terms = dict(self._terms)
        for e, c in other._terms.items():
            terms[e] = terms[e] + c if e in terms else c
        return MultiPolynomial(self.nvars, terms)

    __radd__ = __add__

    def __neg__(self):
        return MultiPolynomial(self.nvars, {e: -c for e, c in self._terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, MultiPolynomial):
            if _is_zero(other):
                return MultiPolynomial(self.nvars)
            return MultiPolynomial(self.nvars, {e: c * other for e, c in self._terms.items()})
        other = self._coerce(other)
        terms: Dict[Exponent, object] = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                p = c1 * c2
                terms[e] = terms[e] + p if e in terms else p
        return MultiPolynomial(self.nvars, terms)

    def __rmul__(self, other):
        return self * other

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative power")
        result = MultiPolynomial.constant(self.nvars, Fraction(1))
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, MultiPolynomial):
            return self.nvars == other.nvars and self._terms == other._terms
        return self == self._coerce(other)

    def __hash__(self):
        return hash((self.nvars, frozenset(self._terms.items())))

    # -- calculus and evaluation ---------------------------------------------

    def derivative(self, i: int, order: int = 1) -> "MultiPolynomial":
        terms = {}
        for e, c in self._terms.items():
            if e[i] < order:
                continue
            falling = factorial(e[i]) // factorial(e[i] - order)
            ne = list(e)
            ne[i] -= order
            terms[tuple(ne)] = c * falling
        return MultiPolynomial(self.nvars, terms)

    def __call__(self, *point):
        if len(point) == 1 and isinstance(point[0], (list, tuple)):
            point = tuple(point[0])
        if len(point) != self.nvars:
            raise ValueError("wrong number of arguments")
        total = Fraction(0)
        for e, c in self._terms.items():
            m = c
            for x, k in zip(point, e):
                if k:
                    m = m * x**k
            total = total + m
        return total

    def substitute(self, images) -> "MultiPolynomial":
        """Compose with polynomials: variable i is replaced by ``images[i]``."""
        if len(images) != self.nvars:
            raise ValueError("need one image per variable")
        target = images[0].nvars
        cache: Dict[Tuple[int, int], MultiPolynomial] = {}

        def power(i, k):
            if (i, k) not in cache:
                cache[(i, k)] = images[i] ** k
            return cache[(i, k)]

        result = MultiPolynomial(target)
        for e, c in self._terms.items():
            m = MultiPolynomial.constant(target, c)
            for i, k in enumerate(e):
                if k:
                    m = m * power(i, k)
            result = result + m
        return result

    def embed(self, nvars: int, positions) -> "MultiPolynomial":
        """Re-index into ``nvars`` variables; variable i moves to ``positions[i]``."""
        terms = {}
        for e, c in self._terms.items():
            ne = [0] * nvars
            for i, k in enumerate(e):
                ne[positions[i]] += k
            terms[tuple(ne)] = c
        return MultiPolynomial(nvars, terms)

    def collect(self, split: int) -> Dict[Exponent, "MultiPolynomial"]:
        """Group by the exponents of the first ``split`` variables.

        Returns ``{head_exponent: polynomial in the remaining variables}``.
        """
        rest = self.nvars - split
        groups: Dict[Exponent, Dict[Exponent, object]] = {}
        for e, c in self._terms.items():
            groups.setdefault(e[:split], {})[e[split:]] = c
        return {h: MultiPolynomial(rest, t) for h, t in groups.items()}

    def __repr__(self):
        if not self._terms:
            return "0"
        parts = []
        for e, c in sorted(self._terms.items(), reverse=True):
            mon = "*".join(f"x{i}" + (f"^{k}" if k > 1 else "") for i, k in enumerate(e) if k)
            parts.append(f"({c})" + ("*" + mon if mon else ""))
        return " + ".join(parts)


def integrate_standard_simplex(exponent: Exponent) -> Fraction:
    """Integral of ``t^a`` over ``{t >= 0, sum t <= 1}``: ``prod a_i! / (n + |a|)!``."""
    num = 1
    for a in exponent:
        num *= factorial(a)
    return Fraction(num, factorial(len(exponent) + sum(exponent)))


def determinant(rows):
    """Determinant of a square matrix with ring entries, by cofactor expansion.

    Used only for the small (n <= 4) matrices of affine-in-h polynomials.
    """
    n = len(rows)
    if n == 1:
        return rows[0][0]
    if n == 2:
        return rows[0][0] * rows[1][1] - rows[0][1] * rows[1][0]
    total = None
    for j in range(n):
        if _entry_is_zero(rows[0][j]):
            continue
        minor = [r[:j] + r[j + 1:] for r in rows[1:]]
        term = rows[0][j] * determinant(minor)
        if j % 2:
            term = -term
        total = term if total is None else total + term
    if total is None:
        return rows[0][0] * 0
    return total


def _entry_is_zero(x) -> bool:
    if isinstance(x, MultiPolynomial):
        return x.is_zero()
    return x == 0
