"""Truncated univariate power series over exact scalar rings."""

from __future__ import annotations

from fractions import Fraction
from math import factorial
from typing import Sequence


class NonInvertibleSeriesError(ZeroDivisionError):
    """Division by a series whose constant term is zero."""


class TruncatedSeries:
    """``c_0 + c_1 S + ... + c_k S^k`` with all products truncated above degree k."""

    __slots__ = ("bound", "coefficients")

    def __init__(self, coefficients: Sequence, bound: int | None = None):
        coeffs = [Fraction(c) if isinstance(c, int) else c for c in coefficients]
        if bound is None:
            bound = max(len(coeffs) - 1, 0)
        if bound < 0:
            raise ValueError("degree bound must be non-negative")
        coeffs = coeffs[: bound + 1]
        coeffs += [Fraction(0)] * (bound + 1 - len(coeffs))
        self.bound = bound
        self.coefficients = tuple(coeffs)

    @classmethod
    def variable(cls, bound: int) -> "TruncatedSeries":
        return cls([0, 1], bound)

    @classmethod
    def exponential(cls, bound: int, scale=1) -> "TruncatedSeries":
        """Coefficients of ``exp(scale * S)``: ``scale^j / j!``."""
        scale = Fraction(scale) if isinstance(scale, int) else scale
        return cls([scale**j / factorial(j) for j in range(bound + 1)], bound)

    def __getitem__(self, j: int):
        return self.coefficients[j] if 0 <= j <= self.bound else Fraction(0)

    def __len__(self):
        return self.bound + 1

    def _coerce(self, other) -> "TruncatedSeries":
        if isinstance(other, TruncatedSeries):
            return other
        return TruncatedSeries([other], self.bound)

    def _bound_with(self, other) -> int:
        return min(self.bound, other.bound)

    def __add__(self, other):
        other = self._coerce(other)
        b = self._bound_with(other)
        return TruncatedSeries([self[j] + other[j] for j in range(b + 1)], b)

    __radd__ = __add__

    def __neg__(self):
        return TruncatedSeries([-c for c in self.coefficients], self.bound)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, TruncatedSeries):
            return TruncatedSeries([c * other for c in self.coefficients], self.bound)
        b = self._bound_with(other)
        out = []
        for n in range(b + 1):
            acc = Fraction(0)
            for i in range(n + 1):
                a = self.coefficients[i]
                if a == 0:
                    continue
                c = other.coefficients[n - i]
                if c == 0:
                    continue
                acc = acc + a * c
            out.append(acc)
        return TruncatedSeries(out, b)

    def __rmul__(self, other):
        return self * other

    def reciprocal(self) -> "TruncatedSeries":
        c0 = self.coefficients[0]
        if c0 == 0:
            raise NonInvertibleSeriesError("series with zero constant term is not invertible")
        inv0 = 1 / c0 if not isinstance(c0, int) else Fraction(1, c0)
        out = [inv0]
        for n in range(1, self.bound + 1):
            acc = Fraction(0)
            for i in range(1, n + 1):
                if self.coefficients[i] != 0:
                    acc = acc + self.coefficients[i] * out[n - i]
            out.append(-acc * inv0)
        return TruncatedSeries(out, self.bound)

    def __truediv__(self, other):
        if isinstance(other, TruncatedSeries):
            return self * other.reciprocal()
        return TruncatedSeries([c / other for c in self.coefficients], self.bound)

    def __rtruediv__(self, other):
        return self._coerce(other) * self.reciprocal()

    def shift_down(self) -> "TruncatedSeries":
        """Divide by S; the constant term must vanish. The bound drops by one."""
        if self.coefficients[0] != 0:
            raise NonInvertibleSeriesError("series is not a multiple of S")
        return TruncatedSeries(self.coefficients[1:], max(self.bound - 1, 0))

    def shift_up(self, bound: int | None = None) -> "TruncatedSeries":
        """Multiply by S."""
        b = self.bound + 1 if bound is None else bound
        return TruncatedSeries([Fraction(0), *self.coefficients], b)

    def compose(self, inner: "TruncatedSeries") -> "TruncatedSeries":
        """``self(inner(S))`` for ``inner`` with zero constant term (Horner)."""
        if inner.coefficients[0] != 0:
            raise ValueError("inner series must have zero constant term")
        b = self._bound_with(inner)
        inner = inner.truncate(b)
        top = min(self.bound, b)
        result = TruncatedSeries([self[top]], b)
        for j in range(top - 1, -1, -1):
            result = result * inner + self.coefficients[j]
        return result

    def negate_variable(self) -> "TruncatedSeries":
        """``f(-S)``."""
        return TruncatedSeries([c if j % 2 == 0 else -c for j, c in enumerate(self.coefficients)], self.bound)

    def truncate(self, bound: int) -> "TruncatedSeries":
        return TruncatedSeries(self.coefficients[: bound + 1], bound)

    def map(self, fn) -> "TruncatedSeries":
        return TruncatedSeries([fn(c) for c in self.coefficients], self.bound)

    def __eq__(self, other):
        if isinstance(other, TruncatedSeries):
            b = max(self.bound, other.bound)
            return all(self[j] == other[j] for j in range(b + 1))
        return NotImplemented

    def __hash__(self):
        return hash(self.coefficients)

    def __repr__(self):
        return f"TruncatedSeries({list(self.coefficients)}, bound={self.bound})"


def exponential_coefficients(k: int) -> list:
    """``[1/j! for j <= k]``."""
    return list(TruncatedSeries.exponential(k).coefficients)
