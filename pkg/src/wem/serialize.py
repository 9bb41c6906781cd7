"""JSON wire formats for exact values."""

from __future__ import annotations

from fractions import Fraction


def rational_str(x) -> str:
    """Canonical ``"p/q"`` (``"p"`` when q = 1)."""
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def parse_rational(s) -> Fraction:
    if isinstance(s, (int, Fraction)):
        return Fraction(s)
    if isinstance(s, float):
        raise ValueError("floats are not accepted where an exact rational is required")
    return Fraction(str(s).strip())


def scalar_json(x):
    """Rational string for rationals, cyclotomic record otherwise."""
    from .arith import CyclotomicElement, is_rational

    if isinstance(x, CyclotomicElement):
        r = is_rational(x)
        return rational_str(r) if r is not None else x.to_json()
    if isinstance(x, complex):
        return {"re": x.real, "im": x.imag}
    if isinstance(x, float):
        return x
    return rational_str(x)


def cyclotomic_from_json(obj):
    from .arith import CyclotomicElement

    return CyclotomicElement(int(obj["order"]), [parse_rational(c) for c in obj["coefficients"]])
