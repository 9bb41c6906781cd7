from __future__ import annotations

import cmath
from fractions import Fraction
from math import lcm

import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from wem import linalg
from wem.arith import (CyclotomicElement, MultiPolynomial, NonInvertibleSeriesError, OrderMismatchError,
                       TruncatedSeries, common_order, cyclotomic_polynomial, integrate_standard_simplex,
                       is_rational, multiplicative_order, root_of_unity)
from wem.serialize import cyclotomic_from_json, parse_rational, rational_str

fractions = st.fractions(min_value=-5, max_value=5, max_denominator=7)
ORDERS = [1, 2, 3, 4, 5, 6, 8, 12]


def elements(order):
    return st.lists(fractions, min_size=1, max_size=order + 1).map(lambda cs: CyclotomicElement(order, cs))


@st.composite
def triples(draw):
    M = draw(st.sampled_from(ORDERS))
    return M, draw(elements(M)), draw(elements(M)), draw(elements(M))


@settings(max_examples=60, deadline=None)
@given(triples())
def test_ring_axioms(data):
    _, a, b, c = data
    assert a + b == b + a
    assert a * b == b * a
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a - a == 0


@settings(max_examples=40, deadline=None)
@given(triples())
def test_inverse_and_complex_embedding(data):
    _, a, b, _ = data
    assert abs((a * b).to_complex() - a.to_complex() * b.to_complex()) < 1e-9
    if not a.is_zero():
        assert a * a.inverse() == 1
        assert abs((b / a).to_complex() - b.to_complex() / a.to_complex()) < 1e-6


@pytest.mark.parametrize("M", range(1, 25))
def test_cyclotomic_polynomial_matches_sympy(M):
    x = sp.Symbol("x")
    expected = sp.Poly(sp.cyclotomic_poly(M, x), x).all_coeffs()[::-1]
    ours = cyclotomic_polynomial(M).univariate_coeffs()
    assert [Fraction(int(c)) for c in expected] == list(ours)


@pytest.mark.parametrize("M", [1, 2, 3, 4, 6, 8, 9, 12])
def test_roots_of_unity(M):
    for a in range(M):
        z = root_of_unity(Fraction(a, M))
        assert abs(z.to_complex() - cmath.exp(2j * cmath.pi * a / M)) < 1e-12
        assert multiplicative_order(z) == Fraction(a, M).denominator
    total = sum((root_of_unity(Fraction(a, M)) for a in range(M)), CyclotomicElement(1))
    assert total == (1 if M == 1 else 0)


def test_mixed_orders_embed_at_lcm():
    i = root_of_unity(Fraction(1, 4))
    w = root_of_unity(Fraction(1, 3))
    s = i * w
    assert s.order == lcm(4, 3)
    assert s == root_of_unity(Fraction(7, 12))
    assert i.embed(12) == i
    with pytest.raises(OrderMismatchError):
        w.embed(8)
    assert common_order([Fraction(1, 4), Fraction(5, 6), 0]) == 12


def test_rationality_detection():
    w = root_of_unity(Fraction(1, 3))
    assert is_rational(w + w * w) == -1
    assert is_rational(w) is None
    assert is_rational(root_of_unity(Fraction(1, 2))) == -1


def test_cyclotomic_json_roundtrip():
    x = root_of_unity(Fraction(1, 5)) * Fraction(3, 7) + 2
    assert cyclotomic_from_json(x.to_json()) == x


def test_rational_wire_format():
    assert rational_str(Fraction(6, 4)) == "3/2"
    assert rational_str(Fraction(-4, 2)) == "-2"
    assert parse_rational(" -3/9 ") == Fraction(-1, 3)
    with pytest.raises(ValueError):
        parse_rational(0.5)


# -- truncated series -----------------------------------------------------------------

def test_series_reciprocal_against_sympy():
    S = sp.Symbol("S")
    k = 10
    s = TruncatedSeries.exponential(k + 1)
    inner = (s - 1).shift_down().truncate(k)
    ours = inner.reciprocal()
    expected = sp.series(S / (sp.exp(S) - 1), S, 0, k + 1).removeO()
    assert [Fraction(str(expected.coeff(S, j))) for j in range(k + 1)] == list(ours.coefficients)


def test_series_errors_and_composition():
    with pytest.raises(NonInvertibleSeriesError):
        TruncatedSeries([0, 1], 4).reciprocal()
    x = TruncatedSeries.variable(6)
    e = TruncatedSeries.exponential(6)
    # exp(2S) = exp(S) composed with 2S
    assert e.compose(x * 2) == TruncatedSeries.exponential(6, 2)
    assert e.negate_variable() == TruncatedSeries.exponential(6, -1)
    assert (e * e.negate_variable()) == TruncatedSeries([1], 6)


# -- multivariate polynomials -------------------------------------------------------------

def test_polynomial_arithmetic_against_sympy():
    x, y = sp.symbols("x y")
    X, Y = MultiPolynomial.variable(2, 0), MultiPolynomial.variable(2, 1)
    p = (X * 3 + Y * Fraction(1, 2) - 1) ** 3 * (X - Y * Y)
    e = sp.expand((3 * x + y / 2 - 1) ** 3 * (x - y**2))
    for (a, b), c in p.items():
        assert Fraction(str(sp.Poly(e, x, y).coeff_monomial(x**a * y**b))) == c
    d = p.derivative(1, 2)
    ed = sp.expand(sp.diff(e, y, 2))
    assert d(Fraction(1, 3), Fraction(-2)) == Fraction(str(ed.subs({x: sp.Rational(1, 3), y: -2})))
    assert p.substitute([Y, X])(Fraction(2), Fraction(5)) == p(Fraction(5), Fraction(2))


@pytest.mark.parametrize("exponent", [(0, 0), (2, 1), (1, 1, 1), (3, 0, 2), (0, 4)])
def test_simplex_integral_against_sympy(exponent):
    xs = sp.symbols(f"x0:{len(exponent)}")
    integrand = sp.Mul(*[v**a for v, a in zip(xs, exponent)])
    # iterated integral over the standard simplex, innermost variable last
    bound = 1
    expr = integrand
    for i in reversed(range(len(xs))):
        bound = 1 - sum(xs[:i])
        expr = sp.integrate(expr, (xs[i], 0, bound))
    assert integrate_standard_simplex(exponent) == Fraction(str(expr))


# -- integer linear algebra ----------------------------------------------------------------

@settings(max_examples=60, deadline=None)
@given(st.lists(st.lists(st.integers(-6, 6), min_size=3, max_size=3), min_size=3, max_size=3))
def test_smith_normal_form(a):
    P, D, Q = linalg.smith_normal_form(a)
    assert linalg.matmul(linalg.matmul(P, a), Q) == D
    diag = [D[i][i] for i in range(3)]
    assert all(D[i][j] == 0 for i in range(3) for j in range(3) if i != j)
    assert all(x >= 0 for x in diag)
    for s, t in zip(diag, diag[1:]):
        assert (t == 0) if s == 0 else t % s == 0
    assert abs(linalg.det(P)) == 1 and abs(linalg.det(Q)) == 1
    product = 1
    for s in diag:
        product *= s
    assert product == abs(linalg.det(a))


def test_det_matches_sympy():
    rows = [[2, -1, 3, 0], [1, 4, -2, 5], [0, 3, 1, -1], [7, 0, 2, 2]]
    assert linalg.det(rows) == int(sp.Matrix(rows).det())
    inv = linalg.inverse(rows)
    assert linalg.matmul(rows, inv) == linalg.identity(4)
