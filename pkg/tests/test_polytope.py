from __future__ import annotations

import itertools
import random
from fractions import Fraction

import pytest

from conftest import QS, SUITE
from wem import polytope as P
from wem.arith import MultiPolynomial
from wem.linalg import dot
from wem.polytope import (Cone, HalfSpaceDescription, PolytopeError, cone_weighted_sum, polar_decomposition_sum,
                          validate)


def hrep(normals, offsets):
    return HalfSpaceDescription(tuple(map(tuple, normals)), tuple(offsets))


SQUARE_ROWS = [[1, 0], [0, 1], [-1, 0], [0, -1]]


@pytest.mark.parametrize("normals, offsets, kind", [
    (SQUARE_ROWS + [[-1, 0]], [0, 0, 1, 1, 2], "redundant"),
    ([[1, 0], [0, 1], [-2, -2]], [0, 0, 1], "non-primitive"),
    ([[1, 0], [0, 1], [-1, -1]], [0, 0, 0], "not-full-dimensional"),
    ([[1, 0], [0, 1], [-1, 1]], [0, 0, 1], "unbounded"),
    ([[1, 0], [0, 1], [-2, -1]], [0, 0, 1], "non-integral"),
    ([[1, 0], [0, 1], [0, 0, 1]], [0, 0, 1], "dimension"),
    ([[1, 0], [0, 1]], [0, 0], "too-few-halfspaces"),
])
def test_validation_errors(normals, offsets, kind):
    with pytest.raises(PolytopeError) as err:
        validate(hrep(normals, offsets))
    assert err.value.kind == kind


def test_redundant_facet_is_named():
    with pytest.raises(PolytopeError) as err:
        validate(hrep(SQUARE_ROWS + [[-1, 0]], [0, 0, 1, 1, 2]))
    assert err.value.to_json()["witness"] == {"facet": 4}


def test_non_simple_vertex():
    # square pyramid: the apex lies on four facets
    rows = [[0, 0, 1], [1, 0, -1], [0, 1, -1], [-1, 0, -1], [0, -1, -1]]
    with pytest.raises(PolytopeError) as err:
        validate(hrep(rows, [0, 1, 1, 1, 1]))
    assert err.value.kind == "non-simple"


def test_triangle_geometry(T):
    assert sorted(v.location for v in T.vertices) == [(0, 0), (0, 2), (1, 0)]
    v = next(v for v in T.vertices if v.location == (1, 0))
    assert v.edge_vectors == {1: (Fraction(-1, 2), Fraction(1)), 2: (Fraction(-1, 2), Fraction(0))}
    assert len(T.faces) == 7
    assert len(SUITE["square"].faces) == 9
    assert len(SUITE["cube"].faces) == 27


@pytest.mark.parametrize("name", sorted(SUITE))
def test_dual_basis(name):
    poly = SUITE[name]
    for v in poly.vertices:
        for i, a in v.edges:
            for j in v.facets:
                assert dot(poly.normals[j], a) == (1 if i == j else 0)


@pytest.mark.parametrize("name", sorted(SUITE))
def test_dilated_vertices_solve_shifted_equations(name):
    poly = SUITE[name]
    d = poly.facet_count
    h = [Fraction(k + 1, 7) for k in range(d)]
    for v in poly.vertices:
        x = [c(*h) for c in poly.dilated_vertex(v.index)]
        for i in v.facets:
            assert dot(poly.normals[i], x) + poly.offsets[i] + h[i] == 0
        assert [c(*[Fraction(0)] * d) for c in poly.dilated_vertex(v.index)] == list(v.location)


def test_square_vertex_dilation(square):
    v = next(v for v in square.vertices if v.location == (1, 1))
    h = MultiPolynomial.variable
    assert square.dilated_vertex(v.index) == [1 + h(4, 2), 1 + h(4, 3)]


def test_polarization_rules(square, T):
    pol = square.polarize([1, 2])
    origin = next(pv for pv in pol.vertices if square.vertices[pv.vertex].location == (0, 0))
    assert origin.flip_count == 2
    assert sorted(pol.flip_counts) == [0, 1, 1, 2]
    assert T.is_polarizing([1, 2]) is None
    with pytest.raises(PolytopeError):
        square.polarize([1, 0])
    interval = validate(hrep([[1], [-1]], [-2, 5]))
    flips = {interval.vertices[pv.vertex].location: pv for pv in interval.polarize([1]).vertices}
    assert flips[(2,)].flip_count == 1 and flips[(2,)].weights(Fraction(1, 3)) == {0: Fraction(2, 3)}
    assert flips[(5,)].flip_count == 0 and flips[(5,)].weights(Fraction(1, 3)) == {1: Fraction(1, 3)}


def test_default_polarizing_vector(suite):
    for poly in suite.values():
        xi = poly.default_polarizing_vector()
        assert poly.is_polarizing(xi) is None
        assert poly.polarize().xi == tuple(xi)


@pytest.mark.parametrize("name, expected", [
    ("square", lambda q: 4 * q**2),
    ("T", lambda q: 3 * q**2 + q),
    ("2T", lambda q: 3 * q**2 + 5 * q + 1),
])
def test_weighted_counts(name, expected):
    one = MultiPolynomial.constant(2, 1)
    for q in QS:
        assert SUITE[name].weighted_lattice_sum(one, q) == expected(q)


@pytest.mark.parametrize("name", sorted(SUITE))
def test_count_by_faces(name):
    """Grouping lattice points by the face containing them in its relative interior."""
    poly = SUITE[name]
    n = poly.dimension
    relint = {key: 0 for key in poly.faces}
    for x in poly.lattice_points():
        relint[poly.active_facets(x)] += 1
    one = MultiPolynomial.constant(n, 1)
    for q in QS:
        assert sum(q ** len(key) * c for key, c in relint.items()) == poly.weighted_lattice_sum(one, q)
    box_points = list(itertools.product(*(range(a, b + 1) for a, b in zip(*poly.bounding_box))))
    assert poly.weighted_lattice_sum(one, 1) == sum(1 for x in box_points if poly.contains(x))


def test_cone_weighted_sum_orthant():
    cone = Cone.from_normals((0, 0), [(1, 0), (0, 1)])
    q1, q2 = Fraction(1, 3), Fraction(2, 5)
    f = {x: 1 for x in itertools.product(range(3), repeat=2)}
    assert cone_weighted_sum(cone, [q1, q2], f) == q1 * q2 + 2 * q1 + 2 * q2 + 4
    ray = Cone.from_normals((0,), [(1,)])
    g = {(x,): Fraction(x + 1) for x in range(-1, 4)}
    assert cone_weighted_sum(ray, [q1], g) == q1 * 1 + 2 + 3 + 4


@pytest.mark.parametrize("name", sorted(SUITE))
def test_polar_decomposition(name):
    poly = SUITE[name]
    rng = random.Random(name)
    n = poly.dimension
    lo, hi = -3, 4
    f = {x: Fraction(rng.randint(-9, 9), rng.randint(1, 5))
         for x in itertools.product(range(lo, hi + 1), repeat=n)}
    xis = [poly.default_polarizing_vector(), [3, -1, 2][:n], [-2, 5, 1][:n]]
    for xi in xis:
        assert poly.is_polarizing(xi) is None
        pol = poly.polarize(xi)
        for q in [Fraction(0), Fraction(1, 3), Fraction(1)]:
            assert polar_decomposition_sum(poly, pol, q, f) == poly.weighted_lattice_sum(f, q)


def test_json_roundtrip(T):
    again = P.from_json(T.hrep.to_json())
    assert [v.location for v in again.vertices] == [v.location for v in T.vertices]
