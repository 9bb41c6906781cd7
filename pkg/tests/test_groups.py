from __future__ import annotations

import itertools
from fractions import Fraction

import pytest

from conftest import SUITE
from wem.groups import PolytopeGroups, cone_group, face_group, frobenius_indicator
from wem.linalg import det

NAMES = sorted(SUITE)


@pytest.fixture(scope="module")
def tables():
    return {name: PolytopeGroups(poly) for name, poly in SUITE.items()}


def vertex_at(poly, location):
    return next(v for v in poly.vertices if v.location == location)


def test_triangle_vertex_group(T, tables):
    G = tables["T"]
    v = vertex_at(T, (1, 0))
    Gv = G.group(G.vertex_face(v.index))
    assert Gv.invariant_factors == (2,)
    nontrivial = next(g for g in Gv.elements if not g.is_identity)
    # the lift is only defined modulo the normal lattice; (1, 0) is one representative
    assert Gv.classify(nontrivial.lift) == Gv.classify((1, 0))
    rot = {j: G.rotation(G.vertex_face(v.index), nontrivial, j) for j in v.facets}
    assert rot == {1: Fraction(1, 2), 2: Fraction(1, 2)}
    assert [g.coordinates for g in G.flat_subset(G.vertex_face(v.index))] == [nontrivial.coordinates]
    edge = T.faces[(0,)]
    assert G.group(edge).order == 1
    assert G.ambient_order == 2


def test_groups_of_regular_polytopes(tables):
    for name in ("square", "box32", "cube", "simplex3"):
        G = tables[name]
        assert G.ambient_order == 1
        for key, grp in G.groups.items():
            assert grp.order == 1
            flat = G.flat_subsets[key]
            assert len(flat) == (1 if key == () else 0)


@pytest.mark.parametrize("name", NAMES)
def test_vertex_group_order_is_determinant(name, tables):
    poly = SUITE[name]
    G = tables[name]
    for v in poly.vertices:
        grp = G.group(G.vertex_face(v.index))
        assert grp.order == abs(det([poly.normals[i] for i in v.facets]))
        product = 1
        for s in grp.invariant_factors:
            product *= s
        assert product == grp.order
        assert all(s >= 2 for s in grp.invariant_factors)


@pytest.mark.parametrize("name", NAMES)
def test_characters(name, tables):
    """Rotations agree across the vertices of a face, are trivial off I_F, and are multiplicative."""
    poly = SUITE[name]
    G = tables[name]
    for key, grp in G.groups.items():
        F = poly.faces[key]
        for g in grp.elements:
            for j in range(poly.facet_count):
                r = G.rotation(F, g, j)
                if j not in key:
                    assert r == 0
                    continue
                for v in F.vertices:
                    alpha = poly.vertices[v].edge_vectors[j]
                    assert sum(Fraction(a) * b for a, b in zip(g.lift, alpha)) % 1 == r
            if g.is_identity:
                assert all(G.rotation(F, g, j) == 0 for j in range(poly.facet_count))
        for g, h in itertools.product(grp.elements, repeat=2):
            gh = grp.element(grp.classify([a + b for a, b in zip(g.lift, h.lift)]))
            for j in key:
                assert G.rotation(F, gh, j) == (G.rotation(F, g, j) + G.rotation(F, h, j)) % 1


@pytest.mark.parametrize("name", NAMES)
def test_flat_elements_have_no_trivial_character(name, tables):
    G = tables[name]
    for F, g in G.flat_pairs():
        for j in F.facets:
            assert G.rotation(F, g, j) != 0


@pytest.mark.parametrize("name", NAMES)
def test_inclusions_are_injective(name, tables):
    poly = SUITE[name]
    G = tables[name]
    for F in poly.faces.values():
        for E in poly.faces_containing(F):
            image = G.image(E, F)
            assert len(set(image)) == G.group(E).order


@pytest.mark.parametrize("name", NAMES)
def test_vertex_group_partition(name, tables):
    poly = SUITE[name]
    G = tables[name]
    for v in poly.vertices:
        Fv = G.vertex_face(v.index)
        pieces = []
        for key, flat in G.flat_subsets.items():
            F = poly.faces[key]
            if v.index not in F.vertices:
                continue
            big = G.group(F)
            image = dict(zip((g.coordinates for g in big.elements), G.image(F, Fv)))
            pieces.extend(image[g.coordinates] for g in flat)
        assert len(pieces) == len(set(pieces)) == G.group(Fv).order


@pytest.mark.parametrize("name", NAMES)
def test_frobenius_indicator(name):
    poly = SUITE[name]
    n = poly.dimension
    for v in poly.vertices:
        cone = poly.tangent_cone(v.index)
        grp = cone_group(cone)
        assert grp.order == poly.vertex_group_order(v.index)
        patch = itertools.product(range(-2, 3), repeat=n)
        for m in patch:
            x = [Fraction(c) for c in cone.apex]
            for mj, a in zip(m, cone.generators):
                x = [xi + mj * ai for xi, ai in zip(x, a)]
            expected = 1 if all(c.denominator == 1 for c in x) else 0
            assert frobenius_indicator(grp, cone, x) == expected


def test_frobenius_indicator_examples(T):
    v = vertex_at(T, (1, 0))
    cone = T.tangent_cone(v.index)
    grp = cone_group(cone)
    assert frobenius_indicator(grp, cone, (Fraction(1, 2), 1)) == 0
    assert frobenius_indicator(grp, cone, (0, 1)) == 1
    with pytest.raises(ValueError):
        frobenius_indicator(grp, cone, (Fraction(1, 3), 0))


def test_face_group_of_whole_polytope(T):
    grp = face_group(T, T.faces[()])
    assert grp.order == 1 and grp.invariant_factors == ()


def test_json_dump(tables):
    dump = tables["T"].to_json()
    assert dump["ambient_order"] == 2
    vertex = next(f for f in dump["faces"] if f["facets"] == [1, 2])
    assert vertex["invariant_factors"] == [2]
    flags = sorted((e["flat"], tuple(sorted(e["rotations"].values()))) for e in vertex["elements"])
    assert flags == [(False, ("0", "0")), (True, ("1/2", "1/2"))]
