"""Finite abelian groups Gamma_F = (N_F cap Z^n*) / sum_{i in I_F} Z u_i and their characters."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from math import lcm, prod
from typing import Dict, List, Sequence, Tuple

from . import linalg
from .arith import is_rational, root_of_unity
from .polytope import Cone, Face, Polytope
from .serialize import rational_str


class ConsistencyError(AssertionError):
    """A character identity that must hold for every simple integral polytope failed."""


Coordinates = Tuple[int, ...]


@dataclass(frozen=True)
class LatticeQuotient:
    """Z^r / diag(d) realized inside the saturation of a span of integer covectors.

    ``basis`` rows form a Z-basis of ``span(rows) cap Z^n``; ``factors`` are the
    Smith invariants, so the group is the product of Z/d over ``factors``.
    """

    basis: Tuple[Tuple[int, ...], ...]
    factors: Tuple[int, ...]
    # columns of Q from the Smith form; y = gamma Q recovers basis coordinates
    coordinate_map: Tuple[Tuple[int, ...], ...]

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], n: int) -> "LatticeQuotient":
        if not rows:
            return cls((), (), tuple(tuple(int(i == j) for j in range(n)) for i in range(n)))
        P, D, Q = linalg.smith_normal_form(rows)
        r = len(rows)
        factors = tuple(D[i][i] for i in range(r))
        if any(f == 0 for f in factors):
            raise ValueError("rows are linearly dependent")
        Qinv = linalg.unimodular_inverse(Q)
        basis = tuple(tuple(Qinv[i]) for i in range(r))
        return cls(basis, factors, tuple(tuple(row) for row in Q))

    @property
    def order(self) -> int:
        return prod(self.factors)

    @property
    def invariant_factors(self) -> Tuple[int, ...]:
        return tuple(f for f in self.factors if f > 1)

    def coordinates(self, covector: Sequence[int]) -> Coordinates:
        """Canonical class of an integer covector lying in the saturated span."""
        y = [sum(covector[k] * self.coordinate_map[k][j] for k in range(len(covector)))
             for j in range(len(self.coordinate_map))]
        r = len(self.factors)
        if any(y[r:]):
            raise ValueError(f"covector {list(covector)} is not in the span")
        return tuple(y[i] % f for i, f in enumerate(self.factors) if f > 1)

    def elements(self) -> List[Coordinates]:
        return [tuple(c) for c in itertools.product(*(range(f) for f in self.invariant_factors))]

    def lift(self, coords: Coordinates) -> Tuple[int, ...]:
        n = len(self.coordinate_map)
        out = [0] * n
        nontrivial = [i for i, f in enumerate(self.factors) if f > 1]
        for c, i in zip(coords, nontrivial):
            for k in range(n):
                out[k] += c * self.basis[i][k]
        return tuple(out)


@dataclass(frozen=True)
class GroupElement:
    coordinates: Coordinates
    lift: Tuple[int, ...]

    @property
    def is_identity(self) -> bool:
        return not any(self.coordinates)


@dataclass(frozen=True)
class FaceGroup:
    face: Face
    quotient: LatticeQuotient
    elements: Tuple[GroupElement, ...]

    @property
    def invariant_factors(self) -> Tuple[int, ...]:
        return self.quotient.invariant_factors

    @property
    def order(self) -> int:
        return self.quotient.order

    def element(self, coords: Coordinates) -> GroupElement:
        return next(e for e in self.elements if e.coordinates == coords)

    def classify(self, covector) -> Coordinates:
        return self.quotient.coordinates(covector)


def face_group(polytope: Polytope, face: Face) -> FaceGroup:
    rows = [polytope.normals[i] for i in face.facets]
    quotient = LatticeQuotient.from_rows(rows, polytope.dimension)
    elements = tuple(GroupElement(c, quotient.lift(c)) for c in quotient.elements())
    return FaceGroup(face, quotient, elements)


def cone_group(cone: Cone) -> FaceGroup:
    """Gamma of a simple integral cone (integral normals), all facets active."""
    rows = [tuple(int(x) for x in u) for u in cone.normals]
    quotient = LatticeQuotient.from_rows(rows, cone.dimension)
    face = Face(tuple(range(len(rows))), (), cone.dimension)
    elements = tuple(GroupElement(c, quotient.lift(c)) for c in quotient.elements())
    return FaceGroup(face, quotient, elements)


def frobenius_indicator(group: FaceGroup, cone: Cone, x) -> Fraction:
    """(1/|Gamma|) sum_gamma exp(2 pi i <gamma, x>): 1 on Z^n, 0 elsewhere on the alpha-lattice."""
    x = tuple(Fraction(c) for c in x)
    for s in cone.slacks(x):
        if s.denominator != 1:
            raise ValueError(f"point {[str(c) for c in x]} is not in the lattice of the cone")
    total = Fraction(0)
    for g in group.elements:
        total = total + root_of_unity(linalg.dot(g.lift, x))
    value = is_rational(total / group.order)
    if value is None:
        raise ConsistencyError("character average is not rational")
    return value


class PolytopeGroups:
    """All face groups, character tables and flat subsets of a polytope."""

    def __init__(self, polytope: Polytope):
        self.polytope = polytope
        self.groups: Dict[Tuple[int, ...], FaceGroup] = {
            key: face_group(polytope, F) for key, F in polytope.faces.items()
        }

    def group(self, face: Face) -> FaceGroup:
        return self.groups[face.facets]

    # -- characters -----------------------------------------------------------

    def rotation(self, face: Face, element: GroupElement, j: int) -> Fraction:
        """r_{gamma,j,F} in [0, 1), so lambda_{gamma,j,F} = exp(2 pi i r); 0 for j not in I_F."""
        return self.character_table[face.facets][element.coordinates][j]

    @cached_property
    def character_table(self) -> Dict[Tuple[int, ...], Dict[Coordinates, Tuple[Fraction, ...]]]:
        P = self.polytope
        table: Dict[Tuple[int, ...], Dict[Coordinates, Tuple[Fraction, ...]]] = {}
        for key, G in self.groups.items():
            F = P.faces[key]
            rows: Dict[Coordinates, Tuple[Fraction, ...]] = {}
            for g in G.elements:
                rot = [Fraction(0)] * P.facet_count
                for j in F.facets:
                    values = {linalg.dot(g.lift, P.vertices[v].edge_vectors[j]) % 1 for v in F.vertices}
                    if len(values) != 1:
                        raise ConsistencyError(
                            f"character of {g.coordinates} on facet {j} differs across vertices of face {key}")
                    rot[j] = values.pop()
                for v in F.vertices:
                    for j in P.vertices[v].facets:
                        if j in F.facets:
                            continue
                        if linalg.dot(g.lift, P.vertices[v].edge_vectors[j]) % 1 != 0:
                            raise ConsistencyError(
                                f"character of {g.coordinates} on facet {j} at vertex {v} is not 1")
                rows[g.coordinates] = tuple(rot)
            table[key] = rows
        return table

    @cached_property
    def ambient_order(self) -> int:
        """lcm of all character orders: the single cyclotomic ring used for the polytope."""
        m = 1
        for rows in self.character_table.values():
            for rot in rows.values():
                for r in rot:
                    m = lcm(m, r.denominator)
        return m

    # -- flat subsets -----------------------------------------------------------

    def image(self, small: Face, big: Face) -> List[Coordinates]:
        """Image of Gamma_E in Gamma_F for E containing F (I_E subset of I_F)."""
        GE = self.groups[small.facets]
        GF = self.groups[big.facets]
        return [GF.classify(g.lift) for g in GE.elements]

    @cached_property
    def flat_subsets(self) -> Dict[Tuple[int, ...], Tuple[GroupElement, ...]]:
        P = self.polytope
        out = {}
        for key, G in self.groups.items():
            F = P.faces[key]
            covered = set()
            for E in P.faces_containing(F):
                covered.update(self.image(E, F))
            out[key] = tuple(g for g in G.elements if g.coordinates not in covered)
        return out

    def flat_subset(self, face: Face) -> Tuple[GroupElement, ...]:
        return self.flat_subsets[face.facets]

    def flat_pairs(self) -> List[Tuple[Face, GroupElement]]:
        """All (F, gamma in Gamma_F^flat), sorted by facet set then coordinates."""
        out = []
        for key in sorted(self.groups, key=lambda k: (len(k), k)):
            for g in sorted(self.flat_subsets[key], key=lambda e: e.coordinates):
                out.append((self.polytope.faces[key], g))
        return out

    def vertex_face(self, v: int) -> Face:
        return self.polytope.faces[self.polytope.vertices[v].facets]

    def to_json(self) -> dict:
        P = self.polytope
        faces = []
        for key, G in sorted(self.groups.items(), key=lambda kv: (len(kv[0]), kv[0])):
            flat = {g.coordinates for g in self.flat_subsets[key]}
            faces.append({
                "facets": list(key),
                "invariant_factors": list(G.invariant_factors),
                "order": G.order,
                "elements": [
                    {
                        "coordinates": list(g.coordinates),
                        "lift": list(g.lift),
                        "flat": g.coordinates in flat,
                        "rotations": {str(j): rational_str(self.character_table[key][g.coordinates][j])
                                      for j in key},
                    }
                    for g in G.elements
                ],
            })
        return {"ambient_order": self.ambient_order, "vertex_count": len(P.vertices), "faces": faces}
