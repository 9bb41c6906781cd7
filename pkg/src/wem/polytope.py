"""Simple integral polytopes given by half-spaces ``<u_i, x> + mu_i >= 0``.

Validation enumerates vertices from all n-subsets of facets (desk scale),
then checks primitivity, boundedness, irredundancy, simplicity and
integrality. The validated object exposes edge vectors, the face lattice,
polarizations, dilated vertices and the brute-force weighted lattice sum.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from math import ceil, floor, gcd
from typing import Dict, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple

from . import linalg
from .arith import MultiPolynomial
from .serialize import rational_str

log = logging.getLogger(__name__)

Point = Tuple[Fraction, ...]
IntPoint = Tuple[int, ...]


class PolytopeError(ValueError):
    """Invalid polytope input; ``kind`` names the failed check, ``witness`` the data."""

    def __init__(self, kind: str, message: str, witness=None):
        super().__init__(message)
        self.kind = kind
        self.witness = witness

    def to_json(self) -> dict:
        return {"error": self.kind, "message": str(self), "witness": _jsonable(self.witness)}


def _jsonable(x):
    if isinstance(x, Fraction):
        return rational_str(x)
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    return x


@dataclass(frozen=True)
class HalfSpaceDescription:
    normals: Tuple[Tuple[int, ...], ...]
    offsets: Tuple[int, ...]

    @property
    def dimension(self) -> int:
        return len(self.normals[0]) if self.normals else 0

    @classmethod
    def from_json(cls, obj: Mapping) -> "HalfSpaceDescription":
        n = int(obj["dimension"])
        normals, offsets = [], []
        for h in obj["halfspaces"]:
            u = tuple(int(x) for x in h["normal"])
            if len(u) != n:
                raise PolytopeError("dimension", f"normal {list(u)} does not have {n} entries", list(u))
            normals.append(u)
            offsets.append(int(h["offset"]))
        return cls(tuple(normals), tuple(offsets))

    def to_json(self) -> dict:
        return {
            "dimension": self.dimension,
            "halfspaces": [{"normal": list(u), "offset": mu} for u, mu in zip(self.normals, self.offsets)],
        }


@dataclass(frozen=True)
class Vertex:
    index: int
    location: Point
    facets: Tuple[int, ...]
    # facet index i -> alpha_{i,v}, the edge leaving facet i
    edges: Tuple[Tuple[int, Point], ...]

    @property
    def edge_vectors(self) -> Dict[int, Point]:
        return dict(self.edges)

    @property
    def integer_location(self) -> IntPoint:
        return tuple(int(x) for x in self.location)


@dataclass(frozen=True)
class Face:
    facets: Tuple[int, ...]
    vertices: Tuple[int, ...]
    ambient_dimension: int

    @property
    def codimension(self) -> int:
        return len(self.facets)

    @property
    def dimension(self) -> int:
        return self.ambient_dimension - len(self.facets)


@dataclass(frozen=True)
class PolarizedVertex:
    vertex: int
    flipped: Tuple[Tuple[int, bool], ...]
    edges: Tuple[Tuple[int, Point], ...]  # alpha^sharp_{i,v}
    normals: Tuple[Tuple[int, Tuple[int, ...]], ...]  # u^sharp_{i,v}

    @property
    def flip_count(self) -> int:
        return sum(1 for _, f in self.flipped if f)

    @property
    def sign(self) -> int:
        return -1 if self.flip_count % 2 else 1

    def is_flipped(self, i: int) -> bool:
        return dict(self.flipped)[i]

    def weights(self, q) -> Dict[int, Fraction]:
        """q^sharp_{i,v}: q on unflipped facets, 1 - q on flipped ones."""
        q = Fraction(q) if not isinstance(q, float) else q
        return {i: (1 - q if f else q) for i, f in self.flipped}

    def dilation_signs(self) -> Dict[int, int]:
        """h^sharp_{i,v} = sign * h_i."""
        return {i: (-1 if f else 1) for i, f in self.flipped}


@dataclass(frozen=True)
class Polarization:
    xi: Tuple[Fraction, ...]
    vertices: Tuple[PolarizedVertex, ...]

    @property
    def flip_counts(self) -> List[int]:
        return [pv.flip_count for pv in self.vertices]

    def to_json(self) -> dict:
        return {
            "xi": [rational_str(x) for x in self.xi],
            "vertices": [
                {
                    "vertex": pv.vertex,
                    "flip_count": pv.flip_count,
                    "flipped": {str(i): f for i, f in pv.flipped},
                    "polarized_edges": {str(i): [rational_str(x) for x in a] for i, a in pv.edges},
                }
                for pv in self.vertices
            ],
        }


@dataclass(frozen=True)
class Cone:
    """Simple cone ``apex + sum R_{>=0} generators``; facet j is ``<normals[j], x - apex> >= 0``.

    ``generators`` are the dual basis to ``normals``. ``labels`` name the facets
    (polytope facet indices for tangent cones).
    """

    apex: Point
    normals: Tuple[Tuple[Fraction, ...], ...]
    generators: Tuple[Point, ...]
    labels: Tuple[int, ...] = ()

    @property
    def dimension(self) -> int:
        return len(self.apex)

    @classmethod
    def from_normals(cls, apex, normals, labels=()) -> "Cone":
        normals = tuple(tuple(Fraction(x) for x in u) for u in normals)
        inv = linalg.inverse(normals)
        if inv is None:
            raise PolytopeError("degenerate-cone", "cone normals are linearly dependent", normals)
        gens = tuple(tuple(inv[r][c] for r in range(len(inv))) for c in range(len(inv)))
        return cls(tuple(Fraction(x) for x in apex), normals, gens, tuple(labels) or tuple(range(len(normals))))

    def slacks(self, x) -> List[Fraction]:
        d = [Fraction(a) - b for a, b in zip(x, self.apex)]
        return [linalg.dot(u, d) for u in self.normals]

    def weight(self, x, qs: Sequence) -> object:
        """Product of q_j over the facets containing x; 0 outside the cone."""
        w = 1
        for s, q in zip(self.slacks(x), qs):
            if s < 0:
                return 0
            if s == 0:
                w = w * q
        return w

    @property
    def index(self) -> int:
        """|det(normals)|, the order of the cone's finite group when normals are integral."""
        return abs(int(linalg.det(self.normals)))


class Polytope:
    """A validated simple integral polytope. Build with :func:`validate`."""

    def __init__(self, hrep: HalfSpaceDescription, vertices: List[Vertex]):
        self.hrep = hrep
        self.normals = hrep.normals
        self.offsets = hrep.offsets
        self.dimension = hrep.dimension
        self.facet_count = len(hrep.normals)
        self.vertices = tuple(vertices)

    def __repr__(self):
        return f"Polytope(n={self.dimension}, d={self.facet_count}, vertices={len(self.vertices)})"

    # -- basic geometry -----------------------------------------------------

    def slack(self, i: int, x) -> Fraction:
        return linalg.dot(self.normals[i], x) + self.offsets[i]

    def active_facets(self, x) -> Tuple[int, ...]:
        return tuple(i for i in range(self.facet_count) if self.slack(i, x) == 0)

    def contains(self, x) -> bool:
        return all(self.slack(i, x) >= 0 for i in range(self.facet_count))

    def codimension_at(self, x) -> int:
        """c(x): codimension of the smallest face containing x (simple polytope)."""
        return len(self.active_facets(x))

    @cached_property
    def bounding_box(self) -> Tuple[IntPoint, IntPoint]:
        lo = tuple(min(int(v.location[k]) for v in self.vertices) for k in range(self.dimension))
        hi = tuple(max(int(v.location[k]) for v in self.vertices) for k in range(self.dimension))
        return lo, hi

    def lattice_points(self) -> Iterator[IntPoint]:
        lo, hi = self.bounding_box
        for x in itertools.product(*(range(a, b + 1) for a, b in zip(lo, hi))):
            if self.contains(x):
                yield x

    def edge_vectors(self, v: int) -> Dict[int, Point]:
        return self.vertices[v].edge_vectors

    def vertex_group_order(self, v: int) -> int:
        rows = [self.normals[i] for i in self.vertices[v].facets]
        return abs(int(linalg.det(rows)))

    @cached_property
    def is_regular(self) -> bool:
        return all(self.vertex_group_order(v.index) == 1 for v in self.vertices)

    # -- faces ----------------------------------------------------------------

    @cached_property
    def faces(self) -> Dict[Tuple[int, ...], Face]:
        found: Dict[Tuple[int, ...], set] = {}
        for v in self.vertices:
            for r in range(len(v.facets) + 1):
                for sub in itertools.combinations(v.facets, r):
                    found.setdefault(sub, set()).add(v.index)
        return {
            key: Face(key, tuple(sorted(vs)), self.dimension)
            for key, vs in sorted(found.items(), key=lambda kv: (len(kv[0]), kv[0]))
        }

    def face_lattice(self) -> List[Face]:
        return list(self.faces.values())

    def face(self, facets: Iterable[int]) -> Face:
        return self.faces[tuple(sorted(facets))]

    def faces_containing(self, face: Face) -> List[Face]:
        """Faces E with E containing F strictly (I_E a proper subset of I_F)."""
        s = set(face.facets)
        return [E for key, E in self.faces.items() if set(key) < s]

    # -- polarization ---------------------------------------------------------

    def is_polarizing(self, xi) -> Optional[Tuple[int, int]]:
        """None if xi pairs nonzero with every edge vector, else a witness (v, i)."""
        for v in self.vertices:
            for i, a in v.edges:
                if linalg.dot(xi, a) == 0:
                    return (v.index, i)
        return None

    def default_polarizing_vector(self) -> Tuple[Fraction, ...]:
        t = 2
        while True:
            xi = tuple(Fraction(t) ** k for k in range(self.dimension))
            if self.is_polarizing(xi) is None:
                log.info("polarizing vector %s (moment curve t=%d)", [str(x) for x in xi], t)
                return xi
            t += 1

    def polarize(self, xi: Optional[Sequence] = None) -> Polarization:
        if xi is None:
            xi = self.default_polarizing_vector()
        else:
            xi = tuple(Fraction(x) for x in xi)
            if len(xi) != self.dimension:
                raise PolytopeError("polarization", f"xi must have {self.dimension} entries", list(xi))
            bad = self.is_polarizing(xi)
            if bad is not None:
                raise PolytopeError(
                    "polarization",
                    f"xi is not polarizing: <xi, alpha> = 0 at vertex {bad[0]}, facet {bad[1]}",
                    {"vertex": bad[0], "facet": bad[1]},
                )
        pvs = []
        for v in self.vertices:
            flips, edges, normals = [], [], []
            for i, a in v.edges:
                f = linalg.dot(xi, a) > 0
                flips.append((i, f))
                edges.append((i, tuple(-x for x in a) if f else a))
                normals.append((i, tuple(-x for x in self.normals[i]) if f else self.normals[i]))
            pvs.append(PolarizedVertex(v.index, tuple(flips), tuple(edges), tuple(normals)))
        return Polarization(tuple(xi), tuple(pvs))

    def tangent_cone(self, v: int) -> Cone:
        vert = self.vertices[v]
        return Cone.from_normals(vert.location, [self.normals[i] for i in vert.facets], vert.facets)

    def polarized_cone(self, pv: PolarizedVertex) -> Cone:
        vert = self.vertices[pv.vertex]
        normals = dict(pv.normals)
        return Cone.from_normals(vert.location, [normals[i] for i in vert.facets], vert.facets)

    # -- dilation -------------------------------------------------------------

    def dilated_vertex(self, v: int) -> List[MultiPolynomial]:
        """v(h) = v - sum_{i in I_v} h_i alpha_{i,v} as affine polynomials in h_1..h_d."""
        vert = self.vertices[v]
        d = self.facet_count
        coords = []
        for k in range(self.dimension):
            lin = [Fraction(0)] * d
            for i, a in vert.edges:
                lin[i] = -a[k]
            coords.append(MultiPolynomial.linear(lin, vert.location[k]))
        return coords

    # -- the brute-force oracle ----------------------------------------------

    def weighted_lattice_sum(self, f, q):
        """sum over Delta cap Z^n of q^{c(x)} f(x).

        ``f`` may be a MultiPolynomial (exact), a mapping from lattice points to
        values (lattice-sampled, exact) or a callable on integer tuples.
        """
        q = q if isinstance(q, float) else Fraction(q)
        total = Fraction(0)
        if isinstance(f, Mapping):
            points: Iterable = (x for x in f if self.contains(x))
            value = lambda x: f[x]  # noqa: E731
        else:
            points = self.lattice_points()
            value = f
        for x in points:
            c = self.codimension_at(x)
            fx = value(x)
            total = total + (q**c) * fx
        return total

    def to_json(self) -> dict:
        return {
            **self.hrep.to_json(),
            "vertices": [
                {
                    "location": [rational_str(c) for c in v.location],
                    "facets": list(v.facets),
                    "edge_vectors": {str(i): [rational_str(c) for c in a] for i, a in v.edges},
                }
                for v in self.vertices
            ],
        }


def cone_weighted_sum(cone: Cone, qs: Sequence, f):
    """sum over C cap Z^n of w(x) f(x), with w(x) the product of q_j over active facets.

    ``f`` is a lattice-sampled mapping or an object with a ``support_box``
    attribute ``(lo, hi)`` and a call on integer tuples.
    """
    total = Fraction(0)
    if isinstance(f, Mapping):
        for x, fx in f.items():
            w = cone.weight(x, qs)
            if w != 0:
                total = total + w * fx
        return total
    box = getattr(f, "support_box", None)
    if box is None:
        raise PolytopeError("unbounded-support", "cone sums need a compactly supported function")
    lo, hi = box
    ranges = [range(ceil(a), floor(b) + 1) for a, b in zip(lo, hi)]
    for x in itertools.product(*ranges):
        w = cone.weight(x, qs)
        if w != 0:
            total = total + w * f(x)
    return total


def polar_decomposition_sum(polytope: Polytope, polarization: Polarization, q, f):
    """sum_v (-1)^{#v} sum over the polarized cone at v with weights q^sharp."""
    total = Fraction(0)
    for pv in polarization.vertices:
        cone = polytope.polarized_cone(pv)
        weights = pv.weights(q)
        qs = [weights[i] for i in cone.labels]
        total = total + pv.sign * cone_weighted_sum(cone, qs, f)
    return total


# -- validation -------------------------------------------------------------

def _affine_rank(points: Sequence[Point]) -> int:
    if not points:
        return -1
    base = points[0]
    return linalg.rank([[a - b for a, b in zip(p, base)] for p in points[1:]]) if len(points) > 1 else 0


def _check_bounded(normals: Sequence[Sequence[int]], n: int) -> Optional[List[Fraction]]:
    """A nonzero recession direction y with U y >= 0, or None if bounded."""
    if linalg.rank(normals) < n:
        return linalg.null_space(normals, n)[0]
    for sub in itertools.combinations(range(len(normals)), n - 1):
        rows = [normals[i] for i in sub]
        if rows and linalg.rank(rows) != n - 1:
            continue
        ns = linalg.null_space(rows, n)
        if len(ns) != 1:
            continue
        y = ns[0]
        for s in (1, -1):
            ys = [s * c for c in y]
            if all(linalg.dot(u, ys) >= 0 for u in normals):
                return ys
    return None


def validate(hrep: HalfSpaceDescription) -> Polytope:
    n = hrep.dimension
    d = len(hrep.normals)
    if n == 0:
        raise PolytopeError("dimension", "dimension must be at least 1")
    if d < n + 1:
        raise PolytopeError("too-few-halfspaces", f"need at least {n + 1} half-spaces, got {d}", d)
    for i, u in enumerate(hrep.normals):
        if len(u) != n:
            raise PolytopeError("dimension", f"normal {i} has wrong length", i)
        g = 0
        for c in u:
            g = gcd(g, c)
        if g != 1:
            raise PolytopeError("non-primitive", f"normal {i} = {list(u)} is not primitive (gcd {g})",
                                {"facet": i, "normal": list(u), "gcd": g})
    for i, j in itertools.combinations(range(d), 2):
        if hrep.normals[i] == hrep.normals[j] and hrep.offsets[i] == hrep.offsets[j]:
            raise PolytopeError("redundant", f"half-space {j} duplicates half-space {i}", {"facet": j})

    ray = _check_bounded(hrep.normals, n)
    if ray is not None:
        raise PolytopeError("unbounded", "the half-spaces do not bound a compact set",
                            {"direction": [rational_str(c) for c in ray]})

    # vertex enumeration over all n-subsets
    located: Dict[Point, set] = {}
    for sub in itertools.combinations(range(d), n):
        a = [hrep.normals[i] for i in sub]
        b = [-hrep.offsets[i] for i in sub]
        x = linalg.solve(a, b)
        if x is None:
            continue
        x = tuple(x)
        if all(linalg.dot(u, x) + mu >= 0 for u, mu in zip(hrep.normals, hrep.offsets)):
            located.setdefault(x, set()).update(sub)
    if not located:
        raise PolytopeError("empty", "the half-spaces have empty intersection")
    points = sorted(located)
    if _affine_rank(points) < n:
        raise PolytopeError("not-full-dimensional", "the polytope is not full-dimensional",
                            {"vertices": [[rational_str(c) for c in p] for p in points]})

    for i in range(d):
        on_facet = [p for p in points if linalg.dot(hrep.normals[i], p) + hrep.offsets[i] == 0]
        if _affine_rank(on_facet) != n - 1:
            raise PolytopeError("redundant", f"half-space {i} is redundant (does not support a facet)",
                                {"facet": i})

    vertices: List[Vertex] = []
    for idx, p in enumerate(points):
        active = tuple(sorted(i for i in range(d) if linalg.dot(hrep.normals[i], p) + hrep.offsets[i] == 0))
        if len(active) != n:
            raise PolytopeError("non-simple", f"vertex {[str(c) for c in p]} lies on {len(active)} facets",
                                {"vertex": [rational_str(c) for c in p], "facets": list(active)})
        if any(c.denominator != 1 for c in p):
            raise PolytopeError("non-integral", f"vertex {[str(c) for c in p]} is not a lattice point",
                                {"vertex": [rational_str(c) for c in p]})
        inv = linalg.inverse([hrep.normals[i] for i in active])
        edges = tuple((i, tuple(inv[r][col] for r in range(n))) for col, i in enumerate(active))
        vertices.append(Vertex(idx, p, active, edges))
    return Polytope(hrep, vertices)


def from_json(obj: Mapping) -> Polytope:
    return validate(HalfSpaceDescription.from_json(obj))


def box(lo: Sequence[int], hi: Sequence[int]) -> Polytope:
    """Axis-parallel box, facets ordered x_k >= lo_k then x_k <= hi_k."""
    n = len(lo)
    normals, offsets = [], []
    for k in range(n):
        normals.append(tuple(int(j == k) for j in range(n)))
        offsets.append(-lo[k])
    for k in range(n):
        normals.append(tuple(-int(j == k) for j in range(n)))
        offsets.append(hi[k])
    return validate(HalfSpaceDescription(tuple(normals), tuple(offsets)))


def simplex_like(weights: Sequence[int], bound: int) -> Polytope:
    """{x >= 0, sum weights_k x_k <= bound}."""
    n = len(weights)
    normals = [tuple(int(j == k) for j in range(n)) for k in range(n)]
    offsets = [0] * n
    normals.append(tuple(-w for w in weights))
    offsets.append(bound)
    return validate(HalfSpaceDescription(tuple(normals), tuple(offsets)))
