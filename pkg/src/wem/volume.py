"""Exact integrals of polynomials over the dilated polytope Delta(h), as polynomials in h."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import List, Sequence, Tuple

from .arith import MultiPolynomial, determinant, integrate_standard_simplex
from .polytope import Polytope

Simplex = Tuple[int, ...]


class TriangulationError(RuntimeError):
    pass


def pulling_triangulation(polytope: Polytope, pick=min) -> List[Simplex]:
    """Triangulate by recursively pulling the lowest-indexed vertex of each face.

    ``pick`` chooses the pulled vertex of a face from its vertex indices; the
    default is the pulling rule, other choices give independent triangulations
    for cross-checks.
    """
    faces = polytope.faces
    d = polytope.facet_count

    @lru_cache(maxsize=None)
    def pull(key: Tuple[int, ...]) -> Tuple[Simplex, ...]:
        F = faces[key]
        if F.dimension == 0:
            return ((F.vertices[0],),)
        w = pick(F.vertices)
        out = []
        for i in range(d):
            if i in key:
                continue
            sub = tuple(sorted(key + (i,)))
            G = faces.get(sub)
            if G is None or w in G.vertices:
                continue
            out.extend((w,) + s for s in pull(sub))
        return tuple(out)

    return list(pull(()))


@dataclass(frozen=True)
class VolumePolynomial:
    """h -> integral of p over Delta(h), valid for small h."""

    polynomial: MultiPolynomial
    simplices: Tuple[Simplex, ...]

    def at_zero(self) -> Fraction:
        return self.polynomial.coefficient((0,) * self.polynomial.nvars)


def simplex_integral(vertices: Sequence[Sequence[MultiPolynomial]], p: MultiPolynomial, nparams: int,
                     sign: int | None = None) -> MultiPolynomial:
    """Integral of p over the simplex with affine-in-h vertices, as a polynomial in h.

    ``vertices`` holds n+1 points whose coordinates are polynomials in ``nparams``
    variables. The orientation sign is taken from the Jacobian at h = 0 unless given.
    """
    n = len(vertices) - 1
    w0 = vertices[0]
    edges = [[vertices[j][k] - w0[k] for k in range(n)] for j in range(1, n + 1)]
    jac = determinant(edges)
    jac0 = jac.coefficient((0,) * nparams)
    if jac0 == 0:
        raise TriangulationError("degenerate simplex at h = 0")
    if sign is None:
        sign = 1 if jac0 > 0 else -1
    total_vars = n + nparams
    # variables: t_1..t_n first, then h_1..h_d
    shift = list(range(n, total_vars))
    images = []
    for k in range(n):
        x = w0[k].embed(total_vars, shift)
        for j in range(n):
            x = x + MultiPolynomial.variable(total_vars, j) * edges[j][k].embed(total_vars, shift)
        images.append(x)
    integrand = p.substitute(images)
    result = MultiPolynomial(nparams)
    for t_exp, coeff in integrand.collect(n).items():
        result = result + coeff * integrate_standard_simplex(t_exp)
    return result * jac * sign


def volume_polynomial(polytope: Polytope, p: MultiPolynomial, pick=min) -> VolumePolynomial:
    if p.nvars != polytope.dimension:
        raise ValueError("polynomial and polytope dimensions differ")
    d = polytope.facet_count
    simplices = pulling_triangulation(polytope, pick)
    moved = {v.index: polytope.dilated_vertex(v.index) for v in polytope.vertices}
    total = MultiPolynomial(d)
    for s in simplices:
        total = total + simplex_integral([moved[v] for v in s], p, d)
    return VolumePolynomial(total, tuple(simplices))


def integral_at_zero(polytope: Polytope, p: MultiPolynomial, pick=min) -> Fraction:
    """Exact integral of p over Delta from an undilated triangulation."""
    total = Fraction(0)
    for s in pulling_triangulation(polytope, pick):
        pts = [[MultiPolynomial.constant(1, c) for c in polytope.vertices[v].location] for v in s]
        total += simplex_integral(pts, p, 1).coefficient((0,))
    return total
