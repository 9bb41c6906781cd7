"""Weighted Euler-Maclaurin on simple integral polytopes: exact polynomial path."""

from __future__ import annotations

import itertools
import logging
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import linalg
from .arith import CyclotomicElement, MultiPolynomial, TruncatedSeries, is_rational, root_of_unity
from .emseries import chi_series, kernel, operator
from .functions import SmoothFunction, directional_expansion, multi_indices
from .groups import ConsistencyError, GroupElement, PolytopeGroups, cone_group
from .polytope import Cone, Face, Polarization, PolarizedVertex, Polytope, cone_weighted_sum
from .quadrature import DEFAULT_TOLERANCE, QuadratureResult, slab_integral
from .volume import VolumePolynomial, volume_polynomial

log = logging.getLogger(__name__)

ContributionKey = Tuple[Tuple[int, ...], Tuple[int, ...]]


class NonRationalResultError(ArithmeticError):
    """The operator sum did not reduce to a rational number."""


@dataclass(frozen=True)
class FaceOperator:
    """N^k_{q,gamma,F}: one operator polynomial per facet variable h_j."""

    face: Face
    element: GroupElement
    factors: Tuple[TruncatedSeries, ...]
    rotations: Tuple[Fraction, ...]

    def key(self) -> ContributionKey:
        return (self.face.facets, self.element.coordinates)


@dataclass
class EMNDResult:
    weighted_sum: object
    main_term: object
    remainder: object
    contributions: Dict[ContributionKey, object]
    q: Fraction
    k: int
    xi: Optional[Tuple[Fraction, ...]] = None
    ambient_order: int = 1
    details: dict = field(default_factory=dict)


def thread_count() -> int:
    try:
        return max(1, int(os.environ.get("WEM_THREADS", "1")))
    except ValueError:
        return 1


def face_operators(groups: PolytopeGroups, q, k: int) -> List[FaceOperator]:
    """All (F, gamma in Gamma_F^flat) operators in deterministic order."""
    P = groups.polytope
    ops = []
    for F, g in groups.flat_pairs():
        rots = tuple(groups.rotation(F, g, j) for j in range(P.facet_count))
        factors = tuple(operator(Fraction(q), r, k).coefficients for r in rots)
        ops.append(FaceOperator(F, g, factors, rots))
    return ops


def apply_to_polynomial(factors: Sequence[TruncatedSeries], V: MultiPolynomial):
    """prod_j factors_j(d/dh_j) applied to V, evaluated at h = 0."""
    total = Fraction(0)
    for e, c in V.items():
        term = c
        for j, ej in enumerate(e):
            if ej == 0:
                cj = factors[j][0]
            else:
                cj = factors[j][ej] * factorial(ej)
            if cj == 0:
                term = None
                break
            term = term * cj
        if term is not None:
            total = total + term
    return total


def _rationalize(x) -> Fraction:
    r = is_rational(x)
    if r is None:
        raise NonRationalResultError(f"operator sum {x!r} is not rational")
    return r


def main_term_polynomial(polytope: Polytope, p: MultiPolynomial, q, k: int,
                         polarization: Optional[Polarization] = None,
                         groups: Optional[PolytopeGroups] = None,
                         volume: Optional[VolumePolynomial] = None) -> Tuple[Fraction, Dict[ContributionKey, object]]:
    """sum_F sum_{gamma in Gamma_F^flat} N^k_{q,gamma,F} int_{Delta(h)} p |_{h=0}, exactly.

    The polynomial path does not depend on the polarization; it is accepted for
    reporting symmetry with the smooth path.
    """
    if k < 2:
        raise ValueError("k must be greater than 1")
    groups = groups or PolytopeGroups(polytope)
    volume = volume or volume_polynomial(polytope, p)
    ops = face_operators(groups, q, k)
    M = groups.ambient_order

    def contribution(op: FaceOperator):
        value = apply_to_polynomial(op.factors, volume.polynomial)
        if isinstance(value, CyclotomicElement) and M % value.order == 0:
            value = value.embed(M)
        return op.key(), value

    workers = thread_count()
    if workers > 1 and len(ops) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(contribution, ops))
    else:
        results = [contribution(op) for op in ops]
    contributions = dict(results)
    total = Fraction(0)
    for key in sorted(contributions):
        total = total + contributions[key]
    return _rationalize(total), contributions


def regular_main_term(polytope: Polytope, p: MultiPolynomial, q, volume: Optional[VolumePolynomial] = None) -> Fraction:
    """prod_{i=1}^d chi_q(d/dh_i) applied to the volume polynomial (regular polytopes)."""
    volume = volume or volume_polynomial(polytope, p)
    deg = max(volume.polynomial.degree(), 0)
    bound = deg + (deg % 2)
    chi = chi_series(q, bound)
    return _rationalize(apply_to_polynomial([chi] * polytope.facet_count, volume.polynomial))


def exact_k(p: MultiPolynomial, n: int) -> int:
    return max(p.degree(), 0) + n + 1


def exact_polynomial_sum(polytope: Polytope, p: MultiPolynomial, q,
                         groups: Optional[PolytopeGroups] = None,
                         volume: Optional[VolumePolynomial] = None) -> Fraction:
    """Weighted lattice sum of p from the operator formula with k = deg p + n + 1."""
    k = exact_k(p, polytope.dimension)
    value, _ = main_term_polynomial(polytope, p, q, k, groups=groups, volume=volume)
    return value


def polynomial_em(polytope: Polytope, p: MultiPolynomial, q, k: Optional[int] = None,
                  polarization: Optional[Polarization] = None) -> EMNDResult:
    """EMNDResult for a polynomial; remainder by difference against the oracle."""
    k = exact_k(p, polytope.dimension) if k is None else k
    groups = PolytopeGroups(polytope)
    main, contributions = main_term_polynomial(polytope, p, q, k, polarization, groups)
    oracle = polytope.weighted_lattice_sum(p, Fraction(q))
    return EMNDResult(oracle, main, oracle - main, contributions, Fraction(q), k,
                      polarization.xi if polarization else None, groups.ambient_order)


# =============================================================================
# Smooth compactly supported f: cone integrals and remainders by quadrature
# =============================================================================

def _to_complex(c) -> complex:
    if isinstance(c, CyclotomicElement):
        return c.to_complex()
    return complex(float(c))


def _sign(e: Sequence[int]) -> int:
    """prod over e_i >= 1 of (-1)^(e_i - 1): the sign of d^e/dh^e int_{t >= -h} g."""
    return -1 if sum(x - 1 for x in e if x >= 1) % 2 else 1


@dataclass(frozen=True)
class SmoothCone:
    """A simple cone with facet weights and the characters of its finite group.

    ``rotations[g][i]`` is <gamma_g, alpha_i> mod 1, so lambda = exp(2 pi i r).
    """

    cone: Cone
    qs: Tuple[Fraction, ...]
    rotations: Tuple[Tuple[Fraction, ...], ...]

    @property
    def order(self) -> int:
        return len(self.rotations)

    @property
    def dimension(self) -> int:
        return self.cone.dimension

    @classmethod
    def from_cone(cls, cone: Cone, qs: Sequence) -> "SmoothCone":
        group = cone_group(cone)
        rots = tuple(tuple(linalg.dot(g.lift, a) % 1 for a in cone.generators) for g in group.elements)
        if len(rots) != cone.index:
            raise ConsistencyError(f"|Gamma| = {len(rots)} but |det| = {cone.index}")
        return cls(cone, tuple(Fraction(q) for q in qs), rots)

    @classmethod
    def polarized(cls, polytope: Polytope, pv: PolarizedVertex, q) -> "SmoothCone":
        cone = polytope.polarized_cone(pv)
        w = pv.weights(Fraction(q))
        return cls.from_cone(cone, [w[i] for i in cone.labels])


class OrthantIntegrals:
    """Cached integrals over the standard orthant of pulled-back derivatives of f.

    ``integral(orders, fixed, twists)`` is
    int_{t_i >= 0, i not in fixed} prod_{i in twists} Q_{k, lambda_i}(t_i) d_t^orders g(t) dt
    with t_i = 0 for i in fixed and g = f(apex + sum t_i alpha_i).
    """

    def __init__(self, cone: Cone, f: SmoothFunction, tol: float = DEFAULT_TOLERANCE):
        self.cone = cone
        self.f = f
        self.tol = tol
        n = cone.dimension
        self.alphas = tuple(tuple(float(x) for x in a) for a in cone.generators)
        self.A = np.array(self.alphas, dtype=float).T
        self.apex = np.array([float(x) for x in cone.apex])
        box = f.support_box
        if box is None:
            raise ValueError("f must have compact support")
        self.box = box
        self.jacobian = abs(float(linalg.det([list(a) for a in cone.generators])))
        self._cache: Dict[tuple, QuadratureResult] = {}
        self.n = n

    def integral(self, orders: Tuple[int, ...], fixed: frozenset, twists: Tuple[Tuple[int, object], ...] = (),
                 k: int = 0) -> QuadratureResult:
        key = (orders, fixed, twists, k)
        if key not in self._cache:
            self._cache[key] = self._compute(orders, fixed, dict(twists), k)
        return self._cache[key]

    def _compute(self, orders, fixed, twists, k) -> QuadratureResult:
        n = self.n
        free = [i for i in range(n) if i not in fixed]
        terms = [(c, self.f.partial(beta)) for beta, c in directional_expansion(self.alphas, orders)]
        A, apex = self.A, self.apex

        def integrand(pts: np.ndarray) -> np.ndarray:
            t = np.zeros((pts.shape[0], n))
            t[:, free] = pts
            x = apex + t @ A.T
            out = np.zeros(pts.shape[0])
            for c, ev in terms:
                out = out + c * ev(x)
            return out

        # support box of f and t_i >= 0, as rows . t_free >= rhs
        lo, hi = self.box
        sub = A[:, free]
        rows = np.vstack([sub, -sub, np.eye(len(free))])
        rhs = np.concatenate([np.array(lo) - apex, apex - np.array(hi), np.zeros(len(free))])
        kernels = [kernel(k, twists[i]) if i in twists else None for i in free]
        return slab_integral(integrand, rows, rhs, kernels, self.tol)


def _operator_rows(cone: SmoothCone, k: int) -> List[List[List[complex]]]:
    """rows[g][i][e]: coefficient of S^e in N_{q_i}^{k, lambda_{g,i}} as a complex number."""
    rows = []
    for rot in cone.rotations:
        per = []
        for q, r in zip(cone.qs, rot):
            op = operator(q, r, k)
            per.append([_to_complex(op[e]) for e in range(k + 1)])
        rows.append(per)
    return rows


def _derivative_term(ints: OrthantIntegrals, e: Tuple[int, ...]) -> QuadratureResult:
    """d^e/dh^e int_{t >= -h} g dt at h = 0."""
    orders = tuple(x - 1 if x >= 1 else 0 for x in e)
    fixed = frozenset(i for i, x in enumerate(e) if x >= 1)
    return ints.integral(orders, fixed).scaled(_sign(e))


def cone_main_term(cone: SmoothCone, ints: OrthantIntegrals, k: int) -> Tuple[complex, float]:
    """(1/|Gamma|) sum_gamma prod_i N_i(d/dh_i) int_{O(h)} g at h = 0, with its error bound."""
    n = cone.dimension
    rows = _operator_rows(cone, k)
    total, err = 0j, 0.0
    for e in itertools.product(range(k + 1), repeat=n):
        coef = 0j
        for per in rows:
            c = 1 + 0j
            for i in range(n):
                c *= per[i][e[i]]
            coef += c
        if coef == 0:
            continue
        coef /= cone.order
        r = _derivative_term(ints, e)
        total += coef * r.value
        err += abs(coef) * r.error
    return total, err


def standard_remainder(qs: Sequence, rotations: Sequence, ints: OrthantIntegrals, k: int) -> Tuple[complex, float]:
    """R^st_{q,k}(lambda_1..lambda_n; g) as a sum of orthant integrals."""
    n = len(qs)
    per = [[_to_complex(c) for c in (operator(q, r, k)[e] for e in range(k + 1))] for q, r in zip(qs, rotations)]
    total, err = 0j, 0.0
    for size in range(n):
        for I in itertools.combinations(range(n), size):
            rest = [i for i in range(n) if i not in I]
            sign = -1 if ((k - 1) * len(rest)) % 2 else 1
            twists = tuple((i, rotations[i]) for i in rest)
            for eI in itertools.product(range(k + 1), repeat=len(I)):
                coef = complex(sign)
                for i, ei in zip(I, eI):
                    coef *= per[i][ei]
                if coef == 0:
                    continue
                e = dict(zip(I, eI))
                orders = tuple(k if i in rest else max(e[i] - 1, 0) for i in range(n))
                fixed = frozenset(i for i in I if e[i] >= 1)
                r = ints.integral(orders, fixed, twists, k)
                s = _sign([e.get(i, 0) for i in range(n)])
                total += coef * s * r.value
                err += abs(coef) * r.error
    return total, err


def cone_remainder(cone: SmoothCone, ints: OrthantIntegrals, k: int) -> Tuple[complex, float]:
    """R^C = (1/|Gamma|) sum_gamma R^st(lambda_gamma; L^* f)."""
    total, err = 0j, 0.0
    for rot in cone.rotations:
        v, e = standard_remainder(cone.qs, rot, ints, k)
        total += v
        err += e
    return total / cone.order, err / cone.order


def _real(z: complex, tol: float, what: str) -> float:
    if abs(z.imag) > max(tol, 1e-12) * 1e3:
        log.warning("%s has imaginary part %.3e", what, z.imag)
    return z.real


def cone_em(cone: Cone, qs: Sequence, f: SmoothFunction, k: int, tol: float = DEFAULT_TOLERANCE,
            remainder_integral: bool = True) -> EMNDResult:
    """Weighted Euler-Maclaurin on one simple integral cone for a compactly supported f."""
    if k < 2:
        raise ValueError("k must be greater than 1")
    n = cone.dimension
    if f.smoothness < n * k:
        raise ValueError(f"f must be of class C^{n * k}")
    sc = SmoothCone.from_cone(cone, qs)
    ints = OrthantIntegrals(cone, f, tol)
    total = cone_weighted_sum(cone, list(sc.qs), f)
    main, main_err = cone_main_term(sc, ints, k)
    main = _real(main, tol, "cone main term")
    details = {"main_term_error": main_err, "group_order": sc.order}
    if remainder_integral:
        rem, rem_err = cone_remainder(sc, ints, k)
        details["remainder_by_integral"] = _real(rem, tol, "cone remainder")
        details["remainder_error"] = rem_err
    return EMNDResult(float(total), main, float(total) - main, {}, Fraction(0), k, None, 1, details)


def frobenius_twisted_sum(cone: Cone, qs: Sequence, g: Callable, box: Sequence[Tuple[int, int]]):
    """(1/|Gamma|) sum_gamma sum_m w(m) prod_i lambda_{gamma,i}^{m_i} g(m), exactly.

    ``g`` takes the coordinates m (non-negative integers in ``box``) of the
    point apex + sum m_i alpha_i, which need not be integral.
    """
    sc = SmoothCone.from_cone(cone, qs)
    total = Fraction(0)
    for rot in sc.rotations:
        for m in itertools.product(*(range(a, b + 1) for a, b in box)):
            w = Fraction(1)
            for mi, q in zip(m, sc.qs):
                if mi == 0:
                    w *= q
            if w == 0:
                continue
            phase = root_of_unity(sum(mi * r for mi, r in zip(m, rot)) % 1)
            total = total + w * phase * g(m)
    value = total / sc.order
    r = is_rational(value)
    return r if r is not None else value


# -- polytope assembly --------------------------------------------------------------

@dataclass
class _VertexData:
    pv: PolarizedVertex
    cone: SmoothCone
    ints: OrthantIntegrals


def _vertex_data(polytope: Polytope, polarization: Polarization, f: SmoothFunction, q, tol) -> List[_VertexData]:
    out = []
    for pv in polarization.vertices:
        sc = SmoothCone.polarized(polytope, pv, q)
        out.append(_VertexData(pv, sc, OrthantIntegrals(sc.cone, f, tol)))
    return out


def _face_derivatives(polytope: Polytope, data: List[_VertexData], k: int, vertices=None):
    """E -> d^E/dh^E int_{Delta(h)} f at 0 for |supp E| within some I_v, via polarized cones.

    With ``vertices`` given, only those vertex cones are summed.
    """
    d = polytope.facet_count
    table: Dict[Tuple[int, ...], complex] = {}
    errors: Dict[Tuple[int, ...], float] = {}
    for vd in data:
        v = vd.pv.vertex
        if vertices is not None and v not in vertices:
            continue
        labels = vd.cone.cone.labels
        signs = vd.pv.dilation_signs()
        jac = vd.ints.jacobian
        for e in itertools.product(range(k + 1), repeat=len(labels)):
            r = _derivative_term(vd.ints, e)
            if r.value == 0:
                continue
            s = vd.pv.sign
            E = [0] * d
            for j, ej in zip(labels, e):
                E[j] = ej
                if ej % 2 and signs[j] < 0:
                    s = -s
            E = tuple(E)
            table[E] = table.get(E, 0) + s * jac * r.value
            errors[E] = errors.get(E, 0.0) + jac * r.error
    return table, errors


def _face_form(ops: List[FaceOperator], table, errors, restrict=None) -> Tuple[complex, float, Dict]:
    total, err = 0j, 0.0
    contributions = {}
    for op in ops:
        coeffs = [[_to_complex(c) for c in factor.coefficients] for factor in op.factors]
        value = 0j
        for E, val in table.items():
            c = 1 + 0j
            for j, ej in enumerate(E):
                c *= coeffs[j][ej] if ej < len(coeffs[j]) else 0
            if c == 0:
                continue
            value += c * val
            err += abs(c) * errors[E]
        contributions[op.key()] = value
        total += value
    return total, err, contributions


def smooth_em(polytope: Polytope, f: SmoothFunction, q, k: int, xi=None, tol: float = DEFAULT_TOLERANCE,
              remainder_integral: Optional[bool] = None, face_form: bool = True) -> EMNDResult:
    """Weighted Euler-Maclaurin with remainder for a smooth compactly supported f on a polytope.

    The main term is assembled from polarized vertex cones; with ``face_form``
    it is also computed from the (F, gamma) operators applied to derivatives of
    the integral over Delta(h). The remainder is authoritative by difference;
    the orthant-integral form is added when ``remainder_integral`` (default:
    n <= 2).
    """
    if k < 2:
        raise ValueError("k must be greater than 1")
    n = polytope.dimension
    if f.smoothness < n * k:
        raise ValueError(f"f must be of class C^{n * k}")
    if remainder_integral is None:
        remainder_integral = n <= 2
    q = Fraction(q)
    polarization = polytope.polarize(xi)
    groups = PolytopeGroups(polytope)
    data = _vertex_data(polytope, polarization, f, q, tol)

    total = float(polytope.weighted_lattice_sum(f, q))
    cone_main, cone_err = 0j, 0.0
    for vd in data:
        m, e = cone_main_term(vd.cone, vd.ints, k)
        cone_main += vd.pv.sign * m
        cone_err += e
    main = _real(cone_main, tol, "main term")
    details = {"main_term_error": cone_err, "quadrature_tolerance": tol,
               "polarization": polarization.to_json()}
    contributions: Dict[ContributionKey, object] = {}
    if face_form:
        table, errors = _face_derivatives(polytope, data, k)
        ops = face_operators(groups, q, k)
        face_main, face_err, contributions = _face_form(ops, table, errors)
        details["main_term_face_form"] = _real(face_main, tol, "face-form main term")
        details["main_term_face_form_error"] = face_err
    if remainder_integral:
        rem, rem_err = 0j, 0.0
        for vd in data:
            r, e = cone_remainder(vd.cone, vd.ints, k)
            rem += vd.pv.sign * r
            rem_err += e
        details["remainder_by_integral"] = _real(rem, tol, "remainder")
        details["remainder_error"] = rem_err
    return EMNDResult(total, main, total - main, contributions, q, k, polarization.xi,
                      groups.ambient_order, details)


def vertex_restricted_main_term(polytope: Polytope, f: SmoothFunction, q, k: int, xi=None,
                                tol: float = DEFAULT_TOLERANCE) -> Tuple[float, float]:
    """Face-form main term keeping, for each (F, gamma), only vertex cones with v in F.

    Returns (restricted, full). Terms with v outside F vanish, so the two agree.
    """
    q = Fraction(q)
    polarization = polytope.polarize(xi)
    groups = PolytopeGroups(polytope)
    data = _vertex_data(polytope, polarization, f, q, tol)
    ops = face_operators(groups, q, k)
    full_table, full_err = _face_derivatives(polytope, data, k)
    full, _, _ = _face_form(ops, full_table, full_err)
    restricted = 0j
    for op in ops:
        table, errors = _face_derivatives(polytope, data, k, set(op.face.vertices))
        value, _, _ = _face_form([op], table, errors)
        restricted += value
    return restricted.real, full.real


# -- remainder estimates --------------------------------------------------------------

def l1_norm(f: SmoothFunction, beta: Sequence[int], order: int = 64) -> Tuple[float, float]:
    """||d^beta f||_{L^1} by Gauss-Legendre on unit cells of the support box.

    Returns (value, estimate) where the estimate compares with half the order.
    """
    lo, hi = f.support_box
    ev = f.partial(beta)

    def rule(p: int) -> float:
        nodes, weights = np.polynomial.legendre.leggauss(p)
        axes, ws = [], []
        for a, b in zip(lo, hi):
            cuts = np.linspace(a, b, max(2, int(np.ceil(b - a)) * 2 + 1))
            xs = [(c1 - c0) / 2 * nodes + (c0 + c1) / 2 for c0, c1 in zip(cuts, cuts[1:])]
            wk = [(c1 - c0) / 2 * weights for c0, c1 in zip(cuts, cuts[1:])]
            axes.append(np.concatenate(xs))
            ws.append(np.concatenate(wk))
        grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, len(axes))
        w = ws[0]
        for extra in ws[1:]:
            w = np.multiply.outer(w, extra)
        return float(np.sum(w.reshape(-1) * np.abs(ev(grid))))

    value = rule(order)
    return value, abs(value - rule(order // 2))


@dataclass
class EstimateRow:
    label: str
    remainder: float
    sup_norm: float
    argmax: Tuple[int, ...]
    ratio: float


@dataclass
class EstimateReport:
    q: Fraction
    k: int
    rows: List[EstimateRow]

    @property
    def spread(self) -> float:
        ratios = [r.ratio for r in self.rows if r.sup_norm > 0]
        if not ratios or min(ratios) == 0:
            return float("inf")
        return max(ratios) / min(ratios)

    @property
    def bounded(self) -> bool:
        return all(np.isfinite(r.ratio) for r in self.rows)

    def to_json(self) -> dict:
        return {
            "q": str(self.q),
            "k": self.k,
            "rows": [{"label": r.label, "remainder": r.remainder, "supNorm": r.sup_norm,
                      "argmax": list(r.argmax), "ratio": r.ratio} for r in self.rows],
            "spread": self.spread,
        }


def remainder_estimate_report(polytope: Polytope, family: Sequence[Tuple[str, SmoothFunction]], q, k: int,
                              xi=None, tol: float = DEFAULT_TOLERANCE) -> EstimateReport:
    """|R^Delta_{q,k}(f)| against sup_{k <= |beta| <= nk} ||d^beta f||_{L^1} over a family."""
    n = polytope.dimension
    betas = [b for total in range(k, n * k + 1) for b in multi_indices(n, total)]
    rows = []
    for label, f in family:
        result = smooth_em(polytope, f, q, k, xi, tol, remainder_integral=False, face_form=False)
        norms = [(l1_norm(f, b)[0], b) for b in betas]
        sup, arg = max(norms)
        ratio = abs(result.remainder) / sup if sup > 0 else 0.0
        rows.append(EstimateRow(label, float(result.remainder), sup, tuple(arg), ratio))
    return EstimateReport(Fraction(q), k, rows)
