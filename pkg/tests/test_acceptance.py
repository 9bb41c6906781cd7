"""Acceptance criteria 1-9; each test records one PASS/FAIL line in the terminal summary."""

from __future__ import annotations

import itertools
import random
import time
from fractions import Fraction


from conftest import QS, SUITE
from wem.arith import MultiPolynomial
from wem.em1d import em_interval, em_interval_polynomial, em_twisted_ray
from wem.emnd import exact_polynomial_sum, main_term_polynomial, regular_main_term, remainder_estimate_report, smooth_em
from wem.emseries import chi_series, operator, operator_from_generating_function
from wem.functions import bump
from wem.groups import PolytopeGroups, cone_group, frobenius_indicator
from wem.linalg import det, dot
from wem.polytope import polar_decomposition_sum
from wem.volume import volume_polynomial


def monomials(n, max_degree):
    for total in range(max_degree + 1):
        for e in itertools.product(range(total + 1), repeat=n):
            if sum(e) == total:
                yield e


def rotations(max_order):
    return sorted({Fraction(a, N) for N in range(1, max_order + 1) for a in range(N)})


def test_criterion_1_exact_polynomial_identity(acceptance):
    started = time.perf_counter()
    checked, bad = 0, []
    for name, poly in SUITE.items():
        n = poly.dimension
        groups = PolytopeGroups(poly)
        for e in monomials(n, 3):
            p = MultiPolynomial.monomial(e)
            volume = volume_polynomial(poly, p)
            for q in QS:
                checked += 1
                if exact_polynomial_sum(poly, p, q, groups, volume) != poly.weighted_lattice_sum(p, q):
                    bad.append((name, e, q))
    elapsed = time.perf_counter() - started
    acceptance(1, not bad, f"{checked} cases, {len(bad)} mismatches, {elapsed:.1f}s")
    assert not bad


def test_criterion_2_regular_collapse(acceptance):
    bad = []
    for name in ("square", "box32"):
        poly = SUITE[name]
        for e in monomials(2, 3):
            p = MultiPolynomial.monomial(e)
            for q in QS:
                generic, _ = main_term_polynomial(poly, p, q, sum(e) + 3)
                if generic != regular_main_term(poly, p, q):
                    bad.append((name, e, q))
    one = MultiPolynomial.constant(2, 1)
    for q in [Fraction(0), Fraction(1, 3), Fraction(1, 2), Fraction(5, 4), Fraction(-2, 7)]:
        if regular_main_term(SUITE["square"], one, q) != 4 * q**2:
            bad.append(("4q^2", q))
    acceptance(2, not bad, f"{len(bad)} mismatches")
    assert not bad


def test_criterion_3_polar_decomposition(acceptance):
    bad, checked = [], 0
    rng = random.Random(3)
    for name, xis in [("square", [(1, 2), (3, -1), (-2, 5)]), ("T", [(1, 2), (1, -3), (3, 1)])]:
        poly = SUITE[name]
        f = {x: Fraction(rng.randint(-9, 9), rng.randint(1, 4)) for x in itertools.product(range(-3, 5), repeat=2)}
        for xi in xis:
            pol = poly.polarize(xi)
            for q in QS:
                checked += 1
                if polar_decomposition_sum(poly, pol, q, f) != poly.weighted_lattice_sum(f, q):
                    bad.append((name, xi, q))
    acceptance(3, not bad, f"{checked} exact comparisons, {len(bad)} mismatches")
    assert not bad


def test_criterion_4_one_dimensional(acceptance):
    bad = []
    for b in range(1, 6):
        for q in QS:
            for m in (2, 3, 4):
                if em_interval_polynomial([0, 1], 0, b, q, m) != Fraction(b * (b - 1), 2) + q * b:
                    bad.append(("linear", b, q, m))
    worst = 0.0
    family = [(bump([1.7], 2.4), 0, 4), (bump([0.2], 1.1), -1, 2), (bump([3.1], 3.0), 1, 5)]
    for f, a, b in family:
        for q in QS[:4]:
            for m in range(2, 7):
                r = em_interval(f, a, b, q, m)
                worst = max(worst, abs(r.remainder_by_difference - r.remainder_by_integral))
    ok = not bad and worst <= 1e-8
    acceptance(4, ok, f"linear cases exact: {not bad}; worst remainder gap {worst:.2e} (tol 1e-8)")
    assert ok


def test_criterion_5_twisted_ray(acceptance):
    worst = 0.0
    for r in (Fraction(1, 2), Fraction(1, 4), Fraction(1, 3)):
        for k in range(2, 6):
            for q in QS[:4]:
                rep = em_twisted_ray(bump([1.3], 2.0), r, q, k)
                worst = max(worst, abs(rep.weighted_sum - rep.main_term - rep.remainder_by_integral))
    bad = []
    for r in rotations(6):
        for q in QS:
            for k in range(2, 7):
                if operator(q, r, k).coefficients != operator_from_generating_function(q, r, k):
                    bad.append((r, q, k))
    ok = worst <= 1e-8 and not bad
    acceptance(5, ok, f"worst identity gap {worst:.2e} (tol 1e-8); operator mismatches {len(bad)}")
    assert ok


def test_criterion_6_groups(acceptance):
    problems = []
    for name, poly in SUITE.items():
        G = PolytopeGroups(poly)
        G.character_table  # raises on an inconsistent character
        for v in poly.vertices:
            Fv = G.vertex_face(v.index)
            if G.group(Fv).order != abs(det([poly.normals[i] for i in v.facets])):
                problems.append((name, "det", v.index))
            # Gamma_v is the disjoint union of the images of Gamma_F^flat, F containing v
            pieces = []
            for key, flat in G.flat_subsets.items():
                F = poly.faces[key]
                if v.index in F.vertices:
                    image = dict(zip((g.coordinates for g in G.group(F).elements), G.image(F, Fv)))
                    pieces.extend(image[g.coordinates] for g in flat)
            if sorted(pieces) != sorted(g.coordinates for g in G.group(Fv).elements):
                problems.append((name, "partition", v.index))
            cone = poly.tangent_cone(v.index)
            grp = cone_group(cone)
            for m in itertools.product(range(-2, 3), repeat=poly.dimension):
                x = [Fraction(c) + sum(mj * a[i] for mj, a in zip(m, cone.generators))
                     for i, c in enumerate(cone.apex)]
                if frobenius_indicator(grp, cone, x) != (1 if all(c.denominator == 1 for c in x) else 0):
                    problems.append((name, "frobenius", v.index, m))
        for key, grp in G.groups.items():
            F = poly.faces[key]
            for g in grp.elements:
                for j in key:
                    values = {dot(g.lift, poly.vertices[v].edge_vectors[j]) % 1 for v in F.vertices}
                    if values != {G.rotation(F, g, j)}:
                        problems.append((name, "same on face", key, j))
                for v in F.vertices:
                    for j in set(poly.vertices[v].facets) - set(key):
                        if dot(g.lift, poly.vertices[v].edge_vectors[j]) % 1 != 0:
                            problems.append((name, "trivial off face", key, j))
        for F, g in G.flat_pairs():
            if any(G.rotation(F, g, j) == 0 for j in F.facets):
                problems.append((name, "flat nontrivial", F.facets))
    acceptance(6, not problems, f"{len(problems)} violations across {len(SUITE)} polytopes")
    assert not problems


def test_criterion_7_symmetry(acceptance):
    bad = []
    for q in QS + [Fraction(-3, 7)]:
        for k in range(0, 7):
            if chi_series(q, 2 * k) != chi_series(1 - q, 2 * k).negate_variable():
                bad.append(("chi", q, k))
        for r in rotations(8):
            for k in range(2, 7):
                lhs = operator(1 - q, -r, k).coefficients
                rhs = operator(q, r, k).coefficients.negate_variable()
                if lhs != rhs:
                    bad.append(("N", q, r, k))
    acceptance(7, not bad, f"{len(bad)} coefficient mismatches")
    assert not bad


XIS_T = [(1, 2), (1, -3), (-2, 1), (3, 1)]


def test_criterion_8_polarization_invariance(acceptance):
    f = bump([0.5, 0.7], 1.2)
    worst = 0.0
    for k in (2, 3):
        runs = [smooth_em(SUITE["T"], f, Fraction(1, 3), k, xi=xi, face_form=False) for xi in XIS_T]
        for a, b in itertools.combinations(runs, 2):
            worst = max(worst, abs(a.main_term - b.main_term), abs(a.remainder - b.remainder),
                        abs(a.details["remainder_by_integral"] - b.details["remainder_by_integral"]))
    p = MultiPolynomial.monomial((2, 1)) + MultiPolynomial.monomial((0, 3), Fraction(1, 2))
    exact = {main_term_polynomial(SUITE["T"], p, Fraction(1, 3), 4, SUITE["T"].polarize(xi))[0] for xi in XIS_T}
    ok = worst <= 1e-9 and len(exact) == 1
    acceptance(8, ok, f"smooth worst gap {worst:.2e} (tol 1e-9); exact path distinct values {len(exact)}")
    assert ok


def test_criterion_9_estimate(acceptance):
    family = [(f"eps={e}", bump([0.5, 0.6], e)) for e in (0.8, 0.9, 1.0, 1.2, 1.4)]
    spreads = {}
    for k in (2, 3, 4):
        report = remainder_estimate_report(SUITE["T"], family, Fraction(1, 2), k)
        spreads[k] = report.spread if report.bounded else float("inf")
    ok = all(s < 10 for s in spreads.values())
    acceptance(9, ok, "spread of |R| / sup L1 norm: " + ", ".join(f"k={k}: {s:.2f}" for k, s in spreads.items()))
    assert ok
