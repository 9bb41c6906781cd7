"""Quadrature on unit cells, where periodized kernels are polynomial.

One-dimensional integrals use scipy's adaptive ``quad`` cell by cell.
Integrals over convex regions use iterated Gauss-Legendre rules fitted to the
region and cut at the kernels' breakpoints; the order is doubled until two
successive rules agree to the requested tolerance.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import ceil, floor
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
from scipy import integrate

from .emseries import PeriodizedKernel

DEFAULT_TOLERANCE = 1e-9


@dataclass(frozen=True)
class QuadratureResult:
    value: complex
    error: float
    converged: bool
    detail: str = ""

    def __add__(self, other: "QuadratureResult") -> "QuadratureResult":
        return QuadratureResult(self.value + other.value, self.error + other.error,
                                self.converged and other.converged)

    def scaled(self, c) -> "QuadratureResult":
        return QuadratureResult(self.value * c, self.error * abs(c), self.converged, self.detail)


def exact(value) -> QuadratureResult:
    return QuadratureResult(value, 0.0, True, "point evaluation")


def unit_cells(lo: float, hi: float) -> List[Tuple[float, float]]:
    """Split [lo, hi] at the integers strictly inside it."""
    if hi <= lo:
        return []
    cuts = [lo] + [float(j) for j in range(floor(lo) + 1, ceil(hi))] + [hi]
    return [(a, b) for a, b in zip(cuts, cuts[1:]) if b > a]


def kernel_weight(kernel: Optional[PeriodizedKernel], x: np.ndarray, cell_start: float) -> np.ndarray:
    """Kernel values on points of the cell starting at ``cell_start``."""
    if kernel is None:
        return np.ones_like(x)
    j = floor(cell_start)
    coeffs = kernel.complex_pieces()[j % kernel.period]
    t = x - j
    out = np.zeros_like(x, dtype=complex)
    for c in reversed(coeffs):
        out = out * t + c
    if kernel.twist == 0:
        return out.real
    return out


def integrate_1d(func: Callable[[np.ndarray], np.ndarray], lo: float, hi: float,
                 kernel: Optional[PeriodizedKernel] = None,
                 tol: float = DEFAULT_TOLERANCE) -> QuadratureResult:
    """int_lo^hi kernel(x) func(x) dx with adaptive quadrature on each unit cell."""
    value = 0j
    error = 0.0
    ok = True
    cells = unit_cells(lo, hi)
    per_cell = tol / max(len(cells), 1) / 4
    for a, b in cells:
        def part(x, a=a, which=0):
            w = kernel_weight(kernel, np.asarray([x]), a)[0] * func(np.asarray([x]))[0]
            return w.real if which == 0 else w.imag

        re, re_err, *info = integrate.quad(part, a, b, epsabs=per_cell, epsrel=0, limit=200,
                                           full_output=1)
        ok = ok and len(info) < 2
        value += re
        error += re_err
        if kernel is not None and kernel.twist != 0:
            im, im_err, *info = integrate.quad(lambda x, a=a: part(x, a, 1), a, b, epsabs=per_cell,
                                               epsrel=0, limit=200, full_output=1)
            ok = ok and len(info) < 2
            value += 1j * im
            error += im_err
    ok = ok and error <= tol
    if kernel is None or kernel.twist == 0:
        value = value.real
    return QuadratureResult(value, error, ok, "scipy.quad per unit cell")


def _support_vertices(rows: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    """Vertices of {t : rows t >= rhs} by brute force over square subsystems."""
    m, dim = rows.shape
    out = []
    for idx in itertools.combinations(range(m), dim):
        sub = rows[list(idx)]
        if abs(np.linalg.det(sub)) < 1e-12:
            continue
        t = np.linalg.solve(sub, rhs[list(idx)])
        if np.all(rows @ t >= rhs - 1e-9):
            out.append(t)
    return np.array(out).reshape(-1, dim)


def slab_integral(func: Callable[[np.ndarray], np.ndarray],
                  rows: np.ndarray, rhs: np.ndarray,
                  kernels: Sequence[Optional[PeriodizedKernel]],
                  tol: float = DEFAULT_TOLERANCE,
                  start_order: int = 12, max_order: int = 384,
                  max_points: int = 3_000_000) -> QuadratureResult:
    """int over {t : rows t >= rhs} (bounded) of prod_i kernel_i(t_i) func(t) dt.

    Coordinates are integrated in order, outermost first. Each coordinate's
    range is cut at the integers (kernel breakpoints); the innermost range is
    the exact section of the region, and the outermost is also cut at the
    projections of the region's vertices, so the integrand is smooth on every
    piece.
    """
    dim = rows.shape[1]
    if dim == 0:
        ok = bool(np.all(rhs <= 0))
        return exact(func(np.zeros((1, 0)))[0] if ok else 0.0)
    verts = _support_vertices(rows, rhs)
    if len(verts) == 0:
        return exact(0.0)
    vlo, vhi = verts.min(axis=0), verts.max(axis=0)
    if np.any(vhi - vlo <= 1e-14):
        return exact(0.0)
    # the outer integrand has sharp features where the region's boundary
    # crosses integer values of inner coordinates; cut there too
    outer_cuts = {float(x) for x in verts[:, 0]}
    eye = np.eye(dim)
    for cell in itertools.product(*(range(floor(a), ceil(b)) for a, b in zip(vlo, vhi))):
        clip_rows = np.vstack([rows, eye, -eye])
        clip_rhs = np.concatenate([rhs, np.array(cell, float), -np.array(cell, float) - 1])
        outer_cuts.update(float(x) for x in _support_vertices(clip_rows, clip_rhs)[:, 0])

    def section(pts: np.ndarray, level: int) -> Tuple[np.ndarray, np.ndarray]:
        """Range of coordinate ``level`` given the earlier ones, per point."""
        lo = np.full(len(pts), vlo[level])
        hi = np.full(len(pts), vhi[level])
        later = rows[:, level + 1:]
        for r in range(rows.shape[0]):
            a = rows[r, level]
            if a == 0 or np.any(later[r] != 0):
                continue
            bound = (rhs[r] - pts @ rows[r, :level]) / a
            if a > 0:
                lo = np.maximum(lo, bound)
            else:
                hi = np.minimum(hi, bound)
        return lo, hi

    def rule(order: int):
        nodes, weights = np.polynomial.legendre.leggauss(order)
        pts = np.zeros((1, 0))
        w = np.ones(1, dtype=complex)
        for level in range(dim):
            lo, hi = section(pts, level)
            cuts = set(range(floor(vlo[level]) + 1, ceil(vhi[level])))
            if level == 0:
                cuts |= outer_cuts
            cuts = np.array(sorted(cuts), dtype=float)
            new_pts, new_w = [], []
            edges = [lo] + [np.clip(np.full(len(pts), c), lo, hi) for c in cuts] + [hi]
            for a, b in zip(edges, edges[1:]):
                width = b - a
                keep = width > 1e-15
                if not np.any(keep):
                    continue
                a, width = a[keep], width[keep]
                x = a[:, None] + width[:, None] * (nodes[None, :] + 1) / 2
                ww = w[keep][:, None] * width[:, None] / 2 * weights[None, :]
                if kernels[level] is not None:
                    cell = np.floor(a + width / 2)
                    for c in np.unique(cell):
                        sel = cell == c
                        ww[sel] = ww[sel] * kernel_weight(kernels[level], x[sel], c)
                base = np.repeat(pts[keep], order, axis=0)
                new_pts.append(np.column_stack([base, x.reshape(-1)]))
                new_w.append(ww.reshape(-1))
            if not new_pts:
                return 0.0, 0
            pts = np.concatenate(new_pts)
            w = np.concatenate(new_w)
        return np.sum(w * func(pts)), len(pts)

    order = start_order
    prev, count = rule(order)
    err = float("inf")
    while 2 * order <= max_order and count * 2**dim <= max_points:
        order *= 2
        cur, count = rule(order)
        err = float(abs(cur - prev))
        prev = cur
        if err <= tol:
            break
    return QuadratureResult(prev, err, err <= tol, f"iterated Gauss-Legendre order {order}")
