"""Exact linear algebra over Q and Z on small dense matrices (lists of lists)."""

from __future__ import annotations

from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

Matrix = List[List]


def to_fractions(rows) -> Matrix:
    return [[Fraction(x) for x in r] for r in rows]


def identity(n: int, one=1) -> Matrix:
    return [[one if i == j else 0 * one for j in range(n)] for i in range(n)]


def matmul(a: Sequence[Sequence], b: Sequence[Sequence]) -> Matrix:
    return [[sum(a[i][k] * b[k][j] for k in range(len(b))) for j in range(len(b[0]))] for i in range(len(a))]


def matvec(a: Sequence[Sequence], x: Sequence) -> list:
    return [sum(r[k] * x[k] for k in range(len(x))) for r in a]


def dot(u: Sequence, v: Sequence):
    return sum(a * b for a, b in zip(u, v))


def transpose(a: Sequence[Sequence]) -> Matrix:
    return [list(col) for col in zip(*a)]


def rref(rows) -> Tuple[Matrix, List[int]]:
    """Reduced row echelon form over Q and the pivot columns."""
    m = to_fractions(rows)
    pivots: List[int] = []
    r = 0
    ncols = len(m[0]) if m else 0
    for c in range(ncols):
        pivot = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if pivot is None:
            continue
        m[r], m[pivot] = m[pivot], m[r]
        inv = 1 / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m, pivots


def rank(rows) -> int:
    if not rows:
        return 0
    return len(rref(rows)[1])


def solve(a, b) -> Optional[list]:
    """Unique solution of the square system ``a x = b``, or None if singular."""
    n = len(a)
    aug = [list(r) + [bi] for r, bi in zip(a, b)]
    m, pivots = rref(aug)
    if pivots != list(range(n)):
        return None
    return [m[i][n] for i in range(n)]


def inverse(a) -> Optional[Matrix]:
    n = len(a)
    aug = [list(r) + [1 if i == j else 0 for j in range(n)] for i, r in enumerate(a)]
    m, pivots = rref(aug)
    if pivots[:n] != list(range(n)):
        return None
    return [row[n:] for row in m]


def det(a) -> Fraction:
    m = to_fractions(a)
    n = len(m)
    sign = 1
    result = Fraction(1)
    for c in range(n):
        pivot = next((i for i in range(c, n) if m[i][c] != 0), None)
        if pivot is None:
            return Fraction(0)
        if pivot != c:
            m[c], m[pivot] = m[pivot], m[c]
            sign = -sign
        result *= m[c][c]
        for i in range(c + 1, n):
            f = m[i][c] / m[c][c]
            if f:
                m[i] = [x - f * y for x, y in zip(m[i], m[c])]
    return sign * result


def null_space(rows, ncols: int) -> Matrix:
    """Basis of {x : rows x = 0} over Q."""
    if not rows:
        return [[Fraction(int(i == j)) for j in range(ncols)] for i in range(ncols)]
    m, pivots = rref(rows)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for r, p in enumerate(pivots):
            v[p] = -m[r][f]
        basis.append(v)
    return basis


# -- integer lattices ---------------------------------------------------------

def smith_normal_form(a: Sequence[Sequence[int]]) -> Tuple[Matrix, Matrix, Matrix]:
    """Return (P, D, Q) with ``P a Q = D`` diagonal, P and Q unimodular.

    Diagonal entries are non-negative and each divides the next.
    """
    D = [list(map(int, r)) for r in a]
    m, n = len(D), len(D[0])
    P = identity(m)
    Q = identity(n)

    def swap_rows(i, j):
        D[i], D[j] = D[j], D[i]
        P[i], P[j] = P[j], P[i]

    def swap_cols(i, j):
        for r in D:
            r[i], r[j] = r[j], r[i]
        for r in Q:
            r[i], r[j] = r[j], r[i]

    def add_row(src, dst, f):
        D[dst] = [x + f * y for x, y in zip(D[dst], D[src])]
        P[dst] = [x + f * y for x, y in zip(P[dst], P[src])]

    def add_col(src, dst, f):
        for r in D:
            r[dst] += f * r[src]
        for r in Q:
            r[dst] += f * r[src]

    t = 0
    while t < min(m, n):
        nonzero = [(abs(D[i][j]), i, j) for i in range(t, m) for j in range(t, n) if D[i][j]]
        if not nonzero:
            break
        _, i, j = min(nonzero)
        swap_rows(t, i)
        swap_cols(t, j)
        done = False
        while not done:
            done = True
            for i in range(t + 1, m):
                if D[i][t]:
                    add_row(t, i, -(D[i][t] // D[t][t]))
                    if D[i][t]:
                        swap_rows(t, i)
                        done = False
            for j in range(t + 1, n):
                if D[t][j]:
                    add_col(t, j, -(D[t][j] // D[t][t]))
                    if D[t][j]:
                        swap_cols(t, j)
                        done = False
            if done:
                # divisibility: the pivot must divide every later entry
                bad = next(((i, j) for i in range(t + 1, m) for j in range(t + 1, n)
                            if D[i][j] % D[t][t]), None)
                if bad is not None:
                    add_row(bad[0], t, 1)
                    done = False
        if D[t][t] < 0:
            D[t] = [-x for x in D[t]]
            P[t] = [-x for x in P[t]]
        t += 1
    return P, D, Q


def unimodular_inverse(a: Sequence[Sequence[int]]) -> Matrix:
    inv = inverse(a)
    if inv is None:
        raise ValueError("matrix is singular")
    out = [[int(x) for x in r] for r in inv]
    if any(x != y for r, ri in zip(inv, out) for x, y in zip(r, ri)):
        raise ValueError("matrix is not unimodular")
    return out
