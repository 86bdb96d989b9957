"""Exact linear algebra over the integers and the rationals.

Everything here works on plain nested lists of ``int`` / ``Fraction``; matrix
sizes in this package are small (tens to a few hundred columns), so clarity
wins over asymptotics.
"""
from __future__ import annotations

from fractions import Fraction
from itertools import combinations
from math import gcd
from typing import Iterable, Sequence

Matrix = list[list[Fraction]]


def to_fraction_matrix(rows: Iterable[Iterable]) -> Matrix:
    return [[Fraction(x) for x in row] for row in rows]


def transpose(a: Sequence[Sequence]) -> list[list]:
    return [list(col) for col in zip(*a)]


def matmul(a: Sequence[Sequence], b: Sequence[Sequence]) -> list[list]:
    bt = transpose(b)
    return [[sum(x * y for x, y in zip(row, col)) for col in bt] for row in a]


def matvec(a: Sequence[Sequence], v: Sequence) -> list:
    return [sum(x * y for x, y in zip(row, v)) for row in a]


def identity(n: int) -> Matrix:
    return [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]


def dot(u: Sequence, v: Sequence):
    return sum(x * y for x, y in zip(u, v))


def det(a: Sequence[Sequence]) -> Fraction:
    """Determinant by Gaussian elimination over Q."""
    m = to_fraction_matrix(a)
    n = len(m)
    sign = 1
    result = Fraction(1)
    for col in range(n):
        piv = next((r for r in range(col, n) if m[r][col] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != col:
            m[col], m[piv] = m[piv], m[col]
            sign = -sign
        p = m[col][col]
        result *= p
        for r in range(col + 1, n):
            f = m[r][col] / p
            if f:
                m[r] = [x - f * y for x, y in zip(m[r], m[col])]
    return sign * result


def rref(a: Sequence[Sequence], col_order: Sequence[int] | None = None):
    """Reduced row echelon form.

    ``col_order`` fixes the order in which columns are tried as pivots.
    Returns ``(rows, pivots)`` where ``rows[k]`` has a 1 in column ``pivots[k]``.
    """
    m = [row for row in to_fraction_matrix(a)]
    if not m:
        return [], []
    ncols = len(m[0])
    order = list(range(ncols)) if col_order is None else list(col_order)
    pivots: list[int] = []
    r = 0
    for c in order:
        piv = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        p = m[r][c]
        m[r] = [x / p for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m[:r], pivots


def rank(a: Sequence[Sequence]) -> int:
    return len(rref(a)[1]) if a else 0


def solve(a: Sequence[Sequence], b: Sequence) -> list[Fraction]:
    """Unique solution of a square system ``a x = b``."""
    n = len(a)
    aug = [list(row) + [bi] for row, bi in zip(to_fraction_matrix(a), b)]
    rows, pivots = rref(aug, col_order=range(n))
    if pivots != list(range(n)):
        raise ZeroDivisionError("singular system")
    return [rows[i][n] for i in range(n)]


def inverse(a: Sequence[Sequence]) -> Matrix:
    n = len(a)
    aug = [list(row) + [Fraction(int(i == j)) for j in range(n)]
           for i, row in enumerate(to_fraction_matrix(a))]
    rows, pivots = rref(aug, col_order=range(n))
    if pivots != list(range(n)):
        raise ZeroDivisionError("singular matrix")
    return [row[n:] for row in rows]


def rational_kernel(a: Sequence[Sequence], ncols: int | None = None) -> Matrix:
    """Basis (as list of vectors) of the right kernel over Q."""
    if not a:
        n = ncols or 0
        return identity(n)
    n = len(a[0])
    rows, pivots = rref(a)
    free = [c for c in range(n) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * n
        v[f] = Fraction(1)
        for row, p in zip(rows, pivots):
            v[p] = -row[f]
        basis.append(v)
    return basis


def primitive(v: Sequence) -> list[int]:
    """Scale a rational vector to the primitive integer vector on its ray."""
    fr = [Fraction(x) for x in v]
    den = 1
    for x in fr:
        den = den * x.denominator // gcd(den, x.denominator)
    ints = [int(x * den) for x in fr]
    g = 0
    for x in ints:
        g = gcd(g, x)
    if g == 0:
        return ints
    return [x // g for x in ints]


def integer_kernel_basis(a: Sequence[Sequence[int]]) -> list[list[int]]:
    """Z-basis of ``{x in Z^m : a x = 0}`` via unimodular column operations.

    Column-reduces ``a`` to lower echelon form ``a U = [H | 0]`` while tracking
    ``U``; the columns of ``U`` sitting over the zero block span the kernel.
    """
    n = len(a)
    m = len(a[0]) if a else 0
    work = [list(map(int, row)) for row in a]
    u = [[int(i == j) for j in range(m)] for i in range(m)]

    def col_op(dst, src, k):
        # column dst -= k * column src
        for row in work:
            row[dst] -= k * row[src]
        for row in u:
            row[dst] -= k * row[src]

    def swap(c1, c2):
        for row in work:
            row[c1], row[c2] = row[c2], row[c1]
        for row in u:
            row[c1], row[c2] = row[c2], row[c1]

    lead = 0
    for r in range(n):
        if lead >= m:
            break
        while True:
            nz = [c for c in range(lead, m) if work[r][c] != 0]
            if not nz:
                break
            c_min = min(nz, key=lambda c: abs(work[r][c]))
            swap(lead, c_min)
            done = True
            for c in range(lead + 1, m):
                if work[r][c] != 0:
                    col_op(c, lead, work[r][c] // work[r][lead])
                    if work[r][c] != 0:
                        done = False
            if done:
                break
        if any(work[r][c] != 0 for c in range(lead, m)):
            lead += 1
    return [[u[i][c] for i in range(m)] for c in range(lead, m)]


def elementary_divisors(a: Sequence[Sequence[int]]) -> list[int]:
    """Nonzero invariant factors of an integer matrix (Smith form diagonal)."""
    from sympy import Matrix as SMatrix
    from sympy.matrices.normalforms import invariant_factors

    facts = invariant_factors(SMatrix(a))
    return [abs(int(x)) for x in facts if int(x) != 0]


def dual_cone(gens: Sequence[Sequence], dim: int) -> list[list[int]]:
    """Extremal rays of the dual cone ``{h : h.g >= 0 for all g in gens}``.

    Brute force over (dim-1)-subsets of generators: every facet of a
    full-dimensional cone is spanned by dim-1 independent generators. The
    cone spanned by ``gens`` must be full-dimensional; if it is the whole space
    the result is empty.
    """
    gens = [list(g) for g in gens if any(x != 0 for x in g)]
    if dim == 0:
        return []
    if rank(gens) < dim if gens else True:
        raise ValueError("cone is not full-dimensional")
    if dim == 1:
        out = []
        if all(g[0] >= 0 for g in gens):
            out.append([1])
        if all(g[0] <= 0 for g in gens):
            out.append([-1])
        return out
    found: set[tuple[int, ...]] = set()
    for sub in combinations(gens, dim - 1):
        ker = rational_kernel(list(sub), dim)
        if len(ker) != 1:
            continue
        h = primitive(ker[0])
        vals = [dot(h, g) for g in gens]
        if all(v >= 0 for v in vals):
            found.add(tuple(h))
        elif all(v <= 0 for v in vals):
            found.add(tuple(-x for x in h))
    return [list(h) for h in sorted(found, reverse=True)]


def in_cone(x: Sequence, facet_normals: Sequence[Sequence]) -> bool:
    return all(dot(h, x) >= 0 for h in facet_normals)
