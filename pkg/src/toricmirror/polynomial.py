"""Sparse commutative polynomials as ``{exponent tuple: coefficient}`` dicts."""
from __future__ import annotations

from fractions import Fraction
from typing import Sequence

Poly = dict[tuple[int, ...], Fraction]


def add(a: Poly, b: Poly, scale=1) -> Poly:
    out = dict(a)
    for e, c in b.items():
        v = out.get(e, 0) + scale * c
        if v:
            out[e] = v
        else:
            out.pop(e, None)
    return out


def mul(a: Poly, b: Poly) -> Poly:
    out: Poly = {}
    for e1, c1 in a.items():
        for e2, c2 in b.items():
            e = tuple(x + y for x, y in zip(e1, e2))
            v = out.get(e, 0) + c1 * c2
            if v:
                out[e] = v
            else:
                out.pop(e, None)
    return out


def power(a: Poly, k: int, nvars: int) -> Poly:
    out: Poly = {(0,) * nvars: Fraction(1)}
    for _ in range(k):
        out = mul(out, a)
    return out


def linear(coeffs: Sequence[int]) -> Poly:
    """sum_a coeffs[a] x_a"""
    r = len(coeffs)
    return {tuple(int(b == a) for b in range(r)): Fraction(c) for a, c in enumerate(coeffs) if c}


def monomials_of_degree(nvars: int, d: int) -> list[tuple[int, ...]]:
    """All exponent vectors of total degree d, in descending lexicographic order."""
    if nvars == 0:
        return [()] if d == 0 else []
    if nvars == 1:
        return [(d,)]
    out = []
    for first in range(d, -1, -1):
        for rest in monomials_of_degree(nvars - 1, d - first):
            out.append((first,) + rest)
    return out


def degree(e: Sequence[int]) -> int:
    return sum(e)


def format_monomial(e: Sequence[int], name: str = "p") -> str:
    parts = []
    for a, k in enumerate(e):
        if k == 1:
            parts.append(f"{name}{a + 1}")
        elif k > 1:
            parts.append(f"{name}{a + 1}^{k}")
    return "*".join(parts) if parts else "1"
