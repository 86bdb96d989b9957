"""Differential operators of hypergeometric type and the quantum ring they cut out.

Reduced operators live in the algebra generated by q_a, z^{+-1}, theta_a = z q_a d/dq_a
and E = z^2 d/dz, with

    [theta_a, q_b] = delta_ab z q_a,   [E, z] = z^2,   [E, theta_a] = z theta_a.

Terms are kept normal ordered as q^e z^j theta^alpha E^beta. Ambient operators
use lambda_0..lambda_m, their derivatives, z^{+-1} and z d/dz.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from typing import Sequence

from . import errors, linalg
from . import polynomial as poly
from .fan import ExactSequenceData, FanoType, PrimitiveRelation
from .series import LogLaurentSeries, _accumulate


def _fmt_coeff(c: Fraction, body: str) -> str:
    if body == "1":
        return str(c)
    if c == 1:
        return body
    if c == -1:
        return "-" + body
    return f"{c}*{body}"


def _join(terms: list[str]) -> str:
    if not terms:
        return "0"
    out = terms[0]
    for t in terms[1:]:
        out += " - " + t[1:] if t.startswith("-") else " + " + t
    return out


def _power(name: str, k: int) -> str:
    return name if k == 1 else f"{name}^{k}"


def _fraction_json(c: Fraction) -> str:
    return f"{c.numerator}/{c.denominator}"


# ---------------------------------------------------------------- reduced operators

class WeylOperator:
    """Finite sum of c * q^e z^j theta^alpha E^beta, normal ordered."""

    __slots__ = ("r", "terms")

    def __init__(self, r: int, terms: dict | None = None):
        self.r = r
        self.terms: dict[tuple, Fraction] = {}
        for k, c in (terms or {}).items():
            if c:
                self.terms[k] = Fraction(c)

    @classmethod
    def term(cls, r: int, coeff=1, e=None, j: int = 0, alpha=None, beta: int = 0):
        e = tuple(e) if e is not None else (0,) * r
        alpha = tuple(alpha) if alpha is not None else (0,) * r
        return cls(r, {(e, j, alpha, beta): Fraction(coeff)})

    @classmethod
    def one(cls, r: int):
        return cls.term(r)

    @classmethod
    def q(cls, r: int, a: int, k: int = 1):
        return cls.term(r, e=[k * (b == a) for b in range(r)])

    @classmethod
    def z(cls, r: int, k: int = 1):
        return cls.term(r, j=k)

    @classmethod
    def theta(cls, r: int, a: int):
        return cls.term(r, alpha=[int(b == a) for b in range(r)])

    @classmethod
    def euler(cls, r: int):
        return cls.term(r, beta=1)

    def __add__(self, other):
        if not isinstance(other, WeylOperator):
            other = WeylOperator.one(self.r) * Fraction(other)
        out = dict(self.terms)
        for k, c in other.terms.items():
            _accumulate(out, k, c)
        return WeylOperator(self.r, out)

    __radd__ = __add__

    def __neg__(self):
        return WeylOperator(self.r, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, WeylOperator):
            return WeylOperator(self.r, {k: c * other for k, c in self.terms.items()})
        out: dict = {}
        for key, c in self.terms.items():
            for k2, c2 in _left_multiply_term(key, other.terms).items():
                _accumulate(out, k2, c * c2)
        return WeylOperator(self.r, out)

    def __rmul__(self, other):
        return self * other

    def __pow__(self, k: int):
        out = WeylOperator.one(self.r)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        return isinstance(other, WeylOperator) and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __bool__(self):
        return bool(self.terms)

    def max_q_shift(self) -> int:
        return max((max(e) if e else 0 for (e, _, _, _) in self.terms), default=0)

    def to_text(self) -> str:
        parts = []
        for (e, j, al, b), c in sorted(self.terms.items(), reverse=True):
            factors = [_power(f"q{a + 1}", k) for a, k in enumerate(e) if k]
            if j:
                factors.append(_power("z", j))
            factors += [_power(f"t{a + 1}", k) for a, k in enumerate(al) if k]
            if b:
                factors.append(_power("E", b))
            parts.append(_fmt_coeff(c, "*".join(factors) or "1"))
        return _join(parts)

    __str__ = to_text

    def __repr__(self):
        return f"WeylOperator({self.to_text()!r})"

    def to_json(self) -> list[dict]:
        return [{"coeff": _fraction_json(c), "q": list(e), "z": j, "theta": list(al), "E": b}
                for (e, j, al, b), c in sorted(self.terms.items())]

    def apply(self, s: LogLaurentSeries) -> LogLaurentSeries:
        out = s.zero(s.r, s.N)
        for (e, j, al, b), c in sorted(self.terms.items()):
            t = s
            for _ in range(b):
                t = t.euler_z()
            for a, k in enumerate(al):
                for _ in range(k):
                    t = t.theta(a)
            shift = LogLaurentSeries.monomial(s.r, s.N, c, e=e, j=j)
            out = out + shift * t
        return out


def _left_multiply_term(key, terms: dict) -> dict:
    """(q^e z^j theta^alpha E^beta) * sum(terms), in normal order."""
    e, j, al, b = key
    cur = dict(terms)
    for _ in range(b):
        cur = _left_euler(cur)
    for a, k in enumerate(al):
        for _ in range(k):
            cur = _left_theta(cur, a)
    out: dict = {}
    for (e2, j2, al2, b2), c in cur.items():
        _accumulate(out, (tuple(x + y for x, y in zip(e, e2)), j + j2, al2, b2), c)
    return out


def _left_theta(terms: dict, a: int) -> dict:
    out: dict = {}
    for (e, j, al, b), c in terms.items():
        up = al[:a] + (al[a] + 1,) + al[a + 1:]
        _accumulate(out, (e, j, up, b), c)
        if e[a]:
            _accumulate(out, (e, j + 1, al, b), c * e[a])
    return out


def _left_euler(terms: dict) -> dict:
    out: dict = {}
    for (e, j, al, b), c in terms.items():
        _accumulate(out, (e, j, al, b + 1), c)
        w = j + sum(al)
        if w:
            _accumulate(out, (e, j + 1, al, b), c * w)
    return out


def divisor_operator(esd: ExactSequenceData, i: int) -> WeylOperator:
    """D_i acting as sum_a m_ia theta_a."""
    out = WeylOperator(esd.r)
    for a, m in enumerate(esd.M[i]):
        if m:
            out = out + WeylOperator.theta(esd.r, a) * m
    return out


def _check_relation(esd: ExactSequenceData, l: Sequence[int]) -> None:
    if len(l) != esd.m or any(linalg.dot(row, l) for row in esd.A):
        raise errors.NotARelation(f"{list(l)} is not a relation among the rays",
                                  witness={"l": list(l)})


def reduced_box_operator(esd: ExactSequenceData, l: Sequence[int]) -> WeylOperator:
    _check_relation(esd, l)
    r = esd.r
    p = esd.degrees(l)
    z = WeylOperator.z(r)

    def falling(sign: int) -> WeylOperator:
        out = WeylOperator.one(r)
        for i, li in enumerate(l):
            if sign * li > 0:
                D = divisor_operator(esd, i)
                for nu in range(sign * li):
                    out = out * (D - z * nu)
        return out

    q_pos = WeylOperator.term(r, e=[max(x, 0) for x in p])
    q_neg = WeylOperator.term(r, e=[max(-x, 0) for x in p])
    return q_pos * falling(-1) - q_neg * falling(1)


def euler_operator(esd: ExactSequenceData, lattice_form: bool = False) -> WeylOperator:
    """z d/dz + sum_a k_a q_a d/dq_a, or z times it in the lattice form."""
    r = esd.r
    out = WeylOperator.euler(r)
    for a, k in enumerate(esd.euler_weights):
        if k:
            out = out + WeylOperator.theta(r, a) * k
    return out if lattice_form else WeylOperator.z(r, -1) * out


# ---------------------------------------------------------------- symbols

@dataclass(frozen=True)
class Symbol:
    """Commutative polynomial in q, z, x_a (for theta_a) and y (for E)."""

    r: int
    terms: tuple  # sorted ((e, j, alpha, beta), coeff)

    def as_dict(self) -> dict:
        return dict(self.terms)

    def to_text(self) -> str:
        parts = []
        for (e, j, al, b), c in sorted(self.terms, reverse=True):
            factors = [_power(f"q{a + 1}", k) for a, k in enumerate(e) if k]
            if j:
                factors.append(_power("z", j))
            factors += [_power(f"x{a + 1}", k) for a, k in enumerate(al) if k]
            if b:
                factors.append(_power("y", b))
            parts.append(_fmt_coeff(c, "*".join(factors) or "1"))
        return _join(parts)

    __str__ = to_text


def principal_symbol(op: WeylOperator, at_z_zero: bool = True, keep_euler: bool = False) -> Symbol:
    """Commutative image of op with theta_a -> x_a and E -> y.

    At z = 0 every term carrying a positive power of z disappears. Since
    E = z * (z d/dz), its symbol is treated as z*y and vanishes there too
    unless ``keep_euler`` is set, in which case y survives as the symbol of
    the residue of z^2 d/dz.
    """
    out: dict = {}
    for (e, j, al, b), c in op.terms.items():
        if at_z_zero:
            if j < 0:
                raise ValueError("operator has a pole at z = 0")
            if j > 0 or (b and not keep_euler):
                continue
            j = 0
        _accumulate(out, (e, j, al, b), c)
    return Symbol(op.r, tuple(sorted(out.items())))


# ---------------------------------------------------------------- ambient operators

class AmbientOperator:
    """Finite sum of c * lambda^e z^j d_lambda^alpha (z d/dz)^beta over lambda_0..lambda_m.

    lambda-exponents may be negative (Laurent in lambda).
    """

    __slots__ = ("m", "terms")

    def __init__(self, m: int, terms: dict | None = None):
        self.m = m
        self.terms: dict[tuple, Fraction] = {}
        for k, c in (terms or {}).items():
            if c:
                self.terms[k] = Fraction(c)

    @classmethod
    def term(cls, m: int, coeff=1, e=None, j: int = 0, alpha=None, beta: int = 0):
        e = tuple(e) if e is not None else (0,) * (m + 1)
        alpha = tuple(alpha) if alpha is not None else (0,) * (m + 1)
        return cls(m, {(e, j, alpha, beta): Fraction(coeff)})

    @classmethod
    def lam(cls, m: int, i: int, k: int = 1):
        return cls.term(m, e=[k * (t == i) for t in range(m + 1)])

    @classmethod
    def d(cls, m: int, i: int, k: int = 1):
        return cls.term(m, alpha=[k * (t == i) for t in range(m + 1)])

    @classmethod
    def z(cls, m: int, k: int = 1):
        return cls.term(m, j=k)

    @classmethod
    def zdz(cls, m: int):
        return cls.term(m, beta=1)

    def __add__(self, other):
        if not isinstance(other, AmbientOperator):
            other = AmbientOperator.term(self.m, other)
        out = dict(self.terms)
        for k, c in other.terms.items():
            _accumulate(out, k, c)
        return AmbientOperator(self.m, out)

    __radd__ = __add__

    def __neg__(self):
        return AmbientOperator(self.m, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, AmbientOperator):
            return AmbientOperator(self.m, {k: c * other for k, c in self.terms.items()})
        out: dict = {}
        for (e1, j1, a1, b1), c1 in self.terms.items():
            for (e2, j2, a2, b2), c2 in other.terms.items():
                # d^a1 lambda^e2 = sum_k prod_i C(a1_i, k_i) (e2_i)_falling(k_i) lambda^(e2-k) d^(a1-k)
                per_var = []
                for a, f in zip(a1, e2):
                    opts = []
                    for k in range(a + 1):
                        w = comb(a, k) * _falling(f, k)
                        if w:
                            opts.append((k, w))
                    per_var.append(opts)
                # (z d/dz)^b1 z^j2 = z^j2 (z d/dz + j2)^b1
                z_opts = [(s, comb(b1, s) * j2 ** (b1 - s)) for s in range(b1 + 1)]
                z_opts = [(s, w) for s, w in z_opts if w]
                for choice in itertools.product(*per_var):
                    w_lam = 1
                    for _, w in choice:
                        w_lam *= w
                    ks = [k for k, _ in choice]
                    e = tuple(x + y - k for x, y, k in zip(e1, e2, ks))
                    al = tuple(a - k + y for a, k, y in zip(a1, ks, a2))
                    for s, wz in z_opts:
                        _accumulate(out, (e, j1 + j2, al, s + b2), c1 * c2 * w_lam * wz)
        return AmbientOperator(self.m, out)

    def __rmul__(self, other):
        return self * other

    def __pow__(self, k: int):
        out = AmbientOperator.term(self.m)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        return isinstance(other, AmbientOperator) and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __bool__(self):
        return bool(self.terms)

    def to_text(self) -> str:
        parts = []
        for (e, j, al, b), c in sorted(self.terms.items(), reverse=True):
            factors = [_power(f"l{i}", k) for i, k in enumerate(e) if k]
            if j:
                factors.append(_power("z", j))
            factors += [_power(f"d{i}", k) for i, k in enumerate(al) if k]
            if b:
                factors.append(_power("zdz", b))
            parts.append(_fmt_coeff(c, "*".join(factors) or "1"))
        return _join(parts)

    __str__ = to_text

    def __repr__(self):
        return f"AmbientOperator({self.to_text()!r})"

    def to_json(self) -> list[dict]:
        return [{"coeff": _fraction_json(c), "lambda": list(e), "z": j, "d": list(al), "zdz": b}
                for (e, j, al, b), c in sorted(self.terms.items())]

    def apply(self, f: dict) -> dict:
        """Apply to a Laurent polynomial ``{(lambda exponents, z exponent): coeff}``."""
        out: dict = {}
        for (s, t), v in f.items():
            for (e, j, al, b), c in self.terms.items():
                w = c * v * t ** b
                for si, ai in zip(s, al):
                    w *= _falling(si, ai)
                if w:
                    key = (tuple(x - a + y for x, a, y in zip(s, al, e)), t + j)
                    _accumulate(out, key, w)
        return out


def _falling(x: int, k: int) -> int:
    out = 1
    for i in range(k):
        out *= x - i
    return out


AMBIENT_VARIANTS = ("classical", "hat", "prime", "doubleprime")


@dataclass
class AmbientSystem:
    variant: str
    beta: tuple
    boxes: list[AmbientOperator]
    Z: list[AmbientOperator]
    E: AmbientOperator
    relations: list[tuple[int, ...]] = field(default_factory=list)


def _ambient_box(m: int, l: Sequence[int], variant: str) -> AmbientOperator:
    one = AmbientOperator.term(m)
    lbar = sum(l)
    neg = one
    pos = one
    for i, li in enumerate(l, start=1):
        if li < 0:
            neg = neg * AmbientOperator.d(m, i, -li)
        elif li > 0:
            pos = pos * AmbientOperator.d(m, i, li)
    if variant == "classical":
        d0 = AmbientOperator.d(m, 0, abs(lbar))
        return d0 * neg - pos if lbar >= 0 else neg - d0 * pos
    hat = AmbientOperator.z(m, -lbar) * neg - pos
    if variant == "hat":
        return hat
    if variant == "prime":
        return AmbientOperator.z(m, sum(x for x in l if x > 0)) * hat
    # doubleprime: expanded through lambda^j d^j = prod (lambda d - nu)
    z = AmbientOperator.z(m)

    def shifted(sign: int) -> AmbientOperator:
        out = one
        for i, li in enumerate(l, start=1):
            if sign * li > 0:
                zld = z * AmbientOperator.lam(m, i) * AmbientOperator.d(m, i)
                for nu in range(sign * li):
                    out = out * (zld - z * nu)
        return out

    lam = AmbientOperator.term(m, e=[0] + list(l))
    return lam * shifted(-1) - shifted(1)


def ambient_box_operators(esd: ExactSequenceData, beta: Sequence | None = None,
                          variant: str = "hat",
                          relations: Sequence[Sequence[int]] | None = None) -> AmbientSystem:
    """Box, torus and Euler operators of the extended system in the requested presentation.

    ``beta = (beta_0, beta_1, ..., beta_n)``; boxes are generated for the
    columns of M unless other relations are given.
    """
    if variant not in AMBIENT_VARIANTS:
        raise ValueError(f"unknown variant {variant!r}")
    n, m = esd.n, esd.m
    beta = tuple(Fraction(b) for b in (beta if beta is not None else [1] + [0] * n))
    if len(beta) != n + 1:
        raise ValueError(f"beta must have {n + 1} entries")
    if relations is None:
        relations = [tuple(row[a] for row in esd.M) for a in range(esd.r)]
    for l in relations:
        _check_relation(esd, l)
    boxes = [_ambient_box(m, l, variant) for l in relations]
    euler_part = [AmbientOperator.lam(m, i) * AmbientOperator.d(m, i) for i in range(1, m + 1)]
    Z = []
    for k in range(n):
        op = AmbientOperator.term(m, beta[k + 1])
        for i in range(m):
            if esd.A[k][i]:
                op = op + euler_part[i] * esd.A[k][i]
        Z.append(op)
    E = AmbientOperator(m)
    for t in euler_part:
        E = E + t
    if variant == "classical":
        E = E + AmbientOperator.lam(m, 0) * AmbientOperator.d(m, 0) + beta[0]
    else:
        E = E + AmbientOperator.zdz(m) + (beta[0] - 1)
    return AmbientSystem(variant=variant, beta=beta, boxes=boxes, Z=Z, E=E,
                         relations=[tuple(l) for l in relations])


# ---------------------------------------------------------------- Batyrev ring

@dataclass
class BatyrevRing:
    basis: tuple[tuple[int, ...], ...]
    M: list  # M[a][i][j]: {q exponent: Fraction}, column j = image of basis j
    qset: tuple[tuple[int, ...], ...]
    mode: str
    N: int | None
    relations: list[dict]  # {(q exponent, x exponent): coeff}

    @property
    def dim(self) -> int:
        return len(self.basis)

    def matrix_at_zero(self, a: int) -> list[list[Fraction]]:
        z = (0,) * len(self.qset[0])
        return [[entry.get(z, Fraction(0)) for entry in row] for row in self.M[a]]

    def relation_text(self) -> list[str]:
        out = []
        for rel in self.relations:
            parts = []
            for (c, e), v in sorted(rel.items(), reverse=True):
                qs = [_power(f"q{a + 1}", k) for a, k in enumerate(c) if k]
                xs = [_power(f"p{a + 1}", k) for a, k in enumerate(e) if k]
                parts.append(_fmt_coeff(v, "*".join(qs + xs) or "1"))
            out.append(_join(parts))
        return out


def batyrev_relation(esd: ExactSequenceData, l: Sequence[int]) -> dict:
    """z=0 symbol of the reduced box operator of l as a polynomial in (q, p)."""
    sym = principal_symbol(reduced_box_operator(esd, l), at_z_zero=True)
    return {(e, al): c for (e, _, al, _), c in sym.terms}


def _graded_qset(weights: Sequence[int], bound: int) -> list[tuple[int, ...]]:
    out = []
    ranges = [range(bound // w + 1) for w in weights]
    for c in itertools.product(*ranges):
        if sum(w * x for w, x in zip(weights, c)) <= bound:
            out.append(tuple(c))
    return out


def _total_qset(r: int, N: int) -> list[tuple[int, ...]]:
    return [c for c in itertools.product(range(N + 1), repeat=r) if sum(c) <= N]


def batyrev_quantum_ring(esd: ExactSequenceData, prels: Sequence[PrimitiveRelation],
                         basis: Sequence[Sequence[int]], mode: str = "graded_exact",
                         N: int | None = None, fano_type: FanoType | None = None) -> BatyrevRing:
    """Quotient of Q[q][p] by the symbols of the primitive boxes, by linear elimination.

    ``basis`` are the standard monomials of the classical cohomology ring.
    In ``graded_exact`` mode q_a has degree k_a and everything is exact;
    ``q_truncated`` works modulo total q-order > N.
    """
    r, n = esd.r, esd.n
    weights = esd.euler_weights
    if mode == "graded_exact":
        if (fano_type is not None and fano_type != FanoType.FANO) or any(k <= 0 for k in weights):
            raise errors.GradingNotPositive(
                "q-grading by anticanonical degree is not positive; use q_truncated",
                witness={"weights": list(weights)})
        qset = _graded_qset(weights, n + 1)
    elif mode == "q_truncated":
        if N is None or N < 0:
            raise ValueError("q_truncated mode needs an order N >= 0")
        qset = _total_qset(r, N)
    else:
        raise ValueError(f"unknown mode {mode!r}")
    basis = [tuple(b) for b in basis]
    basis_s = set(basis)

    relations = [batyrev_relation(esd, pr.relation) for pr in prels]
    xmonos = [e for d in range(n + 2) for e in poly.monomials_of_degree(r, d)]
    columns = [(c, e) for c in qset for e in xmonos]
    if mode == "graded_exact":
        columns = [(c, e) for c, e in columns if linalg.dot(weights, c) + sum(e) <= n + 1]
    col_s = set(columns)

    rows = []
    for rel in relations:
        xdeg = max(sum(e) for (_, e) in rel)
        for c0 in qset:
            for d in range(n + 2 - xdeg):
                if mode == "graded_exact" and linalg.dot(weights, c0) + d + xdeg > n + 1:
                    continue
                for u in poly.monomials_of_degree(r, d):
                    row = {}
                    for (c, e), v in rel.items():
                        key = (tuple(x + y for x, y in zip(c, c0)), tuple(x + y for x, y in zip(e, u)))
                        if key in col_s:
                            row[key] = row.get(key, 0) + v
                    row = {k: v for k, v in row.items() if v}
                    if row:
                        rows.append(row)

    # non-basis columns are eliminated first, highest x-degree first
    def order_key(col):
        c, e = col
        return (col[1] in basis_s, -sum(e), tuple(-x for x in e), c)

    ordered = sorted(columns, key=order_key)
    reduced = _sparse_rref(rows, ordered)
    pivot_of = {col: row for col, row in reduced}
    for col in columns:
        if col[1] not in basis_s and col not in pivot_of:
            raise errors.RankDrop(f"monomial {col} has no normal form",
                                  witness={"degree": sum(col[1]) + linalg.dot(weights, col[0])})
        if col[1] in basis_s and col in pivot_of:
            raise errors.RankDrop(f"basis monomial {col} became dependent",
                                  witness={"degree": sum(col[1]) + linalg.dot(weights, col[0])})

    def normal_form(e: tuple[int, ...]) -> list[dict]:
        """Coefficients of x^e over the basis as {q exponent: value}."""
        vec = [dict() for _ in basis]
        zero = (0,) * r
        if e in basis_s:
            vec[basis.index(e)][zero] = Fraction(1)
            return vec
        row = pivot_of[(zero, e)]
        for (c, b), v in row.items():
            if b in basis_s:
                vec[basis.index(b)][c] = -v
        return vec

    mats = []
    for a in range(r):
        cols = []
        for b in basis:
            cols.append(normal_form(tuple(x + (i == a) for i, x in enumerate(b))))
        mats.append([[cols[j][i] for j in range(len(basis))] for i in range(len(basis))])
    return BatyrevRing(basis=tuple(basis), M=mats, qset=tuple(qset), mode=mode, N=N,
                       relations=relations)


def _sparse_rref(rows: list[dict], order: list) -> list[tuple]:
    """Gauss-Jordan on sparse rows with columns tried in the given order."""
    rows = [dict(r) for r in rows]
    pivots: list[tuple] = []
    remaining = rows
    for col in order:
        idx = next((i for i, row in enumerate(remaining) if row.get(col)), None)
        if idx is None:
            continue
        prow = remaining.pop(idx)
        inv = 1 / Fraction(prow[col])
        prow = {k: Fraction(v) * inv for k, v in prow.items()}
        for target in [p for _, p in pivots] + remaining:
            f = target.get(col)
            if f:
                for k, v in prow.items():
                    nv = target.get(k, 0) - f * v
                    if nv:
                        target[k] = nv
                    else:
                        target.pop(k, None)
        remaining = [row for row in remaining if row]
        pivots.append((col, prow))
    return pivots
