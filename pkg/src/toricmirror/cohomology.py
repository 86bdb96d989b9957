"""The rational cohomology ring of a smooth projective toric variety.

Presented on the nef basis p_1..p_r (each in degree 1) modulo the
Stanley-Reisner monomials prod_{i in P} D_i over primitive collections P,
with D_i = sum_a m_ia p_a. Normal forms are computed degree by degree with a
graded lexicographic order (p_1 > p_2 > ...), so the basis consists of the
standard monomials.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from . import errors, linalg
from . import polynomial as poly
from .fan import ExactSequenceData, PrimitiveRelation, normalized_volume


class AlgebraElement:
    """Immutable coefficient vector over the monomial basis of an algebra."""

    __slots__ = ("algebra", "coeffs")

    def __init__(self, algebra: "GradedAlgebra", coeffs: Sequence):
        self.algebra = algebra
        self.coeffs = tuple(Fraction(c) for c in coeffs)

    def __add__(self, other):
        if isinstance(other, AlgebraElement):
            return AlgebraElement(self.algebra, [a + b for a, b in zip(self.coeffs, other.coeffs)])
        if other == 0:
            return self
        return self + self.algebra.scalar(other)

    __radd__ = __add__

    def __neg__(self):
        return AlgebraElement(self.algebra, [-a for a in self.coeffs])

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, AlgebraElement):
            return self.algebra.multiply(self, other)
        return AlgebraElement(self.algebra, [a * other for a in self.coeffs])

    def __rmul__(self, other):
        return AlgebraElement(self.algebra, [other * a for a in self.coeffs])

    def __truediv__(self, scalar):
        return AlgebraElement(self.algebra, [a / scalar for a in self.coeffs])

    def __bool__(self):
        return any(self.coeffs)

    def __eq__(self, other):
        if isinstance(other, AlgebraElement):
            return self.coeffs == other.coeffs
        if other == 0:
            return not self
        return self == self.algebra.scalar(other)

    def __hash__(self):
        return hash(self.coeffs)

    def __pow__(self, k: int):
        out = self.algebra.one()
        for _ in range(k):
            out = out * self
        return out

    def component(self, degree: int) -> "AlgebraElement":
        deg = self.algebra.degrees
        return AlgebraElement(self.algebra, [c if deg[i] == degree else 0
                                             for i, c in enumerate(self.coeffs)])

    def support_degrees(self) -> set[int]:
        return {self.algebra.degrees[i] for i, c in enumerate(self.coeffs) if c}

    def __repr__(self):
        terms = []
        for c, e in zip(self.coeffs, self.algebra.basis):
            if not c:
                continue
            mono = poly.format_monomial(e)
            if mono == "1":
                terms.append(str(c))
            elif c == 1:
                terms.append(mono)
            elif c == -1:
                terms.append("-" + mono)
            else:
                terms.append(f"{c}*{mono}")
        return " + ".join(terms).replace("+ -", "- ") if terms else "0"


@dataclass(frozen=True, eq=False)
class GradedAlgebra:
    r: int
    n: int
    basis: tuple[tuple[int, ...], ...]
    normal_forms: dict  # exponent -> coefficient tuple, all monomials of degree <= n
    divisor_rows: tuple[tuple[int, ...], ...]
    point_value: Fraction  # integral of the top basis monomial

    def __post_init__(self):
        index = {e: i for i, e in enumerate(self.basis)}
        object.__setattr__(self, "index", index)
        table = []
        for e1 in self.basis:
            row = []
            for e2 in self.basis:
                prod = tuple(x + y for x, y in zip(e1, e2))
                vec = self.normal_forms.get(prod)
                row.append([] if vec is None else [(k, c) for k, c in enumerate(vec) if c])
            table.append(row)
        object.__setattr__(self, "_table", table)

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def degrees(self) -> tuple[int, ...]:
        return tuple(sum(e) for e in self.basis)

    def dims_by_degree(self) -> list[int]:
        return [self.degrees.count(d) for d in range(self.n + 1)]

    def mult_table(self) -> list[list[tuple[Fraction, ...]]]:
        return [[self.multiply(self.basis_element(i), self.basis_element(j)).coeffs
                 for j in range(self.dim)] for i in range(self.dim)]

    # -- constructors
    def zero(self) -> AlgebraElement:
        return AlgebraElement(self, [0] * self.dim)

    def one(self) -> AlgebraElement:
        return self.basis_element(self.index[(0,) * self.r])

    def scalar(self, c) -> AlgebraElement:
        return self.one() * Fraction(c)

    def basis_element(self, i: int) -> AlgebraElement:
        return AlgebraElement(self, [int(k == i) for k in range(self.dim)])

    def monomial(self, e: Sequence[int]) -> AlgebraElement:
        e = tuple(e)
        if sum(e) > self.n:
            return self.zero()
        return AlgebraElement(self, self.normal_forms[e])

    def generator(self, a: int) -> AlgebraElement:
        return self.monomial(tuple(int(b == a) for b in range(self.r)))

    def from_poly(self, p: poly.Poly) -> AlgebraElement:
        out = self.zero()
        for e, c in p.items():
            out = out + self.monomial(e) * c
        return out

    def divisor(self, i: int) -> AlgebraElement:
        """[D_i] = sum_a m_ia p_a."""
        return self.from_poly(poly.linear(self.divisor_rows[i]))

    def linear_class(self, coeffs: Sequence) -> AlgebraElement:
        out = self.zero()
        for a, c in enumerate(coeffs):
            out = out + self.generator(a) * c
        return out

    # -- arithmetic
    def multiply(self, x: AlgebraElement, y: AlgebraElement) -> AlgebraElement:
        out = [Fraction(0)] * self.dim
        for i, a in enumerate(x.coeffs):
            if not a:
                continue
            row = self._table[i]
            for j, b in enumerate(y.coeffs):
                if not b:
                    continue
                ab = a * b
                for k, c in row[j]:
                    out[k] += ab * c
        return AlgebraElement(self, out)

    def cup_matrix(self, x: AlgebraElement) -> list[list[Fraction]]:
        """Matrix of u -> x*u; column j is the image of basis element j."""
        cols = [(x * self.basis_element(j)).coeffs for j in range(self.dim)]
        return [list(row) for row in zip(*cols)]

    def integrate(self, x: AlgebraElement) -> Fraction:
        top = self.dim - 1
        return x.coeffs[top] * self.point_value


def build_algebra(esd: ExactSequenceData, prels: Sequence[PrimitiveRelation],
                  check_volume: bool = True) -> GradedAlgebra:
    r, n = esd.r, esd.n
    divisors = [poly.linear(row) for row in esd.M]
    relations = []
    for pr in prels:
        rel = {(0,) * r: Fraction(1)}
        for i in pr.collection:
            rel = poly.mul(rel, divisors[i])
        relations.append((len(pr.collection), rel))

    basis: list[tuple[int, ...]] = []
    normal_forms: dict[tuple[int, ...], dict[tuple[int, ...], Fraction]] = {}
    for d in range(n + 2):
        monos = poly.monomials_of_degree(r, d)
        col = {e: k for k, e in enumerate(monos)}
        rows = []
        for deg_rel, rel in relations:
            if deg_rel > d:
                continue
            for u in poly.monomials_of_degree(r, d - deg_rel):
                row = [Fraction(0)] * len(monos)
                for e, c in poly.mul({u: Fraction(1)}, rel).items():
                    row[col[e]] += c
                rows.append(row)
        reduced, pivots = linalg.rref(rows) if rows else ([], [])
        standard = [e for k, e in enumerate(monos) if k not in pivots]
        if d == n + 1:
            if standard:
                raise errors.DimensionMismatch(
                    f"degree {d} is nonzero: standard monomials {standard}",
                    witness={"degree": d})
            break
        basis.extend(standard)
        for k, e in enumerate(monos):
            if k in pivots:
                row = reduced[pivots.index(k)]
                normal_forms[e] = {monos[c]: -row[c] for c in range(len(monos))
                                   if c not in pivots and row[c]}
            else:
                normal_forms[e] = {e: Fraction(1)}
    expected = len(esd.fan.max_cones)
    if len(basis) != expected:
        raise errors.DimensionMismatch(f"algebra has dimension {len(basis)}, expected {expected}",
                                       witness={"expected": expected, "got": len(basis)})
    if check_volume:
        normalized_volume(esd.fan)
    if sum(1 for e in basis if sum(e) == n) != 1:
        raise errors.DimensionMismatch("top degree is not one-dimensional")
    index = {e: i for i, e in enumerate(basis)}
    vectors = {}
    for e, nf in normal_forms.items():
        vec = [Fraction(0)] * len(basis)
        for b, c in nf.items():
            vec[index[b]] = c
        vectors[e] = tuple(vec)

    ga = GradedAlgebra(r=r, n=n, basis=tuple(basis), normal_forms=vectors,
                       divisor_rows=esd.M, point_value=Fraction(1))
    # fix the point class of the first maximal cone to integrate to 1
    cones = esd.fan.max_cones
    values = []
    for cone in cones:
        pt = ga.one()
        for i in cone:
            pt = pt * ga.divisor(i)
        values.append(pt.coeffs[-1])
    if values[0] == 0:
        raise errors.DegeneratePairing("point class vanishes")
    if any(v != values[0] for v in values):
        raise errors.DegeneratePairing("point classes of maximal cones disagree",
                                       witness={"values": [str(v) for v in values]})
    object.__setattr__(ga, "point_value", 1 / values[0])
    return ga


def integrate(ga: GradedAlgebra, x: AlgebraElement) -> Fraction:
    return ga.integrate(x)


def poincare_pairing_matrix(ga: GradedAlgebra) -> list[list[Fraction]]:
    g = [[ga.integrate(ga.basis_element(i) * ga.basis_element(j)) for j in range(ga.dim)]
         for i in range(ga.dim)]
    if linalg.det(g) == 0:
        raise errors.DegeneratePairing("Poincare pairing is degenerate")
    return g


@dataclass
class StructureOperators:
    P: list[list[list[Fraction]]]
    C1: list[list[Fraction]]
    MU: list[list[Fraction]]


def structure_operators(ga: GradedAlgebra, esd: ExactSequenceData) -> StructureOperators:
    P = [ga.cup_matrix(ga.generator(a)) for a in range(ga.r)]
    C1 = [[sum(k * Pa[i][j] for k, Pa in zip(esd.euler_weights, P)) for j in range(ga.dim)]
          for i in range(ga.dim)]
    MU = [[Fraction(ga.degrees[i] if i == j else 0) for j in range(ga.dim)]
          for i in range(ga.dim)]
    return StructureOperators(P=P, C1=C1, MU=MU)
