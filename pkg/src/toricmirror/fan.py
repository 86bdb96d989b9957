"""Smooth complete fans: validation and lattice-combinatorial invariants.

Indices of rays are 0-based inside the package; fan files use 1-based
indices and are converted by :mod:`toricmirror.io`.
"""
from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from . import errors, linalg


@dataclass(frozen=True)
class FanData:
    n: int
    rays: tuple[tuple[int, ...], ...]
    max_cones: tuple[tuple[int, ...], ...]

    @classmethod
    def from_lists(cls, n, rays, max_cones):
        return cls(
            n=int(n),
            rays=tuple(tuple(int(x) for x in r) for r in rays),
            max_cones=tuple(tuple(sorted(int(i) for i in c)) for c in max_cones),
        )

    @property
    def m(self) -> int:
        return len(self.rays)

    def cone_matrix(self, cone: Sequence[int]) -> list[list[int]]:
        """n x k matrix whose columns are the rays of ``cone``."""
        return [[self.rays[i][k] for i in cone] for k in range(self.n)]

    def ray_matrix(self) -> list[list[int]]:
        return self.cone_matrix(range(self.m))

    def is_face(self, subset) -> bool:
        s = set(subset)
        return any(s <= set(c) for c in self.max_cones)


@dataclass
class FanReport:
    smooth: bool
    complete: bool
    projective: bool
    diagnostics: list[str] = field(default_factory=list)


class FanoType(enum.Enum):
    FANO = "Fano"
    WEAK_FANO = "WeakFano"
    NEITHER = "Neither"


@dataclass(frozen=True)
class ExactSequenceData:
    """Matrices realizing 0 -> L -> Z^m -> N -> 0 in a nef basis.

    ``M`` is m x r with columns the basis of L dual to the nef basis p_1..p_r,
    so row i of ``M`` holds the coordinates of [D_i]. ``G`` is the
    non-negative section with ``G^T M = 1``.
    """

    fan: FanData
    A: tuple[tuple[int, ...], ...]
    M: tuple[tuple[int, ...], ...]
    G: tuple[tuple[int, ...], ...]
    rho: tuple[int, ...]

    @property
    def n(self) -> int:
        return self.fan.n

    @property
    def m(self) -> int:
        return self.fan.m

    @property
    def r(self) -> int:
        return len(self.rho)

    @property
    def euler_weights(self) -> tuple[int, ...]:
        return self.rho

    @property
    def divisor_classes(self) -> tuple[tuple[int, ...], ...]:
        return self.M

    def degrees(self, l: Sequence[int]) -> tuple[int, ...]:
        """p_a(l) for a relation l, computed as G^T l."""
        return tuple(sum(self.G[i][a] * l[i] for i in range(self.m)) for a in range(self.r))

    def relation(self, c: Sequence[int]) -> tuple[int, ...]:
        """The element of L with nef degrees ``c``."""
        return tuple(sum(self.M[i][a] * c[a] for a in range(self.r)) for i in range(self.m))


@dataclass(frozen=True)
class PrimitiveRelation:
    collection: tuple[int, ...]
    relation: tuple[int, ...]
    nef_degrees: tuple[int, ...]
    anticanonical_degree: int


@dataclass
class MoriNefCones:
    wall_classes: list[tuple[int, ...]]
    mori_generators: list[tuple[int, ...]]
    nef_generators: list[tuple[int, ...]]
    basis_generates_nef: bool
    double_dual: bool


@dataclass
class SemigroupReport:
    positive: bool
    normal_up_to_K: bool
    gorenstein_up_to_K: bool
    bound: int
    points_checked: int
    counterexamples: list[dict] = field(default_factory=list)


# ---------------------------------------------------------------- validation

def _walls(fan: FanData) -> dict[tuple[int, ...], list[tuple[int, ...]]]:
    out: dict[tuple[int, ...], list[tuple[int, ...]]] = {}
    for cone in fan.max_cones:
        for wall in itertools.combinations(cone, fan.n - 1):
            out.setdefault(wall, []).append(cone)
    return out


def _coords_in_cone(fan: FanData, cone, x) -> list[Fraction]:
    return linalg.solve(fan.cone_matrix(cone), [Fraction(v) for v in x])


def wall_relations(fan: FanData) -> list[tuple[tuple[int, ...], tuple[int, ...]]]:
    """For each wall, the relation a_u + a_v = sum c_k a_k of its two cones.

    Returned as ``(wall, l)`` with l_u = l_v = 1 on the opposite rays.
    Raises :class:`NotAFan` if the two cones lie on the same side.
    """
    out = []
    for wall, cones in sorted(_walls(fan).items()):
        if len(cones) != 2:
            continue
        sigma, tau = cones
        (u,) = set(sigma) - set(wall)
        (v,) = set(tau) - set(wall)
        coeffs = _coords_in_cone(fan, sigma, fan.rays[v])
        b = dict(zip(sigma, coeffs))
        if b[u] >= 0:
            raise errors.NotAFan(
                f"cones {_one_based(sigma)} and {_one_based(tau)} lie on the same side "
                f"of wall {_one_based(wall)}", witness={"wall": _one_based(wall)})
        scale = -1 / b[u]
        l = [Fraction(0)] * fan.m
        l[u] = Fraction(1)
        l[v] += scale
        for k in wall:
            l[k] -= scale * b[k]
        # l is a rational multiple of the wall relation; smoothness makes it integral
        out.append((wall, tuple(linalg.primitive(l))))
    return out


def _one_based(idx) -> list[int]:
    return [i + 1 for i in idx]


def check_fan(fan: FanData) -> FanReport:
    """Check all fan invariants without raising; failures go to ``diagnostics``."""
    rep = FanReport(smooth=True, complete=True, projective=True)
    try:
        validate_fan(fan)
    except errors.NonPrimitiveRay as exc:
        rep.smooth = rep.complete = rep.projective = False
        rep.diagnostics.append(str(exc))
    except errors.NonSmoothCone as exc:
        rep.smooth = rep.complete = rep.projective = False
        rep.diagnostics.append(str(exc))
    except (errors.NotComplete, errors.NotAFan) as exc:
        rep.complete = rep.projective = False
        rep.diagnostics.append(str(exc))
    except errors.NotProjective as exc:
        rep.projective = False
        rep.diagnostics.append(str(exc))
    return rep


def validate_fan(fan: FanData) -> FanReport:
    """Validate a smooth complete projective fan, raising on the first defect."""
    if not fan.rays:
        raise errors.SchemaError("rays must be nonempty")
    for i, ray in enumerate(fan.rays):
        if len(ray) != fan.n:
            raise errors.SchemaError(f"ray {i + 1} has length {len(ray)}, expected {fan.n}")
        if math.gcd(*ray) != 1:
            raise errors.NonPrimitiveRay(f"ray {i + 1} = {list(ray)} is not primitive",
                                         witness={"ray": i + 1})
    if len(set(fan.rays)) != fan.m:
        raise errors.NonPrimitiveRay("rays are not pairwise distinct")
    for cone in fan.max_cones:
        if any(not 0 <= i < fan.m for i in cone):
            raise errors.SchemaError(f"cone {_one_based(cone)} has an index out of range")
        if len(set(cone)) != fan.n:
            raise errors.NonSmoothCone(f"cone {_one_based(cone)} does not have {fan.n} rays",
                                       witness={"cone": _one_based(cone)})
        if abs(linalg.det(fan.cone_matrix(cone))) != 1:
            raise errors.NonSmoothCone(f"cone {_one_based(cone)} is not unimodular",
                                       witness={"cone": _one_based(cone)})
    if len(set(fan.max_cones)) != len(fan.max_cones):
        raise errors.NotAFan("repeated maximal cone")
    for wall, cones in sorted(_walls(fan).items()):
        if len(cones) != 2:
            raise errors.NotComplete(
                f"wall {_one_based(wall)} lies in {len(cones)} maximal cone(s), expected 2",
                witness={"wall": _one_based(wall), "cones": [_one_based(c) for c in cones]})
    # interiors must be disjoint: the barycenter of each cone avoids every other cone
    for sigma in fan.max_cones:
        x = [sum(fan.rays[i][k] for i in sigma) for k in range(fan.n)]
        for tau in fan.max_cones:
            if tau != sigma and all(c >= 0 for c in _coords_in_cone(fan, tau, x)):
                raise errors.NotAFan(
                    f"cones {_one_based(sigma)} and {_one_based(tau)} overlap",
                    witness={"cones": [_one_based(sigma), _one_based(tau)]})
    rels = [l for _, l in wall_relations(fan)]
    if not _is_projective(fan, rels):
        raise errors.NotProjective("no strictly convex support function exists")
    return FanReport(smooth=True, complete=True, projective=True)


def _kernel_coords(M0, l) -> list[Fraction]:
    """Coordinates of l in the column basis M0 (l must lie in their span)."""
    r = len(M0[0])
    aug = [list(row) + [li] for row, li in zip(M0, l)]
    rows, piv = linalg.rref(aug, col_order=range(r + 1))
    if r in piv:
        raise errors.NotARelation(f"{list(l)} is not in the relation lattice")
    out = [Fraction(0)] * r
    for row, p in zip(rows, piv):
        out[p] = row[r]
    return out


def _is_projective(fan: FanData, rels) -> bool:
    """A strictly convex support function exists iff a functional on L is
    strictly positive on every wall relation."""
    M0 = linalg.integer_kernel_basis(fan.ray_matrix())
    r = len(M0)
    if r == 0:
        return True
    M0 = linalg.transpose(M0)
    coords = [_kernel_coords(M0, l) for l in rels]
    try:
        normals = linalg.dual_cone(coords, r)
    except ValueError:
        return False
    if not normals:
        return False
    h = [sum(col) for col in zip(*normals)]
    return all(linalg.dot(h, c) > 0 for c in coords)


# ---------------------------------------------------------------- Fano type

def support_functionals(fan: FanData) -> dict[tuple[int, ...], list[Fraction]]:
    """For each maximal cone, the functional m with m(a_i) = 1 on its rays."""
    out = {}
    for cone in fan.max_cones:
        bt = linalg.transpose(fan.cone_matrix(cone))
        out[cone] = linalg.solve(bt, [Fraction(1)] * fan.n)
    return out


def classify_fano(fan: FanData) -> FanoType:
    weak = True
    strict = True
    for cone, mfun in support_functionals(fan).items():
        for j, ray in enumerate(fan.rays):
            if j in cone:
                continue
            val = linalg.dot(mfun, ray)
            if val > 1:
                weak = False
            if val >= 1:
                strict = False
    if strict:
        return FanoType.FANO
    if weak:
        return FanoType.WEAK_FANO
    return FanoType.NEITHER


# ---------------------------------------------------------------- exact sequence

def exact_sequence(fan: FanData, nef_basis: Sequence[Sequence[int]] | None = None
                   ) -> ExactSequenceData:
    """Kernel basis dual to a nef basis, anticanonical weights and section g.

    ``nef_basis`` (optional) lists each p_a as divisor coefficients
    (length-m integer vectors). Without it the extremal rays of the nef cone
    are used when they form a lattice basis; the resulting kernel columns are
    sorted in descending lexicographic order.
    """
    A = fan.ray_matrix()
    divs = linalg.elementary_divisors(A)
    if len(divs) < fan.n or any(d != 1 for d in divs):
        raise errors.RaysDoNotGenerateLattice(
            f"rays span a sublattice; elementary divisors {divs}", witness={"divisors": divs})
    M0 = linalg.transpose(linalg.integer_kernel_basis(A))
    r = fan.m - fan.n
    rho0 = [sum(M0[i][a] for i in range(fan.m)) for a in range(r)]
    mori = [_kernel_coords(M0, l) for _, l in wall_relations(fan)]

    def is_nef(y):
        return all(linalg.dot(y, c) >= 0 for c in mori)

    if nef_basis is not None:
        U = [list(map(int, row)) for row in nef_basis]
        if len(U) != r or any(len(row) != fan.m for row in U):
            raise errors.NefBasisInvalid(f"nef_basis must be {r} vectors of length {fan.m}")
        Y = linalg.matmul(U, M0)
        for a, y in enumerate(Y):
            if not is_nef(y):
                raise errors.NefBasisInvalid(f"p_{a + 1} is not nef", witness={"index": a + 1})
        if abs(linalg.det(Y)) != 1:
            raise errors.NefBasisInvalid("nef_basis is not a lattice basis of Pic")
        sort_columns = False
    else:
        Y = linalg.dual_cone(mori, r)
        if len(Y) != r or abs(linalg.det(Y)) != 1:
            raise errors.NefBasisRequired(
                f"nef cone has {len(Y)} extremal rays; supply nef_basis",
                witness={"nef_rays": [list(y) for y in Y]})
        sort_columns = True
    t = linalg.solve(linalg.transpose(Y), rho0)
    if any(x < 0 for x in t):
        raise errors.NefBasisInvalid("anticanonical class is not in the cone of the nef basis",
                                     witness={"rho_coords": [str(x) for x in t]})
    Yinv = linalg.inverse(Y)
    M = [[int(x) for x in row] for row in linalg.matmul(M0, Yinv)]
    if sort_columns:
        cols = sorted(linalg.transpose(M), reverse=True)
        M = linalg.transpose(cols)
    rho = tuple(sum(M[i][a] for i in range(fan.m)) for a in range(r))
    G = _nonnegative_section(fan, M)
    return ExactSequenceData(
        fan=fan,
        A=tuple(tuple(row) for row in A),
        M=tuple(tuple(row) for row in M),
        G=tuple(tuple(row) for row in G),
        rho=rho,
    )


def _nonnegative_section(fan: FanData, M) -> list[list[int]]:
    """Express each p_a through {[D_i] : i not in sigma} with non-negative
    coefficients, trying maximal cones in order."""
    r = len(M[0])
    G = [[0] * r for _ in range(fan.m)]
    for a in range(r):
        target = [Fraction(int(b == a)) for b in range(r)]
        for cone in fan.max_cones:
            rest = [i for i in range(fan.m) if i not in cone]
            mat = [[M[i][b] for i in rest] for b in range(r)]
            coeffs = linalg.solve(mat, target)
            if all(c >= 0 and c.denominator == 1 for c in coeffs):
                for i, c in zip(rest, coeffs):
                    G[i][a] = int(c)
                break
        else:
            raise errors.NoNonnegativeSection(f"no cone gives a non-negative section for p_{a + 1}",
                                              witness={"index": a + 1})
    return G


# ---------------------------------------------------------------- primitive relations

def primitive_collections(fan: FanData) -> list[tuple[int, ...]]:
    out = []
    for size in range(2, fan.n + 2):
        for subset in itertools.combinations(range(fan.m), size):
            if fan.is_face(subset):
                continue
            if all(fan.is_face(sub) for sub in itertools.combinations(subset, size - 1)):
                out.append(subset)
    return out


def primitive_relations(fan: FanData, esd: ExactSequenceData) -> list[PrimitiveRelation]:
    out = []
    for coll in primitive_collections(fan):
        s = [sum(fan.rays[i][k] for i in coll) for k in range(fan.n)]
        for cone in fan.max_cones:
            c = _coords_in_cone(fan, cone, s)
            if all(x >= 0 for x in c):
                break
        else:  # pragma: no cover - impossible for complete fans
            raise errors.NotComplete(f"sum over {_one_based(coll)} lies in no cone")
        l = [0] * fan.m
        for i in coll:
            l[i] += 1
        for i, x in zip(cone, c):
            l[i] -= int(x)
        l = tuple(l)
        out.append(PrimitiveRelation(
            collection=coll,
            relation=l,
            nef_degrees=esd.degrees(l),
            anticanonical_degree=sum(l),
        ))
    return out


# ---------------------------------------------------------------- Mori and nef cones

def mori_nef_cones(fan: FanData, esd: ExactSequenceData) -> MoriNefCones:
    walls = sorted({l for _, l in wall_relations(fan)}, reverse=True)
    r = esd.r
    coords = [esd.degrees(l) for l in walls]
    nef = linalg.dual_cone(coords, r)
    # extremal wall classes: those on r-1 independent facets
    extremal = []
    for l, c in zip(walls, coords):
        tight = [h for h in nef if linalg.dot(h, c) == 0]
        if r == 1 or (tight and linalg.rank(tight) == r - 1):
            if l not in extremal:
                extremal.append(l)
    mori_dual_dual = linalg.dual_cone(nef, r)
    prim = {tuple(linalg.primitive(c)) for c in coords}
    double_dual = (
        sorted(map(tuple, linalg.dual_cone(mori_dual_dual, r))) == sorted(map(tuple, nef))
        and all(linalg.in_cone(c, nef) for c in coords)
        and all(tuple(g) in prim for g in mori_dual_dual)
    )
    basis_ok = all(x >= 0 for y in nef for x in y)
    for a in range(r):
        unit = [int(a == b) for b in range(r)]
        if any(linalg.dot(unit, c) < 0 for c in coords):
            raise errors.NefBasisInvalid(f"p_{a + 1} is negative on a Mori generator")
    return MoriNefCones(
        wall_classes=walls,
        mori_generators=extremal,
        nef_generators=[tuple(y) for y in nef],
        basis_generates_nef=basis_ok,
        double_dual=double_dual,
    )


# ---------------------------------------------------------------- semigroup

def _slice_points(fan: FanData, x0: int):
    bound = [x0 * max(abs(ray[k]) for ray in fan.rays) for k in range(fan.n)]
    return itertools.product(*[range(-b, b + 1) for b in bound])


def semigroup_report(fan: FanData, bound: int, strict: bool = False) -> SemigroupReport:
    """Bounded-slab evidence for normality, positivity and the Gorenstein
    property of the semigroup generated by (1,0) and (1, a_i)."""
    ext = [(1,) + (0,) * fan.n] + [(1,) + tuple(ray) for ray in fan.rays]
    facets = linalg.dual_cone(ext, fan.n + 1)

    def in_cone(x):
        return all(linalg.dot(h, x) >= 0 for h in facets)

    def interior(x):
        return all(linalg.dot(h, x) > 0 for h in facets)

    def decompose(x):
        """Certificate x = lam0 (1,0) + sum c_i (1,a_i) from the cone decomposition."""
        y = x[1:]
        for cone in fan.max_cones:
            c = _coords_in_cone(fan, cone, y)
            if all(v >= 0 for v in c):
                lam0 = x[0] - sum(c)
                if lam0 >= 0 and all(v.denominator == 1 for v in c):
                    return int(lam0), {i + 1: int(v) for i, v in zip(cone, c) if v}
        return None

    positive = all(g[0] > 0 for g in ext)
    normal = gorenstein = True
    bad: list[dict] = []
    checked = 0
    for x0 in range(bound + 1):
        for y in _slice_points(fan, x0):
            x = (x0,) + tuple(y)
            if not in_cone(x):
                continue
            checked += 1
            cert = decompose(x)
            if cert is None:
                normal = False
                bad.append({"point": list(x), "property": "normal"})
                continue
            lam0, coeffs = cert
            is_int = interior(x)
            shifted = (x0 - 1,) + tuple(y)
            if is_int != (lam0 > 0) or (is_int and decompose(shifted) is None):
                gorenstein = False
                bad.append({"point": list(x), "property": "gorenstein",
                            "certificate": {"lambda0": lam0, "coefficients": coeffs}})
            if x0 < bound and not interior((x0 + 1,) + tuple(y)):
                gorenstein = False
                bad.append({"point": list(x), "property": "gorenstein-shift"})
    if not positive:
        bad.append({"point": [0] * (fan.n + 1), "property": "positive"})
    rep = SemigroupReport(positive, normal, gorenstein, bound, checked, bad)
    if strict and bad:
        raise errors.CounterexamplePoint(f"semigroup property fails at {bad[0]['point']}",
                                         witness=bad[0])
    return rep


# ---------------------------------------------------------------- volume

def convex_hull_volume(fan: FanData) -> int:
    """n! vol Conv(a_1..a_m), using a triangulated hull and exact determinants."""
    if fan.n == 1:
        xs = [ray[0] for ray in fan.rays]
        return max(xs) - min(xs)
    import numpy as np
    from scipy.spatial import ConvexHull

    pts = np.array(fan.rays, dtype=float)
    hull = ConvexHull(pts, qhull_options="Qt")
    total = Fraction(0)
    for simplex in hull.simplices:
        total += abs(linalg.det([list(fan.rays[i]) for i in simplex]))
    return int(total)


def normalized_volume(fan: FanData) -> int:
    """Number of maximal cones, checked against n! vol of the ray polytope."""
    mu = len(fan.max_cones)
    unit = sum(abs(linalg.det(fan.cone_matrix(c))) for c in fan.max_cones)
    hull = convex_hull_volume(fan)
    if unit != mu or hull != mu:
        raise errors.VolumeMismatch(
            f"|Sigma(n)| = {mu}, unit simplices = {unit}, hull volume = {hull}",
            witness={"cones": mu, "unit_simplices": int(unit), "hull": hull})
    return mu
