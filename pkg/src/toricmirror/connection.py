"""Connection matrices of the quantum D-module and their cross-checks.

Matrix entries are truncated power series ``{q exponent: Fraction}``; a
matrix acts on column vectors, column j being the image of basis vector j.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

from . import errors, linalg
from .cohomology import GradedAlgebra, poincare_pairing_matrix, structure_operators
from .fan import ExactSequenceData
from .gkz import BatyrevRing
from .hypergeometric import MirrorMap, divisor_word_series
from .series import LogLaurentSeries, compose, power_series, scalar_part

QSeries = dict  # {q exponent: Fraction}
QMatrix = list  # list of rows of QSeries


# ---------------------------------------------------------------- series matrices

def _add_into(target: dict, key, value) -> None:
    v = target.get(key, 0) + value
    if v:
        target[key] = v
    else:
        target.pop(key, None)


def smul(a: QSeries, b: QSeries, keep: Callable) -> QSeries:
    out: dict = {}
    for e1, x in a.items():
        for e2, y in b.items():
            e = tuple(s + t for s, t in zip(e1, e2))
            if keep(e):
                _add_into(out, e, x * y)
    return out


def madd(A: QMatrix, B: QMatrix, scale=1) -> QMatrix:
    out = []
    for ra, rb in zip(A, B):
        row = []
        for x, y in zip(ra, rb):
            s = dict(x)
            for e, c in y.items():
                _add_into(s, e, scale * c)
            row.append(s)
        out.append(row)
    return out


def mmul(A: QMatrix, B: QMatrix, keep: Callable) -> QMatrix:
    n, k, m = len(A), len(B), len(B[0]) if B else 0
    out = []
    for i in range(n):
        row = []
        for j in range(m):
            s: dict = {}
            for t in range(k):
                if A[i][t] and B[t][j]:
                    for e, c in smul(A[i][t], B[t][j], keep).items():
                        _add_into(s, e, c)
            row.append(s)
        out.append(row)
    return out


def constant(M: Sequence[Sequence], r: int) -> QMatrix:
    zero = (0,) * r
    return [[{zero: Fraction(x)} if x else {} for x in row] for row in M]


def at_zero(A: QMatrix, r: int) -> list[list[Fraction]]:
    zero = (0,) * r
    return [[x.get(zero, Fraction(0)) for x in row] for row in A]


def q_derivative(A: QMatrix, a: int) -> QMatrix:
    return [[{e: c * e[a] for e, c in x.items() if e[a]} for x in row] for row in A]


def restrict(A: QMatrix, keep: Callable) -> QMatrix:
    return [[{e: c for e, c in x.items() if keep(e)} for x in row] for row in A]


def first_difference(A: QMatrix, B: QMatrix, keep: Callable) -> tuple | None:
    for i, (ra, rb) in enumerate(zip(A, B)):
        for j, (x, y) in enumerate(zip(ra, rb)):
            for e in sorted(set(x) | set(y)):
                if keep(e) and x.get(e, 0) != y.get(e, 0):
                    return (i, j, e, x.get(e, 0), y.get(e, 0))
    return None


def minverse(A: QMatrix, r: int, keep: Callable, box: Sequence[tuple]) -> QMatrix:
    """Inverse of a series matrix with invertible constant term."""
    n = len(A)
    zero = (0,) * r
    A0inv = linalg.inverse(at_zero(A, r))
    out = [[dict() for _ in range(n)] for _ in range(n)]
    for e in box:
        # sum_{e' <= e} A_{e-e'} X_{e'} = delta_{e,0}
        rhs = [[Fraction(int(i == j and e == zero)) for j in range(n)] for i in range(n)]
        for e2 in box:
            if e2 == e or any(x > y for x, y in zip(e2, e)):
                continue
            d = tuple(y - x for x, y in zip(e2, e))
            for i in range(n):
                for j in range(n):
                    s = sum((A[i][t].get(d, 0) * out[t][j].get(e2, 0) for t in range(n)), Fraction(0))
                    rhs[i][j] -= s
        X = linalg.matmul(A0inv, rhs)
        for i in range(n):
            for j in range(n):
                if X[i][j]:
                    out[i][j][e] = X[i][j]
    return restrict(out, keep)


def box_points(r: int, N: int) -> list[tuple[int, ...]]:
    return sorted(itertools.product(range(N + 1), repeat=r), key=lambda e: (sum(e), e))


def in_box(N: int) -> Callable:
    return lambda e: all(0 <= x <= N for x in e)


def qmatrix_to_json(A: QMatrix) -> list:
    return [[{",".join(map(str, e)): f"{c.numerator}/{c.denominator}" for e, c in sorted(x.items())}
             for x in row] for row in A]


def qmatrix_to_text(A: QMatrix) -> list[list[str]]:
    out = []
    for row in A:
        cells = []
        for x in row:
            parts = []
            for e, c in sorted(x.items()):
                mono = "*".join(f"q{a + 1}" if k == 1 else f"q{a + 1}^{k}" for a, k in enumerate(e) if k)
                if not mono:
                    parts.append(str(c))
                elif c == 1:
                    parts.append(mono)
                else:
                    parts.append(f"{c}*{mono}")
            cells.append(" + ".join(parts) if parts else "0")
        out.append(cells)
    return out


# ---------------------------------------------------------------- data

@dataclass
class ConnectionData:
    basis_labels: list[str]
    A0: list[list[Fraction]]
    Ainf: list[list[Fraction]]
    Omega: list[QMatrix]
    pairing: list[list[Fraction]]
    r: int
    N: int
    euler_weights: tuple[int, ...]
    n: int

    def keep(self, e) -> bool:
        return all(0 <= x <= self.N for x in e)


def _commutator_const(X, Y):
    return [[a - b for a, b in zip(r1, r2)]
            for r1, r2 in zip(linalg.matmul(X, Y), linalg.matmul(Y, X))]


def origin_connection(ga: GradedAlgebra, esd: ExactSequenceData):
    ops = structure_operators(ga, esd)
    A0 = [[-x for x in row] for row in ops.C1]
    Ainf = ops.MU
    if _commutator_const(Ainf, A0) != A0:
        raise errors.Mismatch("[Ainf, A0] != A0")
    return A0, Ainf


# ---------------------------------------------------------------- extraction

def default_words(ga: GradedAlgebra) -> list[tuple[int, ...]]:
    """One theta-word per basis monomial, letters 1-based and sorted."""
    return [tuple(a + 1 for a, k in enumerate(e) for _ in range(k)) for e in ga.basis]


@dataclass
class Extraction:
    words: list[tuple[int, ...]]
    Omega: list[QMatrix]  # cohomology frame
    Y0: list[list[Fraction]]  # word matrix at q = 0
    Y: dict  # {q exponent: {z exponent < 0: matrix}}, the z^{-1}-adic factor
    R: dict  # {q exponent: {z exponent >= 0: matrix}}, the polynomial factor
    residuals: list[dict] = field(default_factory=list)
    N: int = 0

    @property
    def z_free(self) -> bool:
        return not self.residuals


def _vector_blocks(ga: GradedAlgebra, s: LogLaurentSeries) -> dict:
    """{q exponent: {z exponent: coefficient tuple}} for a log-free class-valued series."""
    out: dict = {}
    for (e, j, al, b), v in s.coeffs.items():
        if any(al) or b:
            raise ValueError("word series must be log free")
        out.setdefault(e, {})[j] = v.coeffs
    return out


def _zeros(dim: int) -> list[list[Fraction]]:
    return [[Fraction(0)] * dim for _ in range(dim)]


def _sub_into(target: dict, j: int, M, dim: int) -> None:
    T = target.setdefault(j, _zeros(dim))
    for i in range(dim):
        for k in range(dim):
            T[i][k] -= M[i][k]


def _nonzero(M) -> bool:
    return any(x for row in M for x in row)


def birkhoff_extract(ga: GradedAlgebra, esd: ExactSequenceData, G: LogLaurentSeries,
                     words: Sequence[Sequence[int]] | None = None,
                     strict: bool = True) -> Extraction:
    """Factor the word matrix C = Y R and read off Omega_a = Y^{-1} (p_a + z q_a d/dq_a) Y.

    C has the cohomology coordinates of G_w as columns. Y = 1 + O(1/z) and
    R is polynomial in z; both are determined q-order by q-order. Omega_a
    must be free of z. With ``strict`` a z-dependent coefficient raises
    ZResidual, otherwise it is recorded and the z^0 part is kept.
    """
    r, N, dim = ga.r, G.N, ga.dim
    words = [tuple(w) for w in (words if words is not None else default_words(ga))]
    if len(words) != dim:
        raise errors.WordBasisSingular(f"need {dim} words, got {len(words)}")
    cache: dict = {}
    cols = [_vector_blocks(ga, divisor_word_series(ga, esd, G, w, True, cache)) for w in words]
    zero = (0,) * r
    pts = box_points(r, N)

    def block(e) -> dict:
        out: dict = {}
        for k, col in enumerate(cols):
            for j, vec in col.get(e, {}).items():
                M = out.setdefault(j, _zeros(dim))
                for i in range(dim):
                    M[i][k] = vec[i]
        return out

    C = {e: block(e) for e in pts}
    C0 = C[zero].get(0)
    if C0 is None or set(C[zero]) != {0} or linalg.det(C0) == 0:
        raise errors.WordBasisSingular("word series do not give a basis at q = 0",
                                       witness={"words": [list(w) for w in words]})
    C0inv = linalg.inverse(C0)
    ident = linalg.identity(dim)
    Y: dict = {zero: {0: ident}}
    R: dict = {zero: {0: C0}}
    for e in pts[1:]:
        X = {j: [row[:] for row in M] for j, M in C[e].items()}
        for e1 in pts:
            if e1 == zero or e1 == e or e1 not in Y or any(x > y for x, y in zip(e1, e)):
                continue
            e2 = tuple(y - x for x, y in zip(e1, e))
            for j1, A in Y[e1].items():
                for j2, B in R[e2].items():
                    _sub_into(X, j1 + j2, linalg.matmul(A, B), dim)
        R[e] = {j: M for j, M in X.items() if j >= 0 and _nonzero(M)}
        Y[e] = {j: linalg.matmul(M, C0inv) for j, M in X.items() if j < 0 and _nonzero(M)}

    residuals = []
    omegas = []
    P = [ga.cup_matrix(ga.generator(a)) for a in range(r)]
    for a in range(r):
        coeffs: dict = {zero: P[a]}
        for e in pts[1:]:
            rhs: dict = {}
            for j, M in Y[e].items():
                _sub_into(rhs, j, [[-x for x in row] for row in linalg.matmul(P[a], M)], dim)
                if e[a]:
                    _sub_into(rhs, j + 1, [[-e[a] * x for x in row] for row in M], dim)
            for e1 in pts:
                if e1 == zero or e1 not in Y or any(x > y for x, y in zip(e1, e)):
                    continue
                e2 = tuple(y - x for x, y in zip(e1, e))
                if e2 not in coeffs:
                    continue
                for j, M in Y[e1].items():
                    _sub_into(rhs, j, linalg.matmul(M, coeffs[e2]), dim)
            for j in sorted(rhs):
                if j != 0 and _nonzero(rhs[j]):
                    residuals.append({"a": a + 1, "q": list(e), "z": j})
                    if strict:
                        raise errors.ZResidual(
                            f"connection matrix for p_{a + 1} has a z^{j} term at q^{list(e)}",
                            witness={"a": a + 1, "q": list(e), "z": j})
            coeffs[e] = rhs.get(0, _zeros(dim))
        omegas.append([[{e: M[i][k] for e, M in coeffs.items() if M[i][k]} for k in range(dim)]
                       for i in range(dim)])
    return Extraction(words=words, Omega=omegas, Y0=C0, Y=Y, R=R, residuals=residuals, N=N)


def connection_data(ga: GradedAlgebra, esd: ExactSequenceData, ex: Extraction) -> ConnectionData:
    A0, Ainf = origin_connection(ga, esd)
    labels = ["".join(f"p{a + 1}" if k == 1 else f"p{a + 1}^{k}" for a, k in enumerate(e) if k) or "1"
              for e in ga.basis]
    return ConnectionData(basis_labels=labels, A0=A0, Ainf=Ainf,
                          Omega=ex.Omega, pairing=poincare_pairing_matrix(ga),
                          r=ga.r, N=ex.N, euler_weights=esd.euler_weights, n=ga.n)


# ---------------------------------------------------------------- reports

@dataclass
class Report:
    checks: dict[str, bool]
    witnesses: dict[str, object] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(self.checks.values())

    def __getitem__(self, key):
        return self.checks[key]


def flatness_report(cd: ConnectionData, esd: ExactSequenceData | None = None) -> Report:
    keep = cd.keep
    weights = esd.euler_weights if esd is not None else cd.euler_weights
    Om = cd.Omega
    r = len(Om)
    checks = {"commute": True, "potential": True, "euler": True}
    wit: dict = {}
    for a in range(r):
        for b in range(a + 1, r):
            d = first_difference(mmul(Om[a], Om[b], keep), mmul(Om[b], Om[a], keep), keep)
            if d is not None and checks["commute"]:
                checks["commute"] = False
                wit["commute"] = {"a": a + 1, "b": b + 1, "entry": str(d)}
            d = first_difference(q_derivative(Om[a], b), q_derivative(Om[b], a), keep)
            if d is not None and checks["potential"]:
                checks["potential"] = False
                wit["potential"] = {"a": a + 1, "b": b + 1, "entry": str(d)}
    Ainf = constant(cd.Ainf, r)
    for b in range(r):
        lhs = [[dict() for _ in row] for row in Om[b]]
        for a, k in enumerate(weights):
            if k:
                lhs = madd(lhs, q_derivative(Om[b], a), k)
        lhs = madd(lhs, mmul(Ainf, Om[b], keep))
        lhs = madd(lhs, mmul(Om[b], Ainf, keep), -1)
        d = first_difference(lhs, Om[b], keep)
        if d is not None and checks["euler"]:
            checks["euler"] = False
            wit["euler"] = {"b": b + 1, "entry": str(d)}
    return Report(checks, wit)


def pairing_report(ga: GradedAlgebra, cd: ConnectionData) -> Report:
    g = cd.pairing
    r = len(cd.Omega)
    keep = cd.keep
    G = constant(g, r)
    selfadjoint = True
    wit: dict = {}
    for a, Om in enumerate(cd.Omega):
        OmT = [list(col) for col in zip(*Om)]
        d = first_difference(mmul(OmT, G, keep), mmul(G, Om, keep), keep)
        if d is not None:
            selfadjoint = False
            wit.setdefault("selfadjoint", {"a": a + 1, "entry": str(d)})
    mu = [row[i] for i, row in enumerate(cd.Ainf)]
    n = ga.n
    mu_ok = all(mu[i] * g[i][j] + mu[j] * g[i][j] == n * g[i][j]
                for i in range(len(g)) for j in range(len(g)))
    deg = ga.degrees
    pole_ok = all(g[i][j] == 0 for i in range(len(g)) for j in range(len(g))
                  if deg[i] + deg[j] != n)
    return Report({"selfadjoint": selfadjoint, "mu_identity": mu_ok, "z_pole_order": pole_ok}, wit)


def residue_nilpotency(cd: ConnectionData) -> bool:
    for Om in cd.Omega:
        P = at_zero(Om, cd.r)
        X = linalg.identity(len(P))
        for _ in range(cd.n + 1):
            X = linalg.matmul(X, P)
        if any(x for row in X for x in row):
            return False
    return True


# ---------------------------------------------------------------- comparison

@dataclass
class Comparison:
    match: bool
    basis_change: QMatrix | None
    jacobian_twist: QMatrix | None
    witness: dict | None = None


def jacobian(mm: MirrorMap | None, r: int, N: int) -> QMatrix:
    """d log kappa_b / d log q_a, row a, column b."""
    zero = (0,) * r
    J = [[{zero: Fraction(1)} if a == b else {} for b in range(r)] for a in range(r)]
    if mm is None:
        return J
    for b, g in enumerate(mm.gamma_prime):
        part = scalar_part(g)
        for a in range(r):
            for e, c in part.items():
                if e[a]:
                    _add_into(J[a][b], e, c * e[a])
    return J


def _substitute_matrix(A: QMatrix, kappa: Sequence[LogLaurentSeries], r: int, N: int) -> QMatrix:
    out = []
    for row in A:
        new_row = []
        for x in row:
            if not x:
                new_row.append({})
                continue
            s = compose(power_series(r, N, x), list(kappa))
            new_row.append(scalar_part(s))
        out.append(new_row)
    return out


def compare_quantum_rings(batyrev: BatyrevRing, extracted: Sequence[QMatrix], r: int, N: int,
                          mm: MirrorMap | None = None, strict: bool = False) -> Comparison:
    """Check that p^e -> W^e e_0 intertwines the Batyrev matrices with W_a.

    W_a(q) = sum_b Jac_ab(q) Omega_b(kappa(q)); Omega is given in the flat
    coordinate, or in q itself when ``mm`` is None.
    """
    keep_box = in_box(N)
    if batyrev.mode == "q_truncated":
        bound = batyrev.N

        def keep(e):
            return keep_box(e) and sum(e) <= bound
    else:
        keep = keep_box
    dim = batyrev.dim
    if mm is not None and not mm.is_identity:
        Om = [_substitute_matrix(X, mm.kappa, r, N) for X in extracted]
    else:
        Om = [restrict(X, keep_box) for X in extracted]
    J = jacobian(mm, r, N)
    W = []
    for a in range(r):
        acc = [[dict() for _ in range(dim)] for _ in range(dim)]
        for b in range(r):
            if J[a][b]:
                scaled = [[smul(J[a][b], x, keep) for x in row] for row in Om[b]]
                acc = madd(acc, scaled)
        W.append(restrict(acc, keep))
    zero = (0,) * r
    T_cols = []
    for e in batyrev.basis:
        vec = [[{zero: Fraction(1)}] if i == 0 else [{}] for i in range(dim)]
        for a, k in enumerate(e):
            for _ in range(k):
                vec = mmul(W[a], vec, keep)
        T_cols.append([v[0] for v in vec])
    T = [[T_cols[j][i] for j in range(dim)] for i in range(dim)]
    if linalg.det(at_zero(T, r)) == 0:
        wit = {"reason": "basis change singular at q = 0"}
        if strict:
            raise errors.Mismatch("basis change is singular", witness=wit)
        return Comparison(False, T, J, wit)
    for a in range(r):
        lhs = mmul(T, batyrev.M[a], keep)
        rhs = mmul(W[a], T, keep)
        d = first_difference(lhs, rhs, keep)
        if d is not None:
            i, j, e, x, y = d
            wit = {"a": a + 1, "row": i, "col": j, "q": list(e),
                   "batyrev": str(x), "extracted": str(y)}
            if strict:
                raise errors.Mismatch(f"quantum rings differ for p_{a + 1} at q^{list(e)}",
                                      witness=wit)
            return Comparison(False, T, J, wit)
    return Comparison(True, T, J, None)
