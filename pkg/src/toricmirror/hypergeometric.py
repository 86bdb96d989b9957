"""The cohomology-valued hypergeometric series, its operator checks and the mirror map."""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from . import errors, linalg
from .cohomology import AlgebraElement, GradedAlgebra
from .fan import ExactSequenceData
from .gkz import WeylOperator
from .series import LogLaurentSeries, _accumulate, compose, exp_nilpotent, scalar_part

ZPoly = dict  # {z exponent: AlgebraElement}


@dataclass(frozen=True)
class BoxPoint:
    c: tuple[int, ...]  # q-exponent p(l)
    l: tuple[int, ...]
    effective: bool


def enumerate_effective_box(esd: ExactSequenceData, nef_generators: Sequence[Sequence[int]],
                            N: int, negative: bool = False) -> list[BoxPoint]:
    """Relations l with p_a(l) in [0, N] (or [-N, N] when ``negative``), flagged by effectivity.

    l is effective when it pairs non-negatively with every nef generator
    (given in p-coordinates).
    """
    lo = -N if negative else 0
    out = []
    for c in itertools.product(range(lo, N + 1), repeat=esd.r):
        eff = all(linalg.dot(y, c) >= 0 for y in nef_generators)
        out.append(BoxPoint(tuple(c), esd.relation(c), eff))
    return out


# ---------------------------------------------------------------- z-polynomials with class coefficients

def _zmul(a: ZPoly, b: ZPoly) -> ZPoly:
    out: dict = {}
    for j1, x in a.items():
        for j2, y in b.items():
            _accumulate(out, j1 + j2, x * y)
    return out


def _inverse_linear(ga: GradedAlgebra, D: AlgebraElement, nu: int, with_z: bool) -> ZPoly:
    """(D + nu z)^{-1} (or (D + nu)^{-1}) expanded by nilpotency of D."""
    out: dict = {}
    Dk = ga.one()
    for k in range(ga.n + 1):
        coeff = Fraction((-1) ** k, nu ** (k + 1))
        _accumulate(out, -k - 1 if with_z else 0, Dk * coeff)
        Dk = Dk * D
    return out


def _ratio(ga: GradedAlgebra, D: AlgebraElement, l: int, with_z: bool) -> ZPoly:
    out: ZPoly = {0: ga.one()}
    if l >= 0:
        for nu in range(1, l + 1):
            out = _zmul(out, _inverse_linear(ga, D, nu, with_z))
    else:
        for nu in range(l + 1, 1):
            factor: dict = {}
            _accumulate(factor, 0, D)
            if nu:
                if with_z:
                    _accumulate(factor, 1, ga.scalar(nu))
                else:
                    _accumulate(factor, 0, ga.scalar(nu))
            out = _zmul(out, factor)
    return out


def summand(esd: ExactSequenceData, ga: GradedAlgebra, l: Sequence[int], with_z: bool = True
            ) -> ZPoly:
    """prod_i ratio_i(l_i) as a Laurent polynomial in z (without the q-power)."""
    out: ZPoly = {0: ga.one()}
    for i, li in enumerate(l):
        out = _zmul(out, _ratio(ga, ga.divisor(i), li, with_z))
        if not out:
            break
    return out


def delta_series(ga: GradedAlgebra, N: int, scale_z: int = 0) -> LogLaurentSeries:
    """sum_a log q_a p_a, times z^scale_z."""
    r = ga.r
    out = LogLaurentSeries.zero(r, N)
    for a in range(r):
        out = out + LogLaurentSeries.monomial(r, N, ga.generator(a), j=scale_z,
                                              alpha=[int(b == a) for b in range(r)])
    return out


def log_free_part(esd: ExactSequenceData, ga: GradedAlgebra, N: int) -> LogLaurentSeries:
    """G = exp(-delta/z) I = sum_{c in [0,N]^r} q^c prod_i ratio_i(l_i)."""
    r = esd.r
    coeffs = {}
    zero = (0,) * r
    for c in itertools.product(range(N + 1), repeat=r):
        for j, v in summand(esd, ga, esd.relation(c)).items():
            if v:
                coeffs[(tuple(c), j, zero, 0)] = v
    return LogLaurentSeries(r, N, coeffs)


def build_I(esd: ExactSequenceData, ga: GradedAlgebra, N: int) -> LogLaurentSeries:
    return exp_nilpotent(delta_series(ga, N, -1)) * log_free_part(esd, ga, N)


def build_I_tilde(esd: ExactSequenceData, ga: GradedAlgebra, N: int) -> LogLaurentSeries:
    """exp(delta) exp(-log z * rho) sum_l q^p(l) z^{-rho(l)} prod_i h_i(l_i)."""
    r = esd.r
    zero = (0,) * r
    coeffs: dict = {}
    for c in itertools.product(range(N + 1), repeat=r):
        l = esd.relation(c)
        vals = summand(esd, ga, l, with_z=False)
        if vals:
            _accumulate(coeffs, (tuple(c), -sum(l), zero, 0), vals[0])
    body = LogLaurentSeries(r, N, coeffs)
    rho = ga.linear_class(esd.euler_weights)
    twist = exp_nilpotent(LogLaurentSeries.monomial(r, N, -rho, beta=1))
    return exp_nilpotent(delta_series(ga, N)) * twist * body


def grading_twist(ga: GradedAlgebra, series: LogLaurentSeries) -> LogLaurentSeries:
    """Apply z^mu: a degree-k class picks up z^k."""
    out: dict = {}
    for (e, j, al, b), v in series.coeffs.items():
        for d in v.support_degrees():
            _accumulate(out, (e, j + d, al, b), v.component(d))
    return LogLaurentSeries(series.r, series.N, out)


@dataclass
class AnnihilationResult:
    passed: bool
    residual: tuple | None
    safe_q_order: int


def check_annihilation(op: WeylOperator, s: LogLaurentSeries) -> AnnihilationResult:
    safe = s.N - op.max_q_shift()
    image = op.apply(s)
    bad = sorted(k for k in image.coeffs if all(x <= safe for x in k[0]))
    return AnnihilationResult(passed=not bad, residual=bad[-1] if bad else None, safe_q_order=safe)


def non_effective_vanishing(esd: ExactSequenceData, ga: GradedAlgebra,
                            nef_generators: Sequence[Sequence[int]], N: int) -> list[tuple]:
    """Box points (negative directions included) outside the Mori cone with nonzero summand."""
    bad = []
    for pt in enumerate_effective_box(esd, nef_generators, N, negative=True):
        if not pt.effective and summand(esd, ga, pt.l):
            bad.append(pt.c)
    return bad


# ---------------------------------------------------------------- mirror map

@dataclass
class MirrorMap:
    gamma: LogLaurentSeries  # z^{-1} coefficient of the log-free part, class valued
    gamma_prime: list[LogLaurentSeries]  # scalar series, one per p_a
    kappa: list[LogLaurentSeries]

    @property
    def is_identity(self) -> bool:
        return all(g.is_zero() for g in self.gamma_prime)


def mirror_map(esd: ExactSequenceData, ga: GradedAlgebra, N: int,
               G: LogLaurentSeries | None = None) -> MirrorMap:
    r = esd.r
    if G is None:
        G = log_free_part(esd, ga, N)
    gamma = G.z_coefficient(-1)
    degree_one = [ga.index[tuple(int(b == a) for b in range(r))] for a in range(r)]
    parts: list[dict] = [dict() for _ in range(r)]
    for (e, _, _, _), v in gamma.items():
        if v.support_degrees() - {1}:
            raise errors.GammaNotDegreeOne(f"z^-1 coefficient at q^{e} has degrees "
                                           f"{sorted(v.support_degrees())}",
                                           witness={"q": list(e), "value": repr(v)})
        for a in range(r):
            c = v.coeffs[degree_one[a]]
            if c:
                parts[a][(e, 0, (0,) * r, 0)] = c
    gamma_prime = [LogLaurentSeries(r, N, p) for p in parts]
    kappa = [LogLaurentSeries.q(r, N, a) * exp_nilpotent(g) for a, g in enumerate(gamma_prime)]
    return MirrorMap(gamma=gamma, gamma_prime=gamma_prime, kappa=kappa)


def invert_map(kappa: Sequence[LogLaurentSeries]) -> list[LogLaurentSeries]:
    """Compositional inverse of q -> kappa(q) with kappa_a = q_a (1 + ...)."""
    r, N = kappa[0].r, kappa[0].N
    units = []
    for a, k in enumerate(kappa):
        coeffs = scalar_part(k)
        u = {}
        for e, c in coeffs.items():
            if e[a] == 0:
                raise errors.NotInvertible(f"kappa_{a + 1} is not divisible by q_{a + 1}")
            u[e[:a] + (e[a] - 1,) + e[a + 1:]] = c
        if u.get((0,) * r) != 1:
            raise errors.NotInvertible(f"kappa_{a + 1} does not start with q_{a + 1}")
        units.append(LogLaurentSeries(r, N, {(e, 0, (0,) * r, 0): c for e, c in u.items()}))
    inv_units = [_invert_unit(u) for u in units]
    Q = [LogLaurentSeries.q(r, N, a) for a in range(r)]
    q = list(Q)
    # q_a = Q_a / u_a(q(Q)); each pass fixes one more total order
    for _ in range(r * N + 1):
        new = [Q[a] * compose(inv_units[a], q) for a in range(r)]
        if all(x == y for x, y in zip(new, q)):
            break
        q = new
    return q


def _invert_unit(u: LogLaurentSeries) -> LogLaurentSeries:
    x = u - 1
    out = u._constant(1)
    term = u._constant(1)
    while True:
        term = term * (-x)
        if term.is_zero():
            return out
        out = out + term


def _log_unit(u: LogLaurentSeries) -> LogLaurentSeries:
    x = u - 1
    out = LogLaurentSeries.zero(u.r, u.N)
    term = u._constant(1)
    k = 0
    while True:
        k += 1
        term = term * x
        if term.is_zero():
            return out
        out = out + term * Fraction((-1) ** (k + 1), k)


def invert_and_substitute(target: LogLaurentSeries, kappa) -> LogLaurentSeries:
    """Rewrite target(q) in the coordinates Q = kappa(q).

    log q_a becomes log Q_a - log(kappa_a/q_a) evaluated at q(Q). ``kappa``
    is a MirrorMap or a list of series. A bare list only determines
    kappa_a/q_a below the top order in q_a, so if target carries logarithms
    the result is truncated to order N - 1.
    """
    if isinstance(kappa, MirrorMap):
        units = [exp_nilpotent(g) for g in kappa.gamma_prime]
        kappa = kappa.kappa
    else:
        units = None
    r, N = target.r, target.N
    q_of_Q = invert_map(kappa)
    has_logs = any(any(k[2]) for k in target.coeffs)
    if not has_logs:
        return compose(target, q_of_Q)
    if units is None:
        units = [_unit_of(k, a) for a, k in enumerate(kappa)]
        N = N - 1
        target = target.truncate(N)
        q_of_Q = [x.truncate(N) for x in q_of_Q]
    logs = [LogLaurentSeries.log_q(r, N, a) - _log_unit(compose(u.truncate(N), q_of_Q))
            for a, u in enumerate(units)]
    return compose(target, q_of_Q, logs)


def _unit_of(k: LogLaurentSeries, a: int) -> LogLaurentSeries:
    r = k.r
    return LogLaurentSeries(r, k.N, {(e[:a] + (e[a] - 1,) + e[a + 1:], j, al, b): c
                                     for (e, j, al, b), c in k.coeffs.items()})


def substitute_log_free(G: LogLaurentSeries, mm: MirrorMap, ga: GradedAlgebra) -> LogLaurentSeries:
    """exp(-delta_Q/z) J(Q) computed as exp(-gamma'/z) G evaluated at q(Q)."""
    q_of_Q = invert_map(mm.kappa)
    r, N = G.r, G.N
    gp = LogLaurentSeries.zero(r, N)
    for a, g in enumerate(mm.gamma_prime):
        gp = gp + g.shift_z(-1) * ga.generator(a)
    return compose(exp_nilpotent(-gp) * G, q_of_Q)


# ---------------------------------------------------------------- words

def divisor_word_series(ga: GradedAlgebra, esd: ExactSequenceData, G: LogLaurentSeries,
                        word: Sequence[int], allow_long: bool = False,
                        cache: dict | None = None) -> LogLaurentSeries:
    """G_{w.a} = p_a G_w + z q_a d/dq_a G_w starting from the log-free G_empty.

    Letters are 1-based. Since the letters commute the result only depends
    on the multiset; ``cache`` memoises on it.
    """
    if len(word) > ga.n and not allow_long:
        raise errors.WordTooLong(f"word {tuple(word)} is longer than {ga.n}",
                                 witness={"word": list(word)})
    key = tuple(sorted(word))
    if cache is not None and key in cache:
        return cache[key]
    if not key:
        out = G
    else:
        a = key[-1] - 1
        prev = divisor_word_series(ga, esd, G, key[:-1], True, cache)
        out = prev * ga.generator(a) + prev.theta(a)
    if cache is not None:
        cache[key] = out
    return out
