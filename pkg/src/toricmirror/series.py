"""Truncated series in q_1..q_r, z^{+-1}, log q_a and log z with exact coefficients.

A key is ``(e, j, alpha, beta)`` standing for q^e z^j (log q)^alpha (log z)^beta.
Coefficients are Fractions or cohomology classes; anything supporting
``+``, ``*`` and truthiness works. Keys whose q-exponent leaves the box
[0, N]^r are dropped. The complement of the box is an ideal, so products
and substitutions of truncated series remain correct inside the box.
"""
from __future__ import annotations

from fractions import Fraction
from math import factorial
from typing import Callable, Iterable

from . import errors

Key = tuple[tuple[int, ...], int, tuple[int, ...], int]


def _accumulate(target: dict, key, value) -> None:
    old = target.get(key)
    new = value if old is None else old + value
    if new:
        target[key] = new
    else:
        target.pop(key, None)


class LogLaurentSeries:
    __slots__ = ("r", "N", "coeffs", "dropped", "z_window")

    def __init__(self, r: int, N: int, coeffs: dict | None = None, dropped: bool = False,
                 z_window: tuple[int, int] | None = None):
        self.r = r
        self.N = N
        self.z_window = z_window
        self.dropped = dropped
        self.coeffs: dict[Key, object] = {}
        for key, c in (coeffs or {}).items():
            if not c:
                continue
            if not self.in_box(key[0]):
                self.dropped = True
                continue
            if z_window is not None and not z_window[0] <= key[1] <= z_window[1]:
                raise errors.TruncationOverflow(f"z-exponent {key[1]} outside window {z_window}",
                                                witness={"key": str(key)})
            self.coeffs[key] = c

    # -- construction
    @classmethod
    def zero(cls, r: int, N: int) -> "LogLaurentSeries":
        return cls(r, N)

    @classmethod
    def monomial(cls, r: int, N: int, coeff=1, e=None, j: int = 0, alpha=None, beta: int = 0
                 ) -> "LogLaurentSeries":
        e = tuple(e) if e is not None else (0,) * r
        alpha = tuple(alpha) if alpha is not None else (0,) * r
        c = Fraction(coeff) if isinstance(coeff, int) else coeff
        return cls(r, N, {(e, j, alpha, beta): c})

    @classmethod
    def q(cls, r: int, N: int, a: int) -> "LogLaurentSeries":
        return cls.monomial(r, N, e=[int(b == a) for b in range(r)])

    @classmethod
    def log_q(cls, r: int, N: int, a: int) -> "LogLaurentSeries":
        return cls.monomial(r, N, alpha=[int(b == a) for b in range(r)])

    def in_box(self, e) -> bool:
        return all(0 <= x <= self.N for x in e)

    def _new(self, coeffs, dropped=False) -> "LogLaurentSeries":
        return LogLaurentSeries(self.r, self.N, coeffs, dropped=self.dropped or dropped)

    # -- ring structure
    def __add__(self, other):
        if not isinstance(other, LogLaurentSeries):
            other = self._constant(other)
        out = dict(self.coeffs)
        for k, c in other.coeffs.items():
            _accumulate(out, k, c)
        return self._new(out, other.dropped)

    __radd__ = __add__

    def __neg__(self):
        return self._new({k: -c for k, c in self.coeffs.items()})

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def _constant(self, c) -> "LogLaurentSeries":
        return LogLaurentSeries.monomial(self.r, self.N, c)

    def scale(self, c) -> "LogLaurentSeries":
        """Multiply every coefficient by c on the right."""
        return self._new({k: v * c for k, v in self.coeffs.items()})

    def __mul__(self, other):
        if not isinstance(other, LogLaurentSeries):
            return self.scale(other)
        out: dict = {}
        dropped = False
        N = self.N
        for (e1, j1, a1, b1), c1 in self.coeffs.items():
            for (e2, j2, a2, b2), c2 in other.coeffs.items():
                e = tuple(x + y for x, y in zip(e1, e2))
                if any(x > N for x in e):
                    dropped = True
                    continue
                _accumulate(out, (e, j1 + j2, tuple(x + y for x, y in zip(a1, a2)), b1 + b2),
                            c1 * c2)
        return self._new(out, dropped or other.dropped)

    def __rmul__(self, other):
        return self._new({k: other * v for k, v in self.coeffs.items()})

    def __pow__(self, k: int):
        out = self._constant(1)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        if isinstance(other, LogLaurentSeries):
            return (self - other).is_zero()
        return NotImplemented

    __hash__ = None

    def is_zero(self) -> bool:
        return not self.coeffs

    def __bool__(self):
        return bool(self.coeffs)

    def __len__(self):
        return len(self.coeffs)

    def __repr__(self):
        return f"LogLaurentSeries(r={self.r}, N={self.N}, terms={len(self.coeffs)})"

    # -- derivations
    def q_derivative(self, a: int) -> "LogLaurentSeries":
        """q_a d/dq_a."""
        out: dict = {}
        for (e, j, al, b), c in self.coeffs.items():
            if e[a]:
                _accumulate(out, (e, j, al, b), c * e[a])
            if al[a]:
                lower = al[:a] + (al[a] - 1,) + al[a + 1:]
                _accumulate(out, (e, j, lower, b), c * al[a])
        return self._new(out)

    def z_derivative(self) -> "LogLaurentSeries":
        """z d/dz."""
        out: dict = {}
        for (e, j, al, b), c in self.coeffs.items():
            if j:
                _accumulate(out, (e, j, al, b), c * j)
            if b:
                _accumulate(out, (e, j, al, b - 1), c * b)
        return self._new(out)

    def shift_z(self, k: int) -> "LogLaurentSeries":
        return self._new({(e, j + k, al, b): c for (e, j, al, b), c in self.coeffs.items()})

    def theta(self, a: int) -> "LogLaurentSeries":
        """z q_a d/dq_a."""
        return self.q_derivative(a).shift_z(1)

    def euler_z(self) -> "LogLaurentSeries":
        """z^2 d/dz."""
        return self.z_derivative().shift_z(1)

    # -- inspection
    def keys(self):
        return sorted(self.coeffs)

    def items(self):
        return sorted(self.coeffs.items())

    def coefficient(self, e=None, j: int = 0, alpha=None, beta: int = 0):
        e = tuple(e) if e is not None else (0,) * self.r
        alpha = tuple(alpha) if alpha is not None else (0,) * self.r
        return self.coeffs.get((e, j, alpha, beta))

    def is_log_free(self) -> bool:
        return all(not any(al) and not b for (_, _, al, b) in self.coeffs)

    def z_range(self) -> tuple[int, int] | None:
        js = [k[1] for k in self.coeffs]
        return (min(js), max(js)) if js else None

    def q_exponents(self) -> set[tuple[int, ...]]:
        return {k[0] for k in self.coeffs}

    def filter(self, pred: Callable[[Key], bool]) -> "LogLaurentSeries":
        return self._new({k: c for k, c in self.coeffs.items() if pred(k)})

    def z_coefficient(self, j: int) -> "LogLaurentSeries":
        """The series multiplying z^j (log-z exponent and logs kept)."""
        return self._new({(e, 0, al, b): c for (e, jj, al, b), c in self.coeffs.items() if jj == j})

    def map_coeffs(self, fn: Callable) -> "LogLaurentSeries":
        return self._new({k: fn(c) for k, c in self.coeffs.items()})

    def truncate(self, N: int) -> "LogLaurentSeries":
        out = LogLaurentSeries(self.r, N, {k: c for k, c in self.coeffs.items()
                                           if all(x <= N for x in k[0])})
        out.dropped = self.dropped
        return out

    def restrict(self, pred: Callable[[tuple[int, ...]], bool]) -> "LogLaurentSeries":
        """Keep only keys whose q-exponent satisfies pred."""
        return self.filter(lambda k: pred(k[0]))


def exp_nilpotent(x: LogLaurentSeries, max_terms: int | None = None) -> LogLaurentSeries:
    """exp(x) for x nilpotent modulo truncation; stops when a power vanishes."""
    out = x._constant(1)
    term = x._constant(1)
    k = 0
    while True:
        k += 1
        if max_terms is not None and k > max_terms:
            break
        term = term * x
        if term.is_zero():
            break
        out = out + term * Fraction(1, factorial(k))
    return out


def series_sum(items: Iterable[LogLaurentSeries], r: int, N: int) -> LogLaurentSeries:
    out: dict = {}
    dropped = False
    for s in items:
        dropped = dropped or s.dropped
        for k, c in s.coeffs.items():
            _accumulate(out, k, c)
    return LogLaurentSeries(r, N, out, dropped=dropped)


# ---------------------------------------------------------------- power series in q

def scalar_part(s: LogLaurentSeries) -> dict[tuple[int, ...], Fraction]:
    """A log-free, z-free series as ``{e: coefficient}``."""
    out = {}
    for (e, j, al, b), c in s.coeffs.items():
        if j or any(al) or b:
            raise ValueError("series is not a plain power series in q")
        out[e] = c
    return out


def power_series(r: int, N: int, coeffs: dict) -> LogLaurentSeries:
    zero = (0,) * r
    return LogLaurentSeries(r, N, {(tuple(e), 0, zero, 0): Fraction(c) if isinstance(c, int) else c
                                   for e, c in coeffs.items()})


def compose(s: LogLaurentSeries, subs: list[LogLaurentSeries],
            log_subs: list[LogLaurentSeries] | None = None) -> LogLaurentSeries:
    """Substitute q_a -> subs[a] (and log q_a -> log_subs[a]) into s.

    Each subs[a] must lie in the ideal generated by the q's so the result
    is determined inside the box. z and log z are carried along unchanged.
    """
    r, N = s.r, s.N
    powers = [[s._constant(1)] for _ in range(r)]
    log_powers = [[s._constant(1)] for _ in range(r)]

    def power(table, base, k):
        while len(table) <= k:
            table.append(table[-1] * base)
        return table[k]

    groups: dict = {}
    for (e, j, al, b), c in s.coeffs.items():
        groups.setdefault((e, al), []).append(((j, b), c))
    out: dict = {}
    for (e, al), rest in groups.items():
        factor = s._constant(1)
        for a in range(r):
            if e[a]:
                factor = factor * power(powers[a], subs[a], e[a])
            if al[a]:
                if log_subs is None:
                    raise ValueError("series has logarithms but no log substitution given")
                factor = factor * power(log_powers[a], log_subs[a], al[a])
        for (ee, jj, aa, bb), f in factor.coeffs.items():
            for (j, b), c in rest:
                _accumulate(out, (ee, jj + j, aa, bb + b), f * c)
    return LogLaurentSeries(r, N, out)
