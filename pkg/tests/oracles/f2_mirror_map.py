"""Brute-force expansion of the z^-1 coefficient of exp(-delta/z) I for F_2.

Independent of the package: every summand is written as a sympy rational
function in w = 1/z and the divisor classes, expanded with ``sympy.series``
and reduced modulo the Stanley-Reisner ideal with ``sympy.reduced``.

Run as a script to print the frozen table used by the tests.
"""
import itertools

import sympy as sp

pf, ps, w = sp.symbols("pf ps w")

# rays (1,0),(0,1),(-1,2),(0,-1); relation basis (1,-2,1,0), (0,1,0,1)
D = [pf, -2 * pf + ps, pf, ps]
SR_IDEAL = [sp.expand(D[0] * D[2]), sp.expand(D[1] * D[3])]


def summand(l):
    expr = sp.Integer(1)
    for Di, li in zip(D, l):
        if li >= 0:
            for nu in range(1, li + 1):
                expr /= (Di + nu / w)
        else:
            for nu in range(li + 1, 1):
                expr *= (Di + nu / w)
    return expr


def reduce_class(expr):
    expr = sp.expand(expr)
    if expr == 0:
        return sp.Integer(0)
    _, rem = sp.reduced(expr, SR_IDEAL, pf, ps, order="grevlex")
    return sp.expand(rem)


def gamma_prime(order=3):
    """Return {(a, b): class} with the z^-1 coefficient of the q_f^a q_s^b term."""
    out = {}
    for a, b in itertools.product(range(order + 1), repeat=2):
        l = (a, b - 2 * a, a, b)
        ser = sp.series(summand(l), w, 0, 2).removeO()
        coeff = reduce_class(sp.expand(ser).coeff(w, 1))
        if coeff != 0:
            out[(a, b)] = coeff
    return out


if __name__ == "__main__":
    for key, val in sorted(gamma_prime().items()):
        print(key, val)
