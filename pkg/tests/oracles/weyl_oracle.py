"""Naive normal ordering of words in q_a, z^{+-1}, theta_a and E.

A word is a tuple of letters ``("q", a)``, ``("z", +-1)``, ``("t", a)``, ``("E", 0)``.
Adjacent letters out of the order q < z < t < E are swapped one at a time
using only the elementary commutation rules, so this shares no code
with the package's left-multiplication routine.
"""
from fractions import Fraction

RANK = {"q": 0, "z": 1, "t": 2, "E": 3}


def _swap(x, y):
    """Rewrite the out-of-order pair x y as a list of (coeff, letters)."""
    kx, ky = x[0], y[0]
    if kx == "t" and ky == "q":
        out = [(1, [y, x])]
        if x[1] == y[1]:
            out.append((1, [("z", 1), y]))
        return out
    if kx == "E" and ky == "z":
        k = y[1]
        extra = [("z", 1), ("z", 1)] if k == 1 else []
        return [(1, [y, x]), (k, extra)]
    if kx == "E" and ky == "t":
        return [(1, [y, x]), (1, [("z", 1), y])]
    # everything else commutes
    return [(1, [y, x])]


def _out_of_order(x, y):
    if RANK[x[0]] != RANK[y[0]]:
        return RANK[x[0]] > RANK[y[0]]
    return x[0] in "qt" and x[1] > y[1]


def _cancel_z(word):
    """z and z^-1 are adjacent in sorted words; cancel them."""
    zs = sum(l[1] for l in word if l[0] == "z")
    others = [l for l in word if l[0] != "z"]
    sign = 1 if zs > 0 else -1
    pos = next((i for i, l in enumerate(others) if RANK[l[0]] > 1), len(others))
    return tuple(others[:pos] + [("z", sign)] * abs(zs) + others[pos:])


def normal_order(words: dict) -> dict:
    pending = {tuple(w): Fraction(c) for w, c in words.items()}
    done: dict = {}
    while pending:
        word, c = pending.popitem()
        for i in range(len(word) - 1):
            if _out_of_order(word[i], word[i + 1]):
                for k, mid in _swap(word[i], word[i + 1]):
                    new = word[:i] + tuple(mid) + word[i + 2:]
                    pending[new] = pending.get(new, 0) + c * k
                break
        else:
            key = _cancel_z(word)
            done[key] = done.get(key, 0) + c
    return {w: c for w, c in done.items() if c}


def term_word(r, e, j, alpha, beta):
    word = []
    for a in range(r):
        word += [("q", a)] * e[a]
    word += [("z", 1 if j > 0 else -1)] * abs(j)
    for a in range(r):
        word += [("t", a)] * alpha[a]
    word += [("E", 0)] * beta
    return tuple(word)


def word_key(r, word):
    e = [0] * r
    alpha = [0] * r
    j = beta = 0
    for kind, x in word:
        if kind == "q":
            e[x] += 1
        elif kind == "z":
            j += x
        elif kind == "t":
            alpha[x] += 1
        else:
            beta += 1
    return (tuple(e), j, tuple(alpha), beta)


def product(r, key1, key2) -> dict:
    """Normal-ordered product of two monomials given as (e, j, alpha, beta)."""
    w = term_word(r, *key1) + term_word(r, *key2)
    out: dict = {}
    for word, c in normal_order({w: 1}).items():
        k = word_key(r, word)
        out[k] = out.get(k, 0) + c
    return {k: c for k, c in out.items() if c}
