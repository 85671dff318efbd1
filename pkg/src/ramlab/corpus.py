"""Seeded instance generators shared by the verification suites and tests.

Every generator takes a ``random.Random`` so instance streams depend only on
the seed.
"""

from __future__ import annotations

import random
from fractions import Fraction

from .approx import ambient_stream, default_xi
from .fieldcore.models import IteratedSeriesField, PadicElement, PadicField, SeriesField
from .fieldcore.poly import Poly
from .kummer import ValueMonomialSystem
from .ordval import GroupDescriptor

__all__ = [
    "random_rational",
    "as_instance",
    "kummer_instance",
    "kummer_corpus",
    "value_system",
    "extension_catalog",
    "composite_catalog",
]


def random_rational(rng: random.Random, lo=-10, hi=10, dens=(1, 2, 3, 4, 5, 8)) -> Fraction:
    d = rng.choice(dens)
    return Fraction(rng.randint(lo * d, hi * d), d)


def as_instance(rng: random.Random, p: int, max_degree: int = 6, max_terms: int = 3):
    """(f, stream) over the perfect hull of F_p((t)): degree <= max_degree,
    t-exponents in (1/4)[-8, 8], default xi-stream. For p != 2 the quarter
    exponents need the rational exponent group (still a perfect field)."""
    K = SeriesField.perfect_hull(p) if p == 2 else SeriesField(p, group=GroupDescriptor.rationals())
    deg = rng.randint(1, max_degree)
    coeffs = [K.zero()] * (deg + 1)
    for i in sorted({deg} | {rng.randint(1, deg) for _ in range(rng.randint(0, max_terms - 1))}):
        terms = {}
        for _ in range(rng.randint(1, 2)):
            terms[(Fraction(rng.randint(-8, 8), 4),)] = rng.randint(1, p - 1)
        coeffs[i] = K.from_terms(terms)
    f = Poly(K, coeffs)
    return f, ambient_stream(default_xi(K))


def _xi_2adic(rng):
    K = PadicField(2)
    n = rng.getrandbits(48) | 1
    return PadicElement(K, n, rng.randint(-2, 3), None)


def kummer_instance(rng: random.Random, max_degree: int = 4):
    """(f, xi) over Q_2 with 1 + f(xi) a 1-unit: a random polynomial shifted by
    the constant that moves f(xi) to 2^j times a unit."""
    K = PadicField(2)
    xi = _xi_2adic(rng)
    deg = rng.randint(1, max_degree)
    cs = []
    for _ in range(deg + 1):
        if rng.random() < 0.3:
            cs.append(K.zero())
        else:
            cs.append(PadicElement(K, rng.choice([1, 3, 5, 7, -1, -3]), rng.randint(-2, 4), None))
    if cs[-1].is_zero_at_prec():
        cs[-1] = K.one()
    f = Poly(K, cs)
    target = PadicElement(K, rng.choice([1, 3, 5, 7]), rng.randint(1, 4), None)
    f = f + (target - f(xi))
    return f, xi


def kummer_corpus(rng: random.Random, size: int):
    return [kummer_instance(rng) for _ in range(size)]


def value_system(rng: random.Random, p: int, n_max: int = 20, index_max: int = 64, vp=1):
    """A random system with every value > vp."""
    vp = Fraction(vp)
    entries = {}
    for _ in range(rng.randint(0, n_max)):
        i = rng.randint(1, index_max)
        entries[i] = vp + Fraction(rng.randint(1, 40), rng.choice([1, 2, 3, 4, p, p * p]))
    return ValueMonomialSystem(p, vp, entries)


def extension_catalog():
    """(label, spec builder args) for the rank-1 catalog: (model, minpoly text, declared)."""
    out = []
    for p in (2, 3, 5):
        K = SeriesField(p)
        out += [
            (f"X^2 - t over F_{p}((t))", K, "x^2 - t", None),
            (f"X^3 - t over F_{p}((t))", K, "x^3 - t", None),
            (f"X^2 - t^3 over F_{p}((t))", K, "x^2 - t^3", None),
            (f"X^{p} - X - t^-1 over F_{p}((t))", K, f"x^{p} - x - t^-1", None),
            (f"X - 1 over F_{p}((t))", K, "x - 1", None),
            (f"Eisenstein X^4 + t*X + t over F_{p}((t))", K, "x^4 + t*x + t", None),
            (f"declared e=1 f=1 degree {p} over F_{p}((t))", K, f"x^{p} - t^{p}*x - 1", {"e": 1, "f": 1}),
        ]
        Q = PadicField(p)
        out += [
            (f"X^2 - {p} over Q_{p}", Q, f"x^2 - {p}", None),
            (f"X - 5 over Q_{p}", Q, "x - 5", None),
        ]
    K2 = SeriesField(2)
    out += [
        ("X^2 + X + 1 over F_2((t))", K2, "x^2 + x + 1", None),
        ("X^3 + X + 1 over F_2((t))", K2, "x^3 + x + 1", None),
        ("X^2 - X - 1 over F_2((t)) (Artin-Schreier, residue trace 1)", K2, "x^2 - x - 1", None),
        ("X^2 + X + 1 over Q_2", PadicField(2), "x^2 + x + 1", None),
        ("declared e=2 f=1 degree 4 over F_2((t))", K2, "x^4 - t", {"e": 2, "f": 1}),
        ("X^2 + 1 over F_3((t))", SeriesField(3), "x^2 + 1", None),
    ]
    return out


def composite_catalog(q_primes=(2, 3), n_max=4, exp_range=range(-2, 3)):
    """Rank-2 catalog over F_p((u))((t)): trivial, constant-field enlargements,
    and radicals X^n - u^a t^b with gcd(n, a, b) = 1."""
    from math import gcd

    out = []
    for p in q_primes:
        L = IteratedSeriesField(p)
        out.append((p, L, "x - 1"))
        out.append((p, L, "x^2 + x + 1" if p == 2 else "x^2 + 1"))
        if p == 2:
            out.append((p, L, "x^3 + x + 1"))
        for n in range(2, n_max + 1):
            for a in exp_range:
                for b in exp_range:
                    if gcd(gcd(n, a), b) != 1:
                        continue
                    mono = "*".join(s for s in (f"u^{a}" if a else "", f"t^{b}" if b else "") if s) or "1"
                    out.append((p, L, f"x^{n} - {mono}"))
    return out
