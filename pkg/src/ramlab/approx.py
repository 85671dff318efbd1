"""Approximation types: streams of approximants (c_nu, v(x - c_nu)) for an
element x transcendental over K, value stabilization, center selection."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import (
    AmbientExhausted,
    ApproximantsExhausted,
    ContradictoryConstraints,
    InsufficientPrecision,
    PreconditionError,
)
from .fieldcore.models import PadicField, SeriesField
from .ordval import Value

__all__ = [
    "ApproximationType",
    "StabilizationCertificate",
    "Constraint",
    "extend",
    "stabilize",
    "choose_center",
    "default_xi",
    "ambient_stream",
    "explicit_stream",
    "DEFAULT_CONFIRMATIONS",
]

DEFAULT_CONFIRMATIONS = 3


def default_xi(model: SeriesField, terms: int = 12):
    """sum_{i < terms} t^(1 - p^-i), known below value 1 - p^-terms."""
    p = model.p
    exps = [1 - Fraction(1, p**i) for i in range(terms)]
    return model.from_terms({(e,): 1 for e in exps}, prec=Value.coerce(1 - Fraction(1, p**terms)))


def _support(xi):
    """Support monomials of an ambient element, increasing value."""
    return xi.terms_as_elements()


class ApproximationType:
    """Append-only list of approximants (c, gamma); more are produced on demand
    by ``grow`` (truncations of an ambient element or a transformed parent)."""

    def __init__(self, model, approximants=(), ambient=None, grow=None, describe=None):
        self.model = model
        self.approximants: list = []
        self.ambient = ambient
        self._grow = grow
        self.description = describe or {}
        for c, g in approximants:
            self._append(c, Value.coerce(g))

    def __len__(self):
        return len(self.approximants)

    def __getitem__(self, i):
        return self.approximants[i]

    @property
    def can_grow(self) -> bool:
        return self._grow is not None

    def _append(self, c, gamma):
        if self.approximants and not gamma > self.approximants[-1][1]:
            raise PreconditionError("approximant values must be strictly increasing")
        if self.ambient is not None:
            diff = self.ambient - c
            if diff.value_lower_bound() != gamma or diff.is_zero_at_prec():
                raise PreconditionError(f"gamma {gamma} is not v(xi - c)")
        for c_old, g_old in self.approximants:
            if (c - c_old).value() != g_old:
                raise PreconditionError("approximants violate the pseudo-Cauchy law")
        self.approximants.append((c, gamma))

    def extend(self, count: int) -> "ApproximationType":
        for _ in range(count):
            if self._grow is None:
                raise ApproximantsExhausted(f"no further approximants after {len(self)}")
            c, g = self._grow(len(self))
            self._append(c, g)
        return self

    def ensure(self, n: int) -> bool:
        """Try to have at least n approximants; False if the stream runs out."""
        while len(self) < n:
            try:
                self.extend(1)
            except ApproximantsExhausted:
                return False
        return True

    def values_settled(self) -> bool:
        """v(c_nu) (and the leading coefficient) agree on the last two approximants."""
        if len(self) < 2:
            return True
        (a, _), (b, _) = self.approximants[-2:]
        if a.value() != b.value():
            return False
        if isinstance(self.model, SeriesField):
            return a.leading()[0] == b.leading()[0]
        return True

    def transformed(self, c1, a) -> "ApproximationType":
        """The stream of y = (x - c1)/a; its first approximant is the image 0 of c1."""
        parent = self
        va = a.value()
        a_inv = a.inv()
        start = next((i for i, (c, _) in enumerate(parent.approximants) if c == c1), None)
        if start is None:
            raise PreconditionError("c1 must be one of the approximants")

        def mapped(i):
            c, g = parent.approximants[i]
            return (c - c1) * a_inv, g - va

        def grow(n):
            j = start + n
            if not parent.ensure(j + 1):
                raise ApproximantsExhausted("parent stream exhausted")
            return mapped(j)

        child = ApproximationType(self.model, grow=grow,
                                  describe={"transform": f"(x - {c1}) / {a}"})
        child.ensure(len(parent) - start)
        return child


def ambient_stream(xi, count: int = 0) -> ApproximationType:
    """Approximants by truncating ``xi`` after each support term."""
    support = _support(xi)

    def grow(n):
        if n + 1 >= len(support):
            raise AmbientExhausted(f"ambient element known through {len(support)} terms only")
        c = xi.model.zero()
        for _, m in support[: n + 1]:
            c = c + m
        return c, support[n + 1][0]

    at = ApproximationType(xi.model, ambient=xi, grow=grow, describe={"ambient": str(xi)})
    at.extend(count)
    return at


def explicit_stream(model, pairs) -> ApproximationType:
    return ApproximationType(model, pairs, describe={"explicit": len(pairs)})


def extend(at: ApproximationType, count: int) -> ApproximationType:
    return at.extend(count)


# -- stabilization -----------------------------------------------------------


@dataclass(frozen=True)
class StabilizationCertificate:
    h: object
    alpha0: Value
    stable_value: Value
    start_index: int
    checked_through: int

    def to_json(self):
        return {"alpha0": str(self.alpha0), "stable_value": str(self.stable_value),
                "start_index": self.start_index, "checked_through": self.checked_through}


def _eval_value(h, c, cap=None):
    y = h(c) if callable(h) else h
    if cap is not None and y.value_lower_bound() >= cap:
        return Value.coerce(cap)
    if y.is_zero_at_prec():
        if y.prec is None:
            return Value.inf(y.model.rank)
        raise InsufficientPrecision(f"value of h at {c} unknown at precision")
    return y.value()


def stabilize(at: ApproximationType, h, confirmations: int = DEFAULT_CONFIRMATIONS,
              min_index: int = 0, cap=None) -> StabilizationCertificate:
    """Least alpha0 = gamma_k such that v(h(c_mu)) is constant for mu >= k
    on the available stream, with at least ``confirmations`` equal values.

    ``h`` is a ``Poly`` (or any callable element -> element, or a constant
    element). With ``cap``, every value >= cap is read as cap.
    """
    at.ensure(max(2, min_index + confirmations))
    values = []
    while True:
        while len(values) < len(at):
            values.append(_eval_value(h, at[len(values)][0], cap))
        k = len(values) - 1
        while k > min_index and values[k - 1] == values[k]:
            k -= 1
        if len(values) - k >= confirmations and len(values) >= 2:
            return StabilizationCertificate(h, at[k][1], values[k], k, len(values) - 1)
        if not at.ensure(len(at) + 1):
            raise ApproximantsExhausted(
                f"value not stable with {confirmations} confirmations in {len(at)} approximants")


# -- center selection --------------------------------------------------------

_RELS = {
    "!=": lambda x: x != 0,
    ">": lambda x: x > 0,
    ">=": lambda x: x >= 0,
    "<": lambda x: x < 0,
}


@dataclass(frozen=True)
class Constraint:
    """a * gamma + b REL 0."""

    a: Fraction
    b: Fraction
    rel: str = "!="

    def holds(self, gamma) -> bool:
        g = Value.coerce(gamma)
        if g.is_inf:
            return False
        return _RELS[self.rel](Fraction(self.a) * g.q + Fraction(self.b))

    def is_constant(self) -> bool:
        return self.a == 0

    def __str__(self):
        return f"{self.a}*g + {self.b} {self.rel} 0"


def choose_center(at: ApproximationType, constraints=(), alpha0s=(), start: int = 0):
    """First approximant c_nu with gamma_nu >= every alpha0 that satisfies all
    constraints. Returns (index, c, gamma)."""
    for con in constraints:
        if con.is_constant() and not con.holds(0):
            raise ContradictoryConstraints(f"constraint {con} fails for every value")
    floor = max((Value.coerce(a) for a in alpha0s), default=None)
    i = start
    while True:
        if not at.ensure(i + 1):
            raise ApproximantsExhausted(f"no approximant satisfies the constraints (checked {i})")
        c, g = at[i]
        if (floor is None or g >= floor) and all(con.holds(g) for con in constraints):
            return i, c, g
        i += 1


def padic_stream(model: PadicField, n: int, count: int = 0) -> ApproximationType:
    """Stream truncating the exact p-adic integer ``n`` digit by digit."""
    return ambient_stream(model.element(n), count)
