"""Ordered abelian value groups (rank 1 and lexicographic rank 2) and the
delta calculus used to track values under a -> -p*a^(1/p).

All values are exact rationals. Infinity is represented by ``Value`` with
``coords=None`` and is absorbing for addition.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from functools import total_ordering
from numbers import Rational

from .errors import (
    GroupConstraintError,
    InfiniteValue,
    ParseError,
    RankMismatch,
)

__all__ = [
    "Value",
    "INF",
    "V",
    "GroupDescriptor",
    "DeltaContext",
    "compare",
    "delta",
    "delta_iter",
    "delta_value_law",
    "parse_value",
]


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    raise TypeError(f"cannot use {x!r} as an exact rational")


@total_ordering
@dataclass(frozen=True)
class Value:
    """An element of Q (rank 1) or Q x Q with lex order (rank 2), or +infinity."""

    coords: tuple | None
    rank: int = 1

    def __post_init__(self):
        if self.coords is not None:
            object.__setattr__(self, "coords", tuple(_frac(c) for c in self.coords))
            object.__setattr__(self, "rank", len(self.coords))
        if self.rank not in (1, 2):
            raise RankMismatch(f"unsupported rank {self.rank}")

    # -- construction helpers
    @classmethod
    def inf(cls, rank=1) -> "Value":
        return cls(None, rank)

    @classmethod
    def coerce(cls, x, rank=1) -> "Value":
        if isinstance(x, Value):
            return x
        if isinstance(x, tuple):
            return cls(x)
        return cls((x,))

    @property
    def is_inf(self) -> bool:
        return self.coords is None

    @property
    def q(self) -> Fraction:
        """The rational of a finite rank-1 value."""
        if self.coords is None:
            raise InfiniteValue("infinite value has no rational coordinate")
        if self.rank != 1:
            raise RankMismatch("rank-2 value used where rank 1 is required")
        return self.coords[0]

    def _other(self, other) -> "Value":
        other = Value.coerce(other)
        if other.rank != self.rank:
            raise RankMismatch(f"rank {self.rank} vs rank {other.rank}")
        return other

    # -- order
    def __eq__(self, other):
        if not isinstance(other, (Value, int, Fraction, tuple)):
            return NotImplemented
        other = Value.coerce(other)
        return self.rank == other.rank and self.coords == other.coords

    def __hash__(self):
        return hash((self.rank, self.coords))

    def __lt__(self, other):
        if not isinstance(other, (Value, int, Fraction, tuple)):
            return NotImplemented
        other = self._other(other)
        if self.coords is None:
            return False
        if other.coords is None:
            return True
        return self.coords < other.coords

    # -- group law
    def __add__(self, other):
        if not isinstance(other, (Value, int, Fraction, tuple)):
            return NotImplemented
        other = self._other(other)
        if self.coords is None or other.coords is None:
            return Value.inf(self.rank)
        return Value(tuple(a + b for a, b in zip(self.coords, other.coords)))

    __radd__ = __add__

    def __neg__(self):
        if self.coords is None:
            raise InfiniteValue("cannot negate infinity")
        return Value(tuple(-a for a in self.coords))

    def __sub__(self, other):
        other = self._other(other)
        if other.coords is None:
            raise InfiniteValue("cannot subtract infinity")
        return self + (-other)

    def __rsub__(self, other):
        return Value.coerce(other) - self

    def __mul__(self, k):
        if isinstance(k, Value):
            return NotImplemented
        k = _frac(k)
        if self.coords is None:
            if k <= 0:
                raise InfiniteValue("non-positive multiple of infinity")
            return self
        return Value(tuple(k * a for a in self.coords))

    __rmul__ = __mul__

    def __truediv__(self, k):
        return self * (1 / _frac(k))

    def __str__(self):
        if self.coords is None:
            return "inf"
        if self.rank == 1:
            return str(self.coords[0])
        return "(" + ", ".join(str(c) for c in self.coords) + ")"

    def __repr__(self):
        return f"Value({self})"


INF = Value.inf(1)


def V(*xs) -> Value:
    """Shorthand: ``V(3, 2)`` is not 3/2 but the rank-2 value (3, 2); ``V("3/2")`` is rank 1."""
    return Value(tuple(xs))


_VALUE_RE = re.compile(r"^\s*(?:inf|\(\s*[^,()]+\s*,\s*[^,()]+\s*\)|[+-]?\d+(?:/\d+)?)\s*$")


def parse_value(text: str) -> Value:
    """Parse ``3/2``, ``inf``, or ``(1, -2/3)``."""
    s = text.strip()
    if not _VALUE_RE.match(s):
        raise ParseError(f"malformed value {text!r}")
    if s == "inf":
        return INF
    if s.startswith("("):
        a, b = s[1:-1].split(",")
        try:
            return Value((Fraction(a.strip()), Fraction(b.strip())))
        except ValueError as exc:
            raise ParseError(f"malformed value {text!r}") from exc
    return Value((Fraction(s),))


def compare(a: Value, b: Value) -> int:
    """Three-way comparison: -1, 0 or 1."""
    a, b = Value.coerce(a), Value.coerce(b)
    if a.rank != b.rank:
        raise RankMismatch(f"rank {a.rank} vs rank {b.rank}")
    if a == b:
        return 0
    return -1 if a < b else 1


def _is_p_power(n: int, p: int) -> bool:
    while n % p == 0:
        n //= p
    return n == 1


@dataclass(frozen=True)
class GroupDescriptor:
    """Divisibility constraint per coordinate.

    ``divisibility`` entries are ``"integers"``, ``"rationals"`` or
    ``("p-divisible", p)``.
    """

    rank: int = 1
    divisibility: tuple = ("integers",)

    def __post_init__(self):
        if len(self.divisibility) != self.rank:
            raise RankMismatch("one divisibility entry per coordinate")

    @classmethod
    def integers(cls, rank=1):
        return cls(rank, ("integers",) * rank)

    @classmethod
    def p_divisible(cls, p, rank=1):
        return cls(rank, (("p-divisible", p),) * rank)

    @classmethod
    def rationals(cls, rank=1):
        return cls(rank, ("rationals",) * rank)

    def accepts_coordinate(self, i: int, x: Fraction) -> bool:
        kind = self.divisibility[i]
        if kind == "rationals":
            return True
        if kind == "integers":
            return x.denominator == 1
        _, p = kind
        return _is_p_power(x.denominator, p)

    def contains(self, v: Value) -> bool:
        if v.is_inf:
            return True
        if v.rank != self.rank:
            return False
        return all(self.accepts_coordinate(i, c) for i, c in enumerate(v.coords))

    def check(self, v: Value) -> Value:
        if not self.contains(v):
            raise GroupConstraintError(f"{v} not in value group {self}")
        return v

    def is_p_divisible(self, p: int) -> bool:
        return all(d == "rationals" or d == ("p-divisible", p) for d in self.divisibility)

    def __str__(self):
        parts = []
        for d in self.divisibility:
            parts.append(d if isinstance(d, str) else f"Z[1/{d[1]}]")
        return " x ".join(parts)


@dataclass(frozen=True)
class DeltaContext:
    """The prime ``p`` and the value ``vp`` of p; rank 1 only."""

    p: int
    vp: Value

    def __post_init__(self):
        vp = Value.coerce(self.vp)
        object.__setattr__(self, "vp", vp)
        if vp.is_inf or vp.rank != 1 or vp.q <= 0:
            raise GroupConstraintError("vp must be a finite positive rank-1 value")
        if self.p < 2 or any(self.p % d == 0 for d in range(2, int(self.p**0.5) + 1)):
            raise ValueError("p must be a prime")

    @property
    def fixed_point(self) -> Value:
        return self.vp * Fraction(self.p, self.p - 1)

    @property
    def threshold(self) -> Value:
        """(p/(p-1))*vp: 1-unit perturbations strictly above this are p-th powers."""
        return self.fixed_point


def _finite_rank1(g) -> Fraction:
    g = Value.coerce(g)
    if g.is_inf:
        raise InfiniteValue("delta is undefined at infinity")
    if g.rank != 1:
        raise RankMismatch("delta is only defined on rank-1 values")
    return g.q


def delta(ctx: DeltaContext, gamma) -> Value:
    """vp + gamma/p."""
    return Value((ctx.vp.q + _finite_rank1(gamma) / ctx.p,))


def delta_iter(ctx: DeltaContext, i: int, gamma) -> Value:
    """i-th iterate of delta in closed form; negative i iterates the inverse."""
    g = _finite_rank1(gamma)
    p, vp = ctx.p, ctx.vp.q
    if i == 0:
        return Value((g,))
    if i > 0:
        # delta^i(0) = (1 + p + ... + p^(i-1)) / p^(i-1) * vp
        d0 = Fraction(sum(p**k for k in range(i)), p ** (i - 1)) * vp
        return Value((d0 + g / p**i,))
    n = -i
    # delta^-1(g) = p*(g - vp), so delta^-n(0) = -(p + p^2 + ... + p^n) vp
    d0 = -Fraction(sum(p**k for k in range(1, n + 1))) * vp
    return Value((d0 + p**n * g,))


def delta_value_law(ctx: DeltaContext, va, group: GroupDescriptor | None = None) -> Value:
    """Value of -p*a^(1/p) for any a of value ``va``."""
    if group is not None and not group.is_p_divisible(ctx.p):
        raise GroupConstraintError(f"value group {group} is not {ctx.p}-divisible")
    return delta(ctx, va)
