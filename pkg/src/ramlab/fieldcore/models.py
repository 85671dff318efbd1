"""Concrete valued fields with finite-precision elements.

Three models:

* ``SeriesField(p, k, group)`` -- generalized power series over F_q in one
  variable ``t`` with exponents in a rank-1 group (integers, Z[1/p] for the
  perfect hull, or Q). Characteristic p.
* ``IteratedSeriesField(p, k)`` -- F_q((u))((t)) with the lex valuation
  v(u^a t^b) = (b, a). Characteristic p, rank 2.
* ``PadicField(p)`` -- Q_p. Characteristic 0, residue field F_p.

An element carries an absolute precision: every term of value >= prec is
unknown. ``prec=None`` means the element is exact.
"""

from __future__ import annotations

from fractions import Fraction

from ..errors import (
    InsufficientPrecision,
    ModelMismatch,
    PreconditionError,
    UnsupportedSpec,
)
from ..gf import GF
from ..ordval import INF, GroupDescriptor, Value

__all__ = [
    "SeriesField",
    "IteratedSeriesField",
    "PadicField",
    "SeriesElement",
    "PadicElement",
    "min_prec",
]


def min_prec(*precs):
    """Minimum of absolute precisions, treating None as +infinity."""
    finite = [p for p in precs if p is not None]
    return min(finite) if finite else None


def _prec_value(prec, rank=1):
    return Value.inf(rank) if prec is None else prec


class _Element:
    """Operations common to both element kinds."""

    def _check(self, other):
        if isinstance(other, int):
            return self.model.element(other)
        if not isinstance(other, _Element):
            return NotImplemented
        if other.model != self.model:
            raise ModelMismatch(f"{self.model} vs {other.model}")
        return other

    def __radd__(self, other):
        return self + other

    def __sub__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __rmul__(self, other):
        return self * other

    def __truediv__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        return self * other.inv()

    def __pow__(self, n: int):
        if n < 0:
            return self.inv() ** (-n)
        result = self.model.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def value_lower_bound(self) -> Value:
        """The value if known, else the precision (a lower bound)."""
        if self.is_zero_at_prec():
            return _prec_value(self.prec, self.model.rank)
        return self.value()

    def equals_at(self, other, prec=None) -> bool:
        """True when ``self - other`` vanishes at the guaranteed precision
        (or at ``prec`` when given and smaller)."""
        diff = self - other
        if prec is None:
            return diff.is_zero_at_prec()
        if diff.is_zero_at_prec():
            return diff.prec is None or diff.prec >= prec
        return diff.value() >= prec

    def with_prec(self, prec):
        """Truncate to a smaller absolute precision."""
        if prec is None:
            return self
        return self._truncate(min_prec(self.prec, prec))

    def is_exact(self) -> bool:
        return self.prec is None

    def representative(self):
        """The exact element with the same known digits."""
        return self._truncate(None)


# --------------------------------------------------------------------------
# series models


class SeriesField:
    """F_q with a formal variable ``t`` and exponents in ``group``."""

    rank = 1
    symbols = ("t",)

    def __init__(self, p: int, k: int = 1, group: GroupDescriptor | None = None,
                 default_prec=20):
        self.F = GF(p, k)
        self.p, self.k, self.q = p, k, p**k
        self.group = group or GroupDescriptor.integers()
        if self.group.rank != self.rank:
            raise ModelMismatch("exponent group rank does not match the model")
        self.default_prec = Value.coerce(default_prec)

    char = property(lambda self: self.p)
    residue_char = property(lambda self: self.p)

    @classmethod
    def perfect_hull(cls, p, k=1, **kw):
        return cls(p, k, GroupDescriptor.p_divisible(p), **kw)

    @property
    def is_perfect(self) -> bool:
        return self.group.is_p_divisible(self.p)

    @property
    def vp(self) -> Value:
        return Value.inf(self.rank)

    def _key(self):
        return (type(self).__name__, self.p, self.k, self.group)

    def __eq__(self, other):
        return isinstance(other, SeriesField) and self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def __repr__(self):
        kind = "perfect-hull" if self.is_perfect else str(self.group)
        return f"SeriesField(F_{self.q}, {kind})"

    def describe(self) -> dict:
        return {"kind": type(self).__name__, "p": self.p, "k": self.k,
                "group": str(self.group)}

    # -- constructors
    def zero(self, prec=None):
        return SeriesElement(self, {}, prec)

    def one(self):
        return SeriesElement(self, {self._zero_key(): 1}, None)

    def _zero_key(self):
        return (Fraction(0),) * self.rank

    def element(self, c, prec=None):
        """Embed an integer or residue-field element as a constant."""
        c = self.F.scalar(c)
        return SeriesElement(self, {self._zero_key(): c} if c else {}, prec)

    def residue_lift(self, r):
        return SeriesElement(self, {self._zero_key(): r} if r else {}, None)

    def monomial(self, coeff, exponent, prec=None):
        key = Value.coerce(exponent).coords
        coeff = coeff % self.q if self.k == 1 else coeff
        return SeriesElement(self, {key: coeff} if coeff else {}, prec)

    def t(self, exponent=1):
        return self.monomial(1, exponent)

    def from_terms(self, terms, prec=None):
        return SeriesElement(self, dict(terms), prec)

    def uniformizer_value(self) -> Value:
        return Value((1,)) if self.group.divisibility[0] == "integers" else None


class IteratedSeriesField(SeriesField):
    """F_q((u))((t)); keys are (t-exponent, u-exponent), ordered lex."""

    rank = 2
    symbols = ("t", "u")

    def __init__(self, p: int, k: int = 1, default_prec=(20, 0)):
        super().__init__(p, k, GroupDescriptor.integers(2), default_prec)

    def __repr__(self):
        return f"IteratedSeriesField(F_{self.q}((u))((t)))"

    def u(self, exponent=1):
        return self.monomial(1, (0, exponent))

    def t(self, exponent=1):
        return self.monomial(1, (exponent, 0))


class SeriesElement(_Element):
    """Finite map exponent-key -> nonzero F_q coefficient, plus precision."""

    __slots__ = ("model", "terms", "prec")

    def __init__(self, model: SeriesField, terms: dict, prec=None):
        self.model = model
        if prec is not None:
            prec = Value.coerce(prec)
            if prec.is_inf:
                prec = None
        self.prec = prec
        clean = {}
        for key, c in terms.items():
            key = tuple(Fraction(x) for x in key)
            if len(key) != model.rank:
                raise ModelMismatch("exponent key rank mismatch")
            if c == 0:
                continue
            if prec is not None and Value(key) >= prec:
                continue
            if not model.group.contains(Value(key)):
                raise PreconditionError(f"exponent {key} not in {model.group}")
            clean[key] = c
        self.terms = clean

    def _truncate(self, prec):
        return SeriesElement(self.model, self.terms, prec)

    # -- inspection
    def is_zero_at_prec(self) -> bool:
        return not self.terms

    def value(self) -> Value:
        if self.terms:
            return Value(min(self.terms))
        if self.prec is None:
            return Value.inf(self.model.rank)
        raise InsufficientPrecision(f"element is 0 at precision {self.prec}")

    def residue(self) -> int:
        if self.terms:
            if min(self.terms) < self.model._zero_key():
                raise PreconditionError("element is not in the valuation ring")
        elif self.prec is not None and self.prec <= Value(self.model._zero_key()):
            raise InsufficientPrecision("residue unknown at this precision")
        return self.terms.get(self.model._zero_key(), 0)

    def leading(self):
        """(coefficient, exponent key) of the least term."""
        key = min(self.terms)
        return self.terms[key], key

    def sorted_terms(self):
        return sorted(self.terms.items())

    def terms_as_elements(self):
        """Monomials in increasing value (exact)."""
        return [(Value(k), SeriesElement(self.model, {k: c})) for k, c in self.sorted_terms()]

    # -- arithmetic
    def __add__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        F = self.model.F
        out = dict(self.terms)
        for key, c in other.terms.items():
            s = F.add(out.get(key, 0), c)
            if s:
                out[key] = s
            else:
                out.pop(key, None)
        return SeriesElement(self.model, out, min_prec(self.prec, other.prec))

    def __neg__(self):
        F = self.model.F
        return SeriesElement(self.model, {k: F.neg(c) for k, c in self.terms.items()}, self.prec)

    def __mul__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        prec = _mul_prec(self, other)
        F = self.model.F
        out = {}
        for k1, c1 in self.terms.items():
            for k2, c2 in other.terms.items():
                key = tuple(a + b for a, b in zip(k1, k2))
                if prec is not None and Value(key) >= prec:
                    continue
                s = F.add(out.get(key, 0), F.mul(c1, c2))
                if s:
                    out[key] = s
                else:
                    out.pop(key, None)
        return SeriesElement(self.model, out, prec)

    def scale(self, n: int):
        F = self.model.F
        c = F.scalar(n)
        return SeriesElement(self.model, {k: F.mul(v, c) for k, v in self.terms.items()}, self.prec)

    def inv(self, prec=None):
        """Multiplicative inverse. Exact for exact monomials; otherwise the
        result precision is v(1/a) plus the relative precision of ``a`` (or
        ``prec``/the model default when ``a`` is exact)."""
        if not self.terms:
            raise InsufficientPrecision("inversion of an element indistinguishable from 0")
        F = self.model.F
        c0, k0 = self.leading()
        va = Value(k0)
        lead_inv = SeriesElement(self.model, {tuple(-x for x in k0): F.inv(c0)}, None)
        if len(self.terms) == 1 and self.prec is None:
            return lead_inv
        if self.prec is not None:
            rel = self.prec - va
        else:
            target = Value.coerce(prec) if prec is not None else self.model.default_prec
            rel = target + va
        # a = lead * (1 + w), v(w) > 0
        w = (self * lead_inv).with_prec(rel) - self.model.one()
        w = SeriesElement(self.model, w.terms, rel)
        if w.terms:
            mu = Value(min(w.terms))
            if self.model.rank == 2 and mu.coords[0] == 0:
                raise UnsupportedSpec("geometric series does not terminate at this rank-2 precision")
        acc = SeriesElement(self.model, {self.model._zero_key(): 1}, rel)
        power = SeriesElement(self.model, {self.model._zero_key(): 1}, rel)
        neg_w = -w
        while power.terms:
            power = (power * neg_w).with_prec(rel)
            acc = acc + power
        acc = SeriesElement(self.model, acc.terms, rel)
        return acc * lead_inv

    def frobenius_inverse(self):
        """Coefficientwise p-th root with exponents divided by p (char p)."""
        p = self.model.p
        if not self.model.group.is_p_divisible(p):
            raise PreconditionError("exponent group is not p-divisible")
        F = self.model.F
        out = {tuple(x / p for x in k): F.frobenius_inverse(c) for k, c in self.terms.items()}
        prec = None if self.prec is None else self.prec / p
        return SeriesElement(self.model, out, prec)

    def frobenius(self):
        p = self.model.p
        F = self.model.F
        out = {tuple(x * p for x in k): F.frobenius(c) for k, c in self.terms.items()}
        prec = None if self.prec is None else self.prec * p
        return SeriesElement(self.model, out, prec)

    # -- comparison / display
    def __eq__(self, other):
        if isinstance(other, int):
            other = self.model.element(other)
        if not isinstance(other, SeriesElement):
            return NotImplemented
        return self.model == other.model and self.terms == other.terms and self.prec == other.prec

    def __hash__(self):
        return hash((self.model, tuple(sorted(self.terms.items())), self.prec))

    def __str__(self):
        from .fmt import format_element

        return format_element(self)

    __repr__ = __str__


def _mul_prec(a, b):
    if a.prec is None and b.prec is None:
        return None
    rank = a.model.rank
    va = a.value_lower_bound()
    vb = b.value_lower_bound()
    cands = []
    if a.prec is not None:
        cands.append(a.prec + vb)
    if b.prec is not None:
        cands.append(b.prec + va)
    m = min(cands)
    return None if m == Value.inf(rank) else m


# --------------------------------------------------------------------------
# p-adic model


class PadicField:
    """Q_p with elements u * p^e known modulo p^prec."""

    rank = 1
    char = 0
    symbols = ()

    def __init__(self, p: int, default_prec: int = 20):
        self.F = GF(p)
        self.p = p
        self.k = 1
        self.q = p
        self.group = GroupDescriptor.integers()
        self.default_prec = Value.coerce(default_prec)

    residue_char = property(lambda self: self.p)
    is_perfect = False

    @property
    def vp(self) -> Value:
        return Value((1,))

    def __eq__(self, other):
        return isinstance(other, PadicField) and other.p == self.p

    def __hash__(self):
        return hash(("PadicField", self.p))

    def __repr__(self):
        return f"PadicField(Q_{self.p})"

    def describe(self) -> dict:
        return {"kind": "PadicField", "p": self.p}

    def zero(self, prec=None):
        return PadicElement(self, 0, 0, prec)

    def one(self):
        return PadicElement(self, 1, 0, None)

    def element(self, n, prec=None):
        if isinstance(n, Fraction):
            if n.denominator % self.p == 0 or n.denominator != 1:
                num = PadicElement(self, n.numerator, 0, prec)
                den = PadicElement(self, n.denominator, 0, None)
                cap = prec if prec is not None else self.default_prec
                return num * den.inv(prec=cap)
            n = n.numerator
        return PadicElement(self, n, 0, prec)

    def residue_lift(self, r):
        return PadicElement(self, r % self.p, 0, None)

    def monomial(self, coeff, exponent, prec=None):
        exponent = int(Value.coerce(exponent).q)
        return PadicElement(self, coeff, exponent, prec)

    def uniformizer_value(self) -> Value:
        return Value((1,))


class PadicElement(_Element):
    """n * p^s known modulo p^prec (absolute), normalized so that the stored
    unit ``u`` is prime to p and ``e`` is the exact valuation."""

    __slots__ = ("model", "u", "e", "prec")

    def __init__(self, model: PadicField, n: int, s: int, prec=None):
        self.model = model
        p = model.p
        if prec is not None:
            prec = Value.coerce(prec)
            if prec.is_inf:
                prec = None
            else:
                if prec.q.denominator != 1:
                    raise PreconditionError("p-adic precision must be an integer")
                prec = int(prec.q)
        n = int(n)
        s = int(s)
        if n == 0:
            self.u, self.e = 0, None
        else:
            while n % p == 0:
                n //= p
                s += 1
            self.u, self.e = n, s
        if prec is not None:
            if self.e is None or self.e >= prec:
                self.u, self.e = 0, None
            else:
                self.u %= p ** (prec - self.e)
        self.prec = None if prec is None else Value((prec,))

    @property
    def _iprec(self):
        return None if self.prec is None else int(self.prec.q)

    def _truncate(self, prec):
        if self.e is None:
            return PadicElement(self.model, 0, 0, prec)
        return PadicElement(self.model, self.u, self.e, prec)

    def is_zero_at_prec(self) -> bool:
        return self.u == 0

    def value(self) -> Value:
        if self.u:
            return Value((self.e,))
        if self.prec is None:
            return INF
        raise InsufficientPrecision(f"element is 0 at precision {self.prec}")

    def residue(self) -> int:
        if self.u:
            if self.e < 0:
                raise PreconditionError("element is not in the valuation ring")
            return self.u % self.model.p if self.e == 0 else 0
        if self.prec is not None and self._iprec <= 0:
            raise InsufficientPrecision("residue unknown at this precision")
        return 0

    def unit_part(self) -> "PadicElement":
        """u with self = u * p^e."""
        rel = None if self.prec is None else self._iprec - self.e
        return PadicElement(self.model, self.u, 0, rel)

    def to_int(self) -> int:
        """Integer representative (requires value >= 0)."""
        if self.u == 0:
            return 0
        if self.e < 0:
            raise PreconditionError("not integral")
        return self.u * self.model.p**self.e

    def terms_as_elements(self):
        """Digit monomials d*p^k below the precision, increasing k."""
        if self.u == 0:
            return []
        if self.prec is None and self.u < 0:
            raise PreconditionError("exact negative integer has infinitely many digits")
        out, n, k, p = [], self.u, self.e, self.model.p
        while n:
            n, d = divmod(n, p)
            if d:
                out.append((Value((k,)), PadicElement(self.model, d, k)))
            k += 1
        return out

    def _scaled(self, s):
        """Integer m with self = m * p^s (requires s <= e)."""
        if self.u == 0:
            return 0
        return self.u * self.model.p ** (self.e - s)

    def __add__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        prec = min_prec(self._iprec, other._iprec)
        cands = [x.e for x in (self, other) if x.u]
        if not cands:
            return PadicElement(self.model, 0, 0, prec)
        s = min(cands)
        return PadicElement(self.model, self._scaled(s) + other._scaled(s), s, prec)

    def __neg__(self):
        return PadicElement(self.model, -self.u, self.e or 0, self._iprec)

    def __mul__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        prec = _mul_prec(self, other)
        prec = None if prec is None else int(prec.q)
        if self.u == 0 or other.u == 0:
            return PadicElement(self.model, 0, 0, prec)
        return PadicElement(self.model, self.u * other.u, self.e + other.e, prec)

    def scale(self, n: int):
        return self * PadicElement(self.model, n, 0, None)

    def inv(self, prec=None):
        if self.u == 0:
            raise InsufficientPrecision("inversion of an element indistinguishable from 0")
        p = self.model.p
        if self.prec is None and self.u in (1, -1):
            return PadicElement(self.model, self.u, -self.e, None)
        if self.prec is not None:
            rel = self._iprec - self.e
        else:
            cap = Value.coerce(prec) if prec is not None else self.model.default_prec
            rel = int(cap.q) + self.e
        if rel <= 0:
            raise InsufficientPrecision("no relative precision left to invert")
        mod = p**rel
        return PadicElement(self.model, pow(self.u, -1, mod), -self.e, rel - self.e)

    def __eq__(self, other):
        if isinstance(other, int):
            other = self.model.element(other)
        if not isinstance(other, PadicElement):
            return NotImplemented
        return (self.model == other.model and self.u == other.u and self.e == other.e
                and self.prec == other.prec)

    def __hash__(self):
        return hash((self.model, self.u, self.e, self.prec))

    def __str__(self):
        from .fmt import format_element

        return format_element(self)

    __repr__ = __str__
