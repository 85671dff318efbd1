"""Dense univariate polynomials with coefficients in one field model."""

from __future__ import annotations

from math import comb

from ..errors import ModelMismatch

__all__ = ["Poly"]


class Poly:
    """Coefficient tuple, constant term first. Trailing coefficients that are
    zero at their precision are dropped."""

    __slots__ = ("model", "coeffs")

    def __init__(self, model, coeffs):
        self.model = model
        cs = [model.element(c) if isinstance(c, int) else c for c in coeffs]
        for c in cs:
            if c.model != model:
                raise ModelMismatch(f"coefficient from {c.model}, expected {model}")
        while cs and cs[-1].is_zero_at_prec():
            cs.pop()
        self.coeffs = tuple(cs)

    @classmethod
    def x(cls, model):
        return cls(model, [model.zero(), model.one()])

    @classmethod
    def const(cls, model, c):
        return cls(model, [c])

    @classmethod
    def from_dict(cls, model, d):
        if not d:
            return cls(model, [])
        n = max(d)
        return cls(model, [d.get(i, model.zero()) for i in range(n + 1)])

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def coeff(self, i):
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else self.model.zero()

    def is_zero(self) -> bool:
        return not self.coeffs

    def items(self):
        """(index, coefficient) for the coefficients not zero at precision."""
        return [(i, c) for i, c in enumerate(self.coeffs) if not c.is_zero_at_prec()]

    def _coerce(self, other):
        if isinstance(other, Poly):
            if other.model != self.model:
                raise ModelMismatch("polynomials over different models")
            return other
        if isinstance(other, int):
            return Poly(self.model, [self.model.element(other)])
        return Poly(self.model, [other])

    def __add__(self, other):
        other = self._coerce(other)
        n = max(len(self.coeffs), len(other.coeffs))
        return Poly(self.model, [self.coeff(i) + other.coeff(i) for i in range(n)])

    __radd__ = __add__

    def __neg__(self):
        return Poly(self.model, [-c for c in self.coeffs])

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        other = self._coerce(other)
        if self.is_zero() or other.is_zero():
            return Poly(self.model, [])
        out = [self.model.zero() for _ in range(len(self.coeffs) + len(other.coeffs) - 1)]
        for i, a in enumerate(self.coeffs):
            if a.is_zero_at_prec() and a.prec is None:
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] = out[i + j] + a * b
        return Poly(self.model, out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        result = Poly(self.model, [self.model.one()])
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def __call__(self, x):
        """Horner evaluation at an element (or at a polynomial)."""
        if isinstance(x, Poly):
            acc = Poly(self.model, [])
            for c in reversed(self.coeffs):
                acc = acc * x + c
            return acc
        acc = self.model.zero()
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def map_coeffs(self, fn):
        return Poly(self.model, [fn(c) for c in self.coeffs])

    def with_prec(self, prec):
        return self.map_coeffs(lambda c: c.with_prec(prec))

    def derivative(self):
        return Poly(self.model, [c.scale(i) for i, c in enumerate(self.coeffs)][1:])

    def hasse_derivative(self, i: int):
        """i-th divided derivative: sum_k C(k, i) a_k X^(k-i)."""
        return Poly(self.model, [self.coeffs[k].scale(comb(k, i))
                                 for k in range(i, len(self.coeffs))])

    def taylor(self):
        """[f_0, ..., f_n] with f(X) = sum f_i(X0) (X - X0)^i."""
        return [self.hasse_derivative(i) for i in range(len(self.coeffs))]

    def shift_scale(self, c, d):
        """The polynomial z -> f(c + d*z)."""
        lin = Poly(self.model, [c, d])
        return self(lin)

    def equals_at(self, other, prec=None) -> bool:
        other = self._coerce(other)
        n = max(len(self.coeffs), len(other.coeffs))
        return all(self.coeff(i).equals_at(other.coeff(i), prec) for i in range(n))

    def __eq__(self, other):
        if not isinstance(other, Poly):
            return NotImplemented
        return self.model == other.model and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.model, self.coeffs))

    def format(self, var="x") -> str:
        from .fmt import format_poly

        return format_poly(self, var)

    def __str__(self):
        return self.format()

    __repr__ = __str__
