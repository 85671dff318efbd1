"""Witnesses and the p-th power class rules for 1-units over the 2-adics."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from ..errors import PreconditionError
from ..ordval import DeltaContext, Value, delta_iter
from .models import PadicField
from .roots import pth_root

__all__ = [
    "Witness",
    "one_unit_shift_a",
    "one_unit_shift_b",
    "one_unit_shift_c",
    "rewrite_delta_inverse",
    "delta_op",
    "delta_op_inverse",
]


@dataclass(frozen=True)
class Witness:
    """A re-checkable membership certificate.

    kinds:
      pth-power    lhs = base * root^p          (claim: lhs in base * (K^x)^p)
      wp-preimage  u^p - u = target             (claim: target in wp(K))
      unit-factor  new = scalar * old * factor^p (polynomial identity; scalar in K),
                   exact or modulo coefficients of value >= modulus
    """

    kind: str
    p: int
    data: dict = field(default_factory=dict)
    claim: str = ""

    @classmethod
    def pth_power(cls, lhs, base, root, p, claim=""):
        return cls("pth-power", p, {"lhs": lhs, "base": base, "root": root},
                   claim or f"{lhs} in ({base})*(K^x)^{p}")

    @classmethod
    def wp_preimage(cls, target, u, p, claim=""):
        return cls("wp-preimage", p, {"target": target, "u": u},
                   claim or f"{target} in wp(K)")

    @classmethod
    def unit_factor(cls, old, new, factor, p, claim="", scalar=None, modulus=None):
        data = {"old": old, "new": new, "factor": factor}
        if scalar is not None:
            data["scalar"] = scalar
        if modulus is not None:
            data["modulus"] = Value.coerce(modulus)
        return cls("unit-factor", p, data, claim or "new = old * factor^p")

    def residual(self):
        d = self.data
        if self.kind == "pth-power":
            root = d["root"]
            if root.model.char == 0:
                # any concrete root certifies the class, so use its exact digits
                root = root.representative()
            return d["lhs"] - d["base"] * root ** self.p
        if self.kind == "wp-preimage":
            return d["u"] ** self.p - d["u"] - d["target"]
        if self.kind == "unit-factor":
            rhs = d["old"] * d["factor"] ** self.p
            if "scalar" in d:
                rhs = rhs * d["scalar"]
            return d["new"] - rhs
        raise ValueError(f"unknown witness kind {self.kind!r}")

    def verify(self) -> bool:
        """Recompute the identity by direct arithmetic.

        A pth-power claim in characteristic 0 is accepted when the quotient
        lhs / (base r^p) is a 1-unit 1 + e with v(e) > (p/(p-1)) v(p): such a
        1-unit is itself a p-th power, so the class claim holds exactly.
        Other kinds, and characteristic p, need the residual to vanish at
        its guaranteed precision.
        """
        res = self.residual()
        if self.kind == "unit-factor":
            if "modulus" in self.data:
                return all(c.value_lower_bound() >= self.data["modulus"] for c in res.coeffs)
            return res.is_zero()
        if self.kind == "pth-power":
            lhs = self.data["lhs"]
            model = lhs.model
            if model.char == 0 and lhs.prec is None and self.data["root"].prec is None:
                return res.is_zero_at_prec() and res.prec is None
            if model.char == 0:
                if lhs.is_zero_at_prec():
                    return False
                bound = res.value_lower_bound() - lhs.value()
                return bound > DeltaContext(self.p, model.vp).threshold
        return res.is_zero_at_prec()

    def to_json(self) -> dict:
        return {"kind": self.kind, "claim": self.claim,
                "data": {k: str(v) for k, v in self.data.items()}}


def delta_op(a):
    """Delta(a) = -p * a^(1/p)."""
    p = a.model.p
    return -(pth_root(a).scale(p))


def delta_op_inverse(d):
    """Delta^{-1}(d) = (-d/p)^p."""
    p = d.model.p
    return (-d * d.model.element(Fraction(1, p))) ** p


def _require_2adic(K):
    if not isinstance(K, PadicField):
        raise PreconditionError("the 1-unit rules need characteristic 0 (v(p) finite)")
    if K.p != 2:
        raise PreconditionError("exact 1-unit rules are limited to p = 2 (needs the p-th roots of unity)")


def _val(a):
    # every precondition is a lower bound on a value, so the precision of an
    # element that is 0 at precision is good enough
    return a.value_lower_bound()


def _trivial(K, lhs):
    return Witness.pth_power(lhs, lhs, K.one(), K.p)


def _class_witness(K, lhs, base, prec):
    cap = prec if prec is not None else K.default_prec
    ratio = lhs * base.inv(prec=cap)
    if ratio.prec is None:
        ratio = ratio.with_prec(cap)
    r = pth_root(ratio, cap)
    return Witness.pth_power(lhs, base, r, K.p)


def one_unit_shift_a(K, b, c, prec=None):
    """Witness r with 1 + b = (1 + b + c) r^p, given v(b) > 0 and v(c) > (p/(p-1)) v(p)."""
    _require_2adic(K)
    ctx = DeltaContext(K.p, K.vp)
    if not _val(b) > 0:
        raise PreconditionError("need v(b) > 0")
    if c.is_zero_at_prec() and c.prec is None:
        return _trivial(K, K.one() + b)
    if not _val(c) > ctx.threshold:
        raise PreconditionError(f"need v(c) > {ctx.threshold}, got {_val(c)}")
    return _class_witness(K, K.one() + b, K.one() + b + c, prec)


def one_unit_shift_b(K, b, c, witness_c: Witness, prec=None):
    """Witness for 1 + b in (1 + b + c)(K^x)^p, given a witness that 1 + c
    is a p-th power and v(bc) > (p/(p-1)) v(p)."""
    _require_2adic(K)
    ctx = DeltaContext(K.p, K.vp)
    if witness_c.kind != "pth-power" or not witness_c.verify():
        raise PreconditionError("the supplied witness for 1 + c does not verify")
    if not witness_c.data["lhs"].equals_at(K.one() + c) or not witness_c.data["base"].equals_at(K.one()):
        raise PreconditionError("the supplied witness is not about 1 + c")
    if not _val(b * c) > ctx.threshold:
        raise PreconditionError(f"need v(bc) > {ctx.threshold}")
    if c.is_zero_at_prec() and c.prec is None:
        return _trivial(K, K.one() + b)
    return _class_witness(K, K.one() + b, K.one() + b + c, prec)


def one_unit_shift_c(K, b, c, prec=None):
    """Witness r with 1 + b - pc = (1 + b + c^p) r^p, given v(b) >= v(p)/(p-1)
    and v(c^p) > v(p)."""
    _require_2adic(K)
    p = K.p
    if not _val(b) >= K.vp / (p - 1):
        raise PreconditionError(f"need v(b) >= {K.vp / (p - 1)}")
    if c.is_zero_at_prec() and c.prec is None:
        return _trivial(K, K.one() + b)
    if not _val(c) * p > K.vp:
        raise PreconditionError(f"need v(c^p) > {K.vp}")
    return _class_witness(K, K.one() + b - c.scale(p), K.one() + b + c**p, prec)


def rewrite_delta_inverse(K, b, d, prec=None):
    """(Delta^{-1}(d), witness) with (1 + b + d) and (1 + b + Delta^{-1}(d))
    in the same p-th power class."""
    _require_2adic(K)
    p = K.p
    ctx = DeltaContext(p, K.vp)
    if not _val(b) >= K.vp / (p - 1):
        raise PreconditionError(f"need v(b) >= {K.vp / (p - 1)}")
    if d.is_zero_at_prec() and d.prec is None:
        return K.zero(), _trivial(K, K.one() + b)
    if not delta_iter(ctx, -1, _val(d)) > K.vp:
        raise PreconditionError("need delta^{-1}(v(d)) > v(p)")
    e = delta_op_inverse(d)
    return e, _class_witness(K, K.one() + b + d, K.one() + b + e, prec)
