"""p-th roots, Newton/Hensel lifting and p-th power membership."""

from __future__ import annotations

from dataclasses import dataclass

from ..errors import (
    InsufficientPrecision,
    MultipleRoot,
    NotAPthPower,
    PreconditionError,
)
from ..gf import poly_deriv, poly_eval
from ..ordval import Value
from .models import PadicElement, PadicField, SeriesElement
from .poly import Poly

__all__ = ["pth_root", "hensel_lift", "is_pth_power", "PthPowerVerdict", "padic_unit_root"]

_MAX_NEWTON_STEPS = 256


def _rel_prec(a: PadicElement, cap) -> int:
    if a.prec is not None:
        return int(a.prec.q) - a.e
    return int(Value.coerce(cap).q)


def padic_unit_root(p: int, u: int, rel: int):
    """Newton lift of the smallest residue candidate r0 (mod p^2) with
    r0^p = u mod p^min(rel, 3). For p = 2 the smaller of the two square roots
    (as a residue mod 2^(rel-1)) is returned. Returns (r, rel_prec_of_r), or
    None when u is no p-th power.

    Raises InsufficientPrecision if ``rel`` is too small to decide.
    """
    need = 3 if p == 2 else 2
    if rel < need:
        raise InsufficientPrecision(f"unit known mod {p}^{rel}; need {p}^{need} to decide")
    check = p ** min(rel, 3)
    r0 = next((r for r in range(1, p * p) if r % p and (pow(r, p, check) - u) % check == 0), None)
    if r0 is None:
        return None
    if rel < 3:
        return r0, rel - 1
    mod = p ** (rel + 1)
    r = r0
    for _ in range(_MAX_NEWTON_STEPS):
        err = r**p - u
        if err % p**rel == 0:
            m = p ** (rel - 1)
            # the other square root is -r; report the smaller representative
            r = r % m if p != 2 else min(r % m, -r % m)
            return r, rel - 1
        # r <- r - (r^p - u) / (p r^(p-1)); err is divisible by p^3 here
        step = (err // p) * pow(r ** (p - 1), -1, mod) % mod
        r = (r - step) % mod
    raise RuntimeError("Newton iteration for a p-th root did not converge")  # pragma: no cover


def pth_root(a, prec=None):
    """An r with r^p = a at precision.

    In characteristic p the root is unique: coefficientwise Frobenius inverse
    with exponents divided by p. In Q_p the root is the Newton lift of the
    smallest residue candidate (deterministic choice among the p-th roots).
    """
    model = a.model
    if isinstance(a, SeriesElement):
        p = model.p
        if model.group.is_p_divisible(p):
            return a.frobenius_inverse()
        if a.prec is not None:
            raise PreconditionError("exponent group is not p-divisible")
        if any(x % p for key in a.terms for x in key):
            raise NotAPthPower("exponent not divisible by p in a non-perfect series field")
        return SeriesElement(model, {tuple(x / p for x in k): model.F.frobenius_inverse(c)
                                     for k, c in a.terms.items()})
    p = model.p
    if a.is_zero_at_prec():
        if a.prec is None:
            return model.zero()
        raise InsufficientPrecision("p-th root of an element that is 0 at precision")
    if a.e % p:
        raise NotAPthPower(f"valuation {a.e} not divisible by {p}")
    cap = prec if prec is not None else model.default_prec
    rel = _rel_prec(a, cap)
    if a.prec is None and a.u == 1:
        return PadicElement(model, 1, a.e // p, None)
    found = padic_unit_root(p, a.u, rel)
    if found is None:
        raise NotAPthPower(f"unit {a.u} mod {p}^{rel} is not a {p}-th power")
    r, r_rel = found
    e = a.e // p
    if a.prec is None and r**p == a.u:
        return PadicElement(model, r, e, None)
    return PadicElement(model, r, e, e + r_rel)


def hensel_lift(f: Poly, r0: int, target_prec):
    """The root of ``f`` with residue ``r0``, to absolute precision ``target_prec``.

    Requires integral coefficients and r0 a simple root of the reduction.
    """
    model = f.model
    target = Value.coerce(target_prec)
    for c in f.coeffs:
        if c.value_lower_bound() < Value((0,) * model.rank):
            if c.is_zero_at_prec():
                raise InsufficientPrecision("coefficient integrality unknown at precision")
            raise PreconditionError("polynomial coefficients are not integral")
    F = model.F
    fbar = [c.residue() for c in f.coeffs]
    if poly_eval(F, fbar, r0) != 0:
        raise PreconditionError(f"{r0} is not a root of the reduced polynomial")
    if poly_eval(F, poly_deriv(F, fbar), r0) == 0:
        raise MultipleRoot(f"{r0} is a multiple root of the reduced polynomial")
    df = f.derivative()
    r = model.residue_lift(r0)
    for _ in range(_MAX_NEWTON_STEPS):
        fr = f(r)
        if fr.value_lower_bound() >= target:
            return r.with_prec(target)
        if fr.is_zero_at_prec():
            raise InsufficientPrecision("input precision too low to reach the target")
        r = (r - fr * df(r).inv(prec=target)).with_prec(target)
    raise RuntimeError("Hensel lifting did not converge")  # pragma: no cover


@dataclass(frozen=True)
class PthPowerVerdict:
    status: str  # "yes" | "no" | "insufficient-precision"
    witness: object = None

    def __bool__(self):
        return self.status == "yes"


def is_pth_power(a, prec=None) -> PthPowerVerdict:
    """Decide a in (K^x)^p where the precision allows it."""
    from .oneunit import Witness

    model = a.model
    p = model.p
    if a.is_zero_at_prec():
        return PthPowerVerdict("insufficient-precision" if a.prec is not None else "no")
    if isinstance(a, SeriesElement):
        if not model.group.is_p_divisible(p):
            if any(x % p for key in a.terms for x in key):
                return PthPowerVerdict("no")
            if a.prec is not None:
                return PthPowerVerdict("insufficient-precision")
        r = pth_root(a)
        return PthPowerVerdict("yes", Witness.pth_power(a, model.one(), r, p))
    if not isinstance(model, PadicField):  # pragma: no cover
        raise PreconditionError("unsupported model")
    if a.e % p:
        return PthPowerVerdict("no")
    try:
        r = pth_root(a, prec)
    except NotAPthPower:
        return PthPowerVerdict("no")
    except InsufficientPrecision:
        return PthPowerVerdict("insufficient-precision")
    return PthPowerVerdict("yes", Witness.pth_power(a, model.one(), r, p))
