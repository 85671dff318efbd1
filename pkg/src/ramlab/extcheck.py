"""Invariants of finite extensions of valued fields: ramification index,
residue degree, defect, the three tameness axioms, the henselian element
test, and immediacy over a composite place on F_q((u))((t)).

General finite extensions are out of reach, so the generator's minimal
polynomial must have one of a few recognizable shapes (Eisenstein or pure
radical, unramified, Artin-Schreier), or the value data is declared.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd, log

from .errors import InconsistentData, InsufficientPrecision, PreconditionError, UnsupportedSpec
from .fieldcore.models import IteratedSeriesField, SeriesField
from .fieldcore.poly import Poly
from .gf import poly_deriv, poly_eval, poly_is_irreducible, poly_roots
from .ordval import Value

__all__ = [
    "ExtensionSpec",
    "ExtensionInvariants",
    "FieldDescriptor",
    "extension_invariants",
    "tame_check",
    "henselian_element_test",
    "CompositeVerdict",
    "composite_immediate_check",
    "layerwise_immediate_check",
    "tower_invariants",
    "is_power_of",
]


def is_power_of(n: int, p: int) -> bool:
    if n < 1:
        return False
    while n % p == 0:
        n //= p
    return n == 1


@dataclass(frozen=True)
class FieldDescriptor:
    """Coarse shape of a complete discretely valued field: residue field size
    q and the value of its uniformizer, measured in the base's units."""

    q: int
    uniformizer_value: Fraction


@dataclass
class ExtensionSpec:
    base: object
    minpoly: Poly
    declared: dict | None = None

    def __post_init__(self):
        if self.minpoly.model != self.base:
            raise PreconditionError("minimal polynomial is not over the base model")
        if self.minpoly.degree < 1:
            raise PreconditionError("minimal polynomial must have degree >= 1")
        lead = self.minpoly.coeffs[-1]
        if not lead.equals_at(self.base.one()):
            raise PreconditionError("minimal polynomial must be monic")

    @property
    def degree(self) -> int:
        return self.minpoly.degree


@dataclass
class ExtensionInvariants:
    degree: int
    e: int
    f: int
    defect: int
    te1: bool
    te2: bool
    te3: bool
    p: int
    rule: str = ""
    field: FieldDescriptor | None = None

    @property
    def tame(self) -> bool:
        return self.te1 and self.te2 and self.te3

    def to_json(self):
        return {"degree": self.degree, "e": self.e, "f": self.f, "defect": self.defect,
                "te1": self.te1, "te2": self.te2, "te3": self.te3, "tame": self.tame,
                "residue_char": self.p, "rule": self.rule}


def _residue_char(K) -> int:
    return K.p


def _residue_size(K) -> int:
    return K.q if isinstance(K, SeriesField) else K.p


def _value(c):
    if c.is_zero_at_prec():
        if c.prec is None:
            return None
        raise InsufficientPrecision(f"value of coefficient {c} unknown at precision")
    return c.value()


def _order_mod_group(K, x: Fraction, bound: int) -> int | None:
    """Least k <= bound with k*x in vK."""
    for k in range(1, bound + 1):
        if isinstance(K, SeriesField):
            if K.group.contains(Value.coerce(k * x)):
                return k
        elif (k * x).denominator == 1:
            return k
    return None


def _build(spec, e, f, rule, residue_separable=True, field_=None):
    n = spec.degree
    p = _residue_char(spec.base)
    if e < 1 or f < 1 or n % (e * f):
        raise InconsistentData(f"degree {n} is not a multiple of e*f = {e * f}")
    defect = n // (e * f)
    if not is_power_of(defect, p):
        raise InconsistentData(f"defect {defect} is not a power of the residue characteristic {p}")
    return ExtensionInvariants(n, e, f, defect, e % p != 0, bool(residue_separable), defect == 1,
                               p, rule, field_)


def _radical(spec):
    """X^n - a: the value data of a^(1/n)."""
    P = spec.minpoly
    n = P.degree
    if any(not c.is_zero_at_prec() for c in P.coeffs[1:-1]):
        return None
    a = -P.coeffs[0]
    va = _value(a)
    if va is None or va.rank != 1:
        return None
    x = va.q / n
    e = _order_mod_group(spec.base, x, n)
    if e != n:
        return None
    q = _residue_size(spec.base)
    return _build(spec, n, 1, "radical" if va.q != 1 else "eisenstein", True,
                  FieldDescriptor(q, Fraction(1, n)))


def _eisenstein(spec):
    K = spec.base
    if K.rank != 1 or K.uniformizer_value() is None:
        return None
    P = spec.minpoly
    for c in P.coeffs[:-1]:
        v = _value(c)
        if v is not None and not v > 0:
            return None
    v0 = _value(P.coeffs[0])
    if v0 != K.uniformizer_value():
        return None
    n = P.degree
    return _build(spec, n, 1, "eisenstein", True, FieldDescriptor(_residue_size(K), Fraction(1, n)))


def _unramified(spec):
    K = spec.base
    P = spec.minpoly
    for c in P.coeffs:
        v = _value(c)
        if v is not None and v < Value((0,) * K.rank):
            return None
    red = [c.residue() for c in P.coeffs]
    F = K.F
    if not poly_is_irreducible(F, red):
        return None
    n = P.degree
    return _build(spec, 1, n, "unramified", True, FieldDescriptor(_residue_size(K) ** n, Fraction(1)))


def _artin_schreier(spec):
    K = spec.base
    if not isinstance(K, SeriesField) or K.rank != 1:
        return None
    P = spec.minpoly
    p = K.p
    if P.degree != p:
        return None
    cs = P.coeffs
    if any(not c.is_zero_at_prec() for c in cs[2:-1]) or not cs[1].equals_at(-K.one()):
        return None
    a = -cs[0]
    va = _value(a)
    if va is None or va > 0:
        raise UnsupportedSpec("Artin-Schreier right-hand side of positive value: the polynomial splits")
    if va < 0:
        if va.q.denominator != 1 or va.q.numerator % p == 0:
            raise UnsupportedSpec("Artin-Schreier right-hand side value divisible by p: reduce it first")
        return _build(spec, p, 1, "artin-schreier-ramified", True,
                      FieldDescriptor(K.q, Fraction(1, p)))
    if K.F.trace(a.residue()) == 0:
        raise UnsupportedSpec("Artin-Schreier right-hand side with trace-zero residue: the polynomial splits")
    return _build(spec, 1, p, "artin-schreier-unramified", True, FieldDescriptor(K.q**p, Fraction(1)))


def extension_invariants(spec: ExtensionSpec) -> ExtensionInvariants:
    """(e, f, defect) and the tameness axioms for the catalog shapes."""
    if spec.declared is not None:
        d = spec.declared
        if "e" not in d or "f" not in d:
            raise InconsistentData("declared data needs e and f")
        sep = d.get("residue_separable", True)
        return _build(spec, int(d["e"]), int(d["f"]), "declared", sep)
    if spec.degree == 1:
        return _build(spec, 1, 1, "trivial", True,
                      FieldDescriptor(_residue_size(spec.base), Fraction(1)))
    for rule in (_artin_schreier, _eisenstein, _radical, _unramified):
        inv = rule(spec)
        if inv is not None:
            return inv
    raise UnsupportedSpec("minimal polynomial shape not in the catalog; declare e and f")


def tame_check(inv: ExtensionInvariants, p: int | None = None) -> bool:
    """TE1 and TE2 and TE3 with residue characteristic p."""
    p = inv.p if p is None else p
    te1 = p == 0 or inv.e % p != 0
    return te1 and inv.te2 and inv.defect == 1


def henselian_element_test(h: Poly, residue_root=None) -> bool:
    """Integral monic h whose reduction has the residue of eta as a simple root."""
    K = h.model
    if not h.coeffs or not h.coeffs[-1].equals_at(K.one()):
        raise PreconditionError("h must be monic")
    zero = Value((0,) * K.rank)
    for c in h.coeffs:
        if c.is_zero_at_prec():
            if c.prec is not None and c.prec < zero:
                raise InsufficientPrecision(f"integrality of {c} unknown at precision")
            continue
        if c.value() < zero:
            return False
    F = K.F
    red = [c.residue() for c in h.coeffs]
    if residue_root is None:
        if h.degree != 1:
            raise PreconditionError("a residue root is needed for degree > 1")
        residue_root = poly_roots(F, red)[0]
    if poly_eval(F, red, residue_root) != 0:
        return False
    return poly_eval(F, poly_deriv(F, red), residue_root) != 0


# -- composite places on F_q((u))((t)) -------------------------------------------


@dataclass
class CompositeVerdict:
    immediate: bool
    reason: str = ""
    layers: dict = field(default_factory=dict)

    def to_json(self):
        return {"immediate": self.immediate, "reason": self.reason, "layers": self.layers}


def _composite_shape(spec: ExtensionSpec):
    """('trivial',) | ('constant', k) | ('radical', n, a, b) for X^n - u^a t^b."""
    L = spec.base
    if not isinstance(L, IteratedSeriesField):
        raise UnsupportedSpec("composite immediacy needs the F_q((u))((t)) model")
    P = spec.minpoly
    n = P.degree
    if n == 1:
        return ("trivial",)
    consts = all(c.is_zero_at_prec() or set(c.terms) == {(Fraction(0), Fraction(0))} for c in P.coeffs)
    if consts:
        red = [c.residue() for c in P.coeffs]
        if not poly_is_irreducible(L.F, red):
            raise UnsupportedSpec("constant polynomial is reducible over the constant field")
        return ("constant", n)
    if all(c.is_zero_at_prec() for c in P.coeffs[1:-1]):
        a0 = -P.coeffs[0]
        if len(a0.terms) == 1:
            (key, coeff), = a0.terms.items()
            b, a = (int(x) for x in key)
            if coeff == 1 and all(x.denominator == 1 for x in key) and gcd(gcd(n, a), b) == 1:
                return ("radical", n, a, b)
    raise UnsupportedSpec("extension shape not in the composite catalog")


def composite_immediate_check(spec: ExtensionSpec) -> CompositeVerdict:
    """Immediacy of L'|L under P = Q1 Q2 (lex value group Z^2), decided from
    the rank-2 value lattice and the residue field of P directly."""
    shape = _composite_shape(spec)
    if shape[0] == "trivial":
        return CompositeVerdict(True, "", {"value_index": 1, "residue_degree": 1})
    if shape[0] == "constant":
        k = shape[1]
        return CompositeVerdict(False, f"residue degree {k} over the residue field of P",
                                {"value_index": 1, "residue_degree": k})
    _, n, a, b = shape
    # order of (b, a)/n in Q^2 / Z^2
    index = next(k for k in range(1, n + 1) if (k * b) % n == 0 and (k * a) % n == 0)
    if index == 1:
        return CompositeVerdict(True, "", {"value_index": 1, "residue_degree": 1})
    return CompositeVerdict(False, f"value group index {index} under P",
                            {"value_index": index, "residue_degree": 1})


def layerwise_immediate_check(spec: ExtensionSpec) -> CompositeVerdict:
    """The same verdict through the layers: v_Q1 L' = v_Q1 L and the residue
    extension L'Q1 | LQ1 immediate under Q2."""
    shape = _composite_shape(spec)
    if shape[0] == "trivial":
        return CompositeVerdict(True, "", {"q1_index": 1, "q2_index": 1, "q2_residue_degree": 1})
    if shape[0] == "constant":
        # t-adic layer: unramified with residue field F_(q^k)((u)); u-adic layer: residue degree k
        k = shape[1]
        return CompositeVerdict(False, f"Q2 layer: residue degree {k}",
                                {"q1_index": 1, "q2_index": 1, "q2_residue_degree": k})
    _, n, a, b = shape
    g = gcd(n, b)
    q1_index = n // g
    # eta^(n/g) / t^(b/g) has residue u^(a/g): the residue extension is X^g - u^a over F_q((u))
    q2_index = g // gcd(g, a)
    layers = {"q1_index": q1_index, "q2_index": q2_index, "q2_residue_degree": 1}
    if q1_index != 1:
        return CompositeVerdict(False, f"Q1 value index {q1_index}", layers)
    if q2_index != 1:
        return CompositeVerdict(False, f"Q2 layer: value index {q2_index}", layers)
    return CompositeVerdict(True, "", layers)


# -- towers --------------------------------------------------------------------


def tower_invariants(base_q: int, first: ExtensionInvariants, second: ExtensionInvariants) -> dict:
    """Invariants of E2 | K read off the final field shape, next to the
    products of the step invariants. ``base_q`` is the residue field size of K."""
    if first.field is None or second.field is None:
        raise UnsupportedSpec("towers need catalog steps with a known field shape")
    if not is_power_of(second.field.q, first.field.q) or not is_power_of(first.field.q, base_q):
        raise InconsistentData("the second step is not over the field of the first step")
    total_value = first.field.uniformizer_value * second.field.uniformizer_value
    e_total = 1 / total_value
    f_total = round(log(second.field.q) / log(base_q))
    if e_total.denominator != 1 or base_q**f_total != second.field.q:
        raise InconsistentData("tower field shape is inconsistent")
    degree = first.degree * second.degree
    e_total = int(e_total)
    return {
        "direct": {"degree": degree, "e": e_total, "f": f_total, "defect": degree // (e_total * f_total)},
        "product": {"degree": degree, "e": first.e * second.e, "f": first.f * second.f,
                    "defect": first.defect * second.defect},
    }
