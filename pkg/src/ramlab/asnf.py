"""Artin-Schreier normal forms in characteristic p.

Pipeline for f(x) over the perfect hull K of F_q((t)):

1. reduce f modulo wp(K[x]): a x^(pj) = wp(a^(1/p) x^j) + a^(1/p) x^j;
2. Hasse-Taylor expansion f(X) = sum f_i(X0) (X - X0)^i with X0 symbolic;
3. fold every index i = j p^m (p not dividing j) down to j, the coefficient
   becoming f_i(X0)^(p^-m);
4. stabilize the values of the folded coefficients along the approximants of
   x, pick a center c satisfying the distinctness constraints, put
   z = (x - c)/d with v(d) = v(x - c);
5. absorb coefficients of positive value (wp(u) = m is solvable by Hensel).

Every move is recorded, and the final identity
f(x) = g(z) + wp(W) + sum absorbed is rechecked exactly in K[x].
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .approx import DEFAULT_CONFIRMATIONS, ApproximationType, Constraint, choose_center, stabilize
from .errors import InsufficientPrecision, PreconditionError
from .fieldcore.models import SeriesElement, SeriesField
from .fieldcore.oneunit import Witness
from .fieldcore.poly import Poly
from .fieldcore.roots import hensel_lift
from .ordval import Value

__all__ = [
    "wp",
    "FracPoly",
    "hasse_taylor",
    "fold_p_indices",
    "FoldResult",
    "prefold",
    "WpClassElement",
    "AbsorbedTerm",
    "ASNormalForm",
    "as_normal_form",
    "generator_criterion",
    "CriterionResult",
    "reduce_degree_p_extension",
    "ReductionResult",
]


def _require_char_p(model):
    if not isinstance(model, SeriesField):
        raise PreconditionError("Artin-Schreier calculus needs a characteristic p model")


def wp(a):
    """a^p - a, for an element or a polynomial."""
    _require_char_p(a.model)
    return a ** a.model.p - a


# -- polynomials in X0 with fractional exponents -------------------------------


class FracPoly:
    """Finite sum of a_e X0^e with e >= 0 rational (exponent -> exact element)."""

    __slots__ = ("model", "terms")

    def __init__(self, model, terms=None):
        self.model = model
        self.terms = {Fraction(e): c for e, c in (terms or {}).items()
                      if not (c.is_zero_at_prec() and c.prec is None)}

    @classmethod
    def from_poly(cls, poly: Poly):
        return cls(poly.model, {i: c for i, c in poly.items()})

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other):
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out[e] + c if e in out else c
        return FracPoly(self.model, out)

    def __neg__(self):
        return FracPoly(self.model, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def pth_root(self):
        p = self.model.p
        return FracPoly(self.model, {e / p: c.frobenius_inverse() for e, c in self.terms.items()})

    def frobenius(self):
        p = self.model.p
        return FracPoly(self.model, {e * p: c.frobenius() for e, c in self.terms.items()})

    def denominator_exponent(self) -> int:
        """Least lam with all exponents in Z after multiplying by p^lam."""
        p, lam = self.model.p, 0
        for e in self.terms:
            d, k = e.denominator, 0
            while d > 1:
                d //= p
                k += 1
            lam = max(lam, k)
        return lam

    def power_poly(self):
        """(P, lam) with P = self^(p^lam) a polynomial in X0 (integer exponents)."""
        lam = self.denominator_exponent()
        fp = self
        for _ in range(lam):
            fp = fp.frobenius()
        d = {int(e): c for e, c in fp.terms.items()}
        return Poly.from_dict(self.model, d), lam

    def __call__(self, c):
        p = self.model.p
        acc = self.model.zero()
        for e, coef in self.terms.items():
            lam = 0
            den = e.denominator
            while den > 1:
                den //= p
                lam += 1
            m = int(e * p**lam)
            val = c**m
            for _ in range(lam):
                val = val.frobenius_inverse()
            acc = acc + coef * val
        return acc

    def __eq__(self, other):
        return isinstance(other, FracPoly) and self.terms == other.terms

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for e in sorted(self.terms):
            c = str(self.terms[e])
            c = f"({c})" if " + " in c else c
            mon = "" if e == 0 else ("X0" if e == 1 else f"X0^({e})" if e.denominator > 1 else f"X0^{e}")
            parts.append(c if not mon else (mon if c == "1" else f"{c}*{mon}"))
        return " + ".join(parts)

    __repr__ = __str__


def hasse_taylor(f: Poly):
    """[f_0, ..., f_n] with f(X) = sum f_i(X0) (X - X0)^i (Hasse derivatives)."""
    return f.taylor()


@dataclass
class FoldResult:
    """targets: index j (0 or prime to p) -> folded coefficient in X0.
    witness: list of (w(X0), k) standing for w(X0) (X - X0)^k, with
    sum_i f_i Y^i = sum_j targets_j Y^j + wp(sum w Y^k)."""

    p: int
    targets: dict
    witness: list

    def verify(self, taylor) -> bool:
        model = taylor[0].model if taylor else None
        lhs = {i: FracPoly.from_poly(fi) for i, fi in enumerate(taylor) if not fi.is_zero()}
        rhs = {j: b for j, b in self.targets.items() if not b.is_zero()}
        for w, k in self.witness:
            rhs[k * self.p] = rhs.get(k * self.p, FracPoly(model)) + w.frobenius()
            rhs[k] = rhs.get(k, FracPoly(model)) - w
        keys = set(lhs) | set(rhs)
        zero = FracPoly(model)
        return all((lhs.get(k, zero) - rhs.get(k, zero)).is_zero() for k in keys)


def fold_p_indices(taylor) -> FoldResult:
    """Fold each index j p^m (m >= 1) onto j; index 0 is kept."""
    if not taylor:
        return FoldResult(0, {}, [])
    model = taylor[0].model
    _require_char_p(model)
    p = model.p
    if not model.is_perfect:
        raise PreconditionError("folding needs a perfect coefficient model")
    targets: dict = {}
    witness = []
    for i, fi in enumerate(taylor):
        expr = FracPoly.from_poly(fi)
        if expr.is_zero():
            continue
        j = i
        while j and j % p == 0:
            expr = expr.pth_root()
            j //= p
            # expr^p Y^(jp) = wp(expr Y^j) + expr Y^j
            witness.append((expr, j))
        targets[j] = targets[j] + expr if j in targets else expr
    return FoldResult(p, targets, witness)


def prefold(f: Poly):
    """(f1, W) with f = f1 + wp(W) and no x^(pj), j >= 1, left in f1."""
    model = f.model
    _require_char_p(model)
    p = model.p
    coeffs = {i: c for i, c in f.items()}
    W: dict = {}
    for i in sorted(coeffs, reverse=True):
        if i == 0 or i not in coeffs:
            continue
        j, a = i, coeffs[i]
        while j % p == 0:
            a = a.frobenius_inverse()
            j //= p
            W[j] = W[j] + a if j in W else a
        if j != i:
            del coeffs[i]
            s = coeffs[j] + a if j in coeffs else a
            if s.is_zero_at_prec():
                coeffs.pop(j, None)
            else:
                coeffs[j] = s
    return Poly.from_dict(model, coeffs), Poly.from_dict(model, W)


# -- normal form ---------------------------------------------------------------


@dataclass
class AbsorbedTerm:
    """a z^j with v(a) > 0; certificates solve wp(u) = a z_nu^j at late approximants."""

    index: int
    coeff: object
    certificates: list = field(default_factory=list)

    def verify(self) -> bool:
        return bool(self.certificates) and all(w.verify() for w in self.certificates)


@dataclass
class WpClassElement:
    """original(x) = representative(z) + wp(W(x)) + sum absorbed, z = (x - c)/d."""

    original: Poly
    representative: Poly
    W: Poly
    absorbed: list

    def residual(self, c, d):
        model = self.original.model
        zx = Poly(model, [-c * d.inv(), d.inv()])
        total = self.representative(zx) + wp(self.W)
        for term in self.absorbed:
            total = total + Poly.const(model, term.coeff) * zx ** term.index
        return self.original - total

    def verify_identity(self, c, d) -> bool:
        return self.residual(c, d).is_zero()


@dataclass
class ASNormalForm:
    c: SeriesElement
    d: SeriesElement
    coeffs: list
    i0: int | None
    witness: WpClassElement
    p: int
    center_index: int = 0
    gamma: Value | None = None
    stabilizations: dict = field(default_factory=dict)

    @property
    def g(self) -> Poly:
        return self.witness.representative

    def shape_violations(self):
        """Names of the violated normal-form conditions (empty when all hold)."""
        out = []
        if self.gamma is not None and self.d.value() != self.gamma:
            out.append("v(z) != 0")
        vals = []
        for i, a in enumerate(self.coeffs):
            if i == 0 or a.is_zero_at_prec():
                continue
            if i % self.p == 0:
                out.append(f"a_{i} nonzero with p | {i}")
            if not a.value() < 0:
                out.append(f"v(a_{i}) >= 0")
            vals.append(a.value())
        if len(set(vals)) != len(vals):
            out.append("values of nonzero a_i not distinct")
        return out

    def verify(self) -> dict:
        checks = {
            "identity": self.witness.verify_identity(self.c, self.d),
            "shape": not self.shape_violations(),
        }
        for n, term in enumerate(self.witness.absorbed):
            checks[f"absorbed[{n}]"] = term.verify()
        return checks

    def to_json(self) -> dict:
        return {
            "c": str(self.c),
            "d": str(self.d),
            "v(x-c)": str(self.gamma),
            "g": self.g.format("z"),
            "coefficients": [str(a) for a in self.coeffs],
            "i0": self.i0,
            "W": self.witness.W.format("x"),
            "absorbed": [{"term": f"{term.coeff}*z^{term.index}",
                          "certificates": [w.to_json() for w in term.certificates]}
                         for term in self.witness.absorbed],
        }


def _stable_value(at, expr: FracPoly, confirmations):
    if expr.is_zero():
        return None, None
    P, lam = expr.power_poly()
    cert = stabilize(at, P, confirmations)
    return cert, cert.stable_value / (expr.model.p ** lam)


def _absorb_certificates(at, center_index, c, d, j, a, late=3, target_gap=4):
    model = a.model
    p = model.p
    certs = []
    if not at.ensure(center_index + 1 + late):
        raise InsufficientPrecision("not enough late approximants to certify absorption")
    d_inv = d.inv()
    for nu in range(center_index + 1, center_index + 1 + late):
        z = (at[nu][0] - c) * d_inv
        m = a * z**j
        h = Poly(model, [-m, -model.one()] + [model.zero()] * (p - 2) + [model.one()])
        u = hensel_lift(h, 0, m.value() + target_gap)
        certs.append(Witness.wp_preimage(m.with_prec(u.prec), u, p,
                                         f"a_{j} z^{j} at approximant {nu} in wp(K)"))
    return certs


def as_normal_form(f: Poly, at: ApproximationType,
                   confirmations: int = DEFAULT_CONFIRMATIONS) -> ASNormalForm:
    model = f.model
    _require_char_p(model)
    if not model.is_perfect:
        raise PreconditionError("normal forms are computed over the perfect hull")
    p = model.p
    f1, W0 = prefold(f)
    fold = fold_p_indices(hasse_taylor(f1))
    stab, beta = {}, {}
    for j, expr in sorted(fold.targets.items()):
        cert, val = _stable_value(at, expr, confirmations)
        if cert is not None and not val.is_inf:
            stab[j], beta[j] = cert, val
    cons = []
    idx = sorted(j for j in beta if j > 0)
    for j in idx:
        cons.append(Constraint(j, beta[j].q, "!="))
        if 0 in beta:
            cons.append(Constraint(j, beta[j].q - beta[0].q, "!="))
    for a_i, j in enumerate(idx):
        for k in idx[a_i + 1:]:
            cons.append(Constraint(j - k, beta[j].q - beta[k].q, "!="))
    nu, c, gamma = choose_center(at, cons, [s.alpha0 for s in stab.values()])
    d = model.t(gamma.q)
    Y = Poly(model, [-c, model.one()])
    W = W0
    for w, k in fold.witness:
        W = W + Poly.const(model, w(c)) * Y**k
    n = max(fold.targets, default=0)
    coeffs = [model.zero() for _ in range(n + 1)]
    for j, expr in fold.targets.items():
        coeffs[j] = expr(c) * d**j
    absorbed = []
    for j in range(1, n + 1):
        a = coeffs[j]
        if not a.is_zero_at_prec() and a.value() > 0:
            absorbed.append(AbsorbedTerm(j, a, _absorb_certificates(at, nu, c, d, j, a)))
            coeffs[j] = model.zero()
    g = Poly(model, coeffs)
    coeffs = list(g.coeffs) or [model.zero()]
    i0 = _least_index(coeffs, p)
    witness = WpClassElement(f, g, W, absorbed)
    return ASNormalForm(c, d, coeffs, i0, witness, p, nu, gamma, stab)


def _least_index(coeffs, p):
    tail = [(a.value(), i) for i, a in enumerate(coeffs) if i > 0 and not a.is_zero_at_prec()]
    if not tail:
        return None
    v0 = min(v for v, _ in tail)
    at_min = [i for v, i in tail if v == v0]
    return at_min[0] if len(at_min) == 1 and at_min[0] % p else None


# -- generator criterion -------------------------------------------------------


@dataclass(frozen=True)
class CriterionResult:
    holds: bool
    i0: int | None = None
    reason: str = ""

    def to_json(self):
        return {"holds": self.holds, "i0": self.i0, "reason": self.reason}


def _coefficient_values(g):
    """index -> Value for the nonzero a_i, i >= 1."""
    if isinstance(g, ASNormalForm):
        g = g.coeffs
    if isinstance(g, Poly):
        g = list(g.coeffs)
    items = g.items() if isinstance(g, dict) else enumerate(g)
    out = {}
    for i, a in items:
        if i < 1 or a is None:
            continue
        if isinstance(a, (Value, int, Fraction, tuple)):
            v = Value.coerce(a)
            if not v.is_inf:
                out[i] = v
            continue
        if a.is_zero_at_prec():
            if a.prec is None:
                continue
            raise InsufficientPrecision(f"a_{i} is zero at precision")
        out[i] = a.value()
    return out


def generator_criterion(g, p: int | None = None) -> CriterionResult:
    """Holds iff some i0 with p not dividing i0 carries the unique least value
    among the nonzero a_1..a_n."""
    if p is None:
        if isinstance(g, ASNormalForm):
            p = g.p
        elif isinstance(g, Poly):
            p = g.model.p
        else:
            raise PreconditionError("p is required for raw coefficient data")
    vals = _coefficient_values(g)
    if not vals:
        return CriterionResult(False, None, "no nonzero coefficient a_i with i > 0")
    least = min(vals.values())
    at_min = sorted(i for i, v in vals.items() if v == least)
    if len(at_min) > 1:
        return CriterionResult(False, None, f"least value {least} not unique (indices {at_min})")
    i0 = at_min[0]
    if i0 % p == 0:
        if all(i % p == 0 for i in vals):
            return CriterionResult(False, None, "no index prime to p")
        return CriterionResult(False, None, f"least value at index {i0} divisible by p")
    return CriterionResult(True, i0, "")


@dataclass
class ReductionResult:
    kind: str  # "new-generator" | "degenerate" | "criterion-fails"
    normal_form: ASNormalForm
    criterion: CriterionResult | None = None

    def to_json(self):
        out = {"kind": self.kind, "normal_form": self.normal_form.to_json()}
        if self.criterion is not None:
            out["criterion"] = self.criterion.to_json()
        if self.kind == "new-generator":
            out["statement"] = ("theta' = theta - W (up to absorbed Hensel parts) satisfies "
                                "wp(theta') = g(z) and generates the same extension")
        elif self.kind == "degenerate":
            out["statement"] = "g is constant: the extension is defined over K"
        return out


def reduce_degree_p_extension(f: Poly, at: ApproximationType,
                              confirmations: int = DEFAULT_CONFIRMATIONS) -> ReductionResult:
    nf = as_normal_form(f, at, confirmations)
    if nf.g.degree <= 0:
        return ReductionResult("degenerate", nf)
    crit = generator_criterion(nf)
    return ReductionResult("new-generator" if crit.holds else "criterion-fails", nf, crit)
