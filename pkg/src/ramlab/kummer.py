"""Normal forms of 1-units 1 + f(x) modulo squares over the 2-adics, and a
value-level simulator of the monomial folding for arbitrary p.

The exact engine works in three coordinates: x, y = (x - c1)/a and
z = (y - c2)/b. Each step that changes the polynomial within its class
modulo p-th powers is logged. Polynomial identities (multiplication by
s(y)^p, pulling out a constant) are kept as exact identities. The steps
justified by the 1-unit rules are rechecked pointwise: each one is
re-derived at late approximants of x, using the independent residue-class
test for squares.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .approx import DEFAULT_CONFIRMATIONS, ApproximationType, Constraint, choose_center, stabilize
from .errors import (
    ApproximantsExhausted,
    GuardViolation,
    InsufficientPrecision,
    NotAPthPower,
    PreconditionError,
    ShapeViolation,
    SquareRootUnavailable,
)
from .fieldcore.models import PadicField
from .fieldcore.oneunit import (
    Witness,
    delta_op_inverse,
    one_unit_shift_a,
    one_unit_shift_c,
    rewrite_delta_inverse,
)
from .fieldcore.poly import Poly
from .fieldcore.roots import is_pth_power, pth_root
from .ordval import DeltaContext, Value, delta_iter

__all__ = [
    "geo_inverse",
    "ValueMonomialSystem",
    "value_sim_fold",
    "value_sim_terminates",
    "KummerNormalForm",
    "ChainEntry",
    "kummer_normal_form_p2",
    "replay_trace",
]


# -- geometric series ----------------------------------------------------------


def geo_inverse(u: Poly, modulus) -> Poly:
    """s with s*u = 1 modulo terms of value >= modulus (u a 1-unit polynomial)."""
    model = u.model
    M = Value.coerce(modulus)
    one = model.one()
    w = u - one
    for c in u.coeffs:
        if c.prec is not None and c.prec < M:
            raise InsufficientPrecision(f"input known below {c.prec} only, modulus {M}")
    for i, c in w.items():
        if not c.value() > 0:
            raise PreconditionError("u is not a 1-unit polynomial")

    def trunc(P):
        return Poly(model, [c if (not c.is_zero_at_prec() and c.value() < M) else model.zero()
                            for c in P.coeffs])

    s = Poly.const(model, one)
    term = Poly.const(model, one)
    neg_w = trunc(-w)
    while True:
        term = trunc(term * neg_w)
        if term.is_zero():
            return s
        s = s + term


# -- value simulator -----------------------------------------------------------


def _split(i: int, p: int):
    m = 0
    while i % p == 0:
        i //= p
        m += 1
    return i, m


def _rec_json(rec):
    return {k: (str(v) if isinstance(v, Value) else [str(x) for x in v] if isinstance(v, list) else v)
            for k, v in rec.items()}


@dataclass
class ValueMonomialSystem:
    """Monomial index -> value, all in the maximal ideal."""

    p: int
    vp: Value
    entries: dict
    history: list = field(default_factory=list)
    contributions: dict = field(default_factory=dict)

    def __post_init__(self):
        self.vp = Value.coerce(self.vp)
        self.entries = {int(i): Value.coerce(v) for i, v in self.entries.items()}
        for i, v in self.entries.items():
            if i < 1:
                raise PreconditionError("monomial indices start at 1")
            if not v > 0:
                raise PreconditionError(f"value {v} at index {i} is not positive")

    @property
    def count(self) -> int:
        return len(self.entries)

    def to_json(self):
        return {
            "p": self.p,
            "vp": str(self.vp),
            "entries": {str(i): str(v) for i, v in sorted(self.entries.items())},
            "contributions": {str(j): [[s, m, str(v)] for s, m, v in cs]
                              for j, cs in sorted(self.contributions.items())},
            "history": [_rec_json(r) for r in self.history],
        }


def _find_collision(ctx, sources):
    by_target: dict = {}
    for s, v in sources.items():
        j, m = _split(s, ctx.p)
        by_target.setdefault(j, []).append((m, s, delta_iter(ctx, m, v)))
    for j in sorted(by_target):
        cs = sorted(by_target[j])
        for a in range(len(cs)):
            for b in range(a + 1, len(cs)):
                if cs[a][2] == cs[b][2]:
                    return j, cs[a], cs[b]
    return None


def value_sim_fold(sys: ValueMonomialSystem, merge_resolver=None) -> ValueMonomialSystem:
    """Fold indices i p^m onto i at value delta^m(v); merge colliding
    contributions first (lift the lower one by Delta^{-1} and add).

    ``merge_resolver(record)`` may supply the realized value of a merged
    coefficient (default: the collision value, i.e. no cancellation).
    """
    ctx = DeltaContext(sys.p, sys.vp)
    for i, v in sys.entries.items():
        if not v > sys.vp:
            raise PreconditionError(f"value {v} at index {i} is not > v(p)")
    sources = dict(sys.entries)
    history = list(sys.history)
    count = len(sources)
    while True:
        hit = _find_collision(ctx, sources)
        if hit is None:
            break
        j, (m, s_low, _), (ell, s_high, w) = hit
        v = sources[s_low]
        lifted = []
        for _ in range(ell - m):
            v = delta_iter(ctx, -1, v)
            if not v > sys.vp:
                raise GuardViolation("Delta^{-1} gate failed: value would drop to v(p) or below")
            lifted.append(v)
        if v != sources[s_high]:
            raise GuardViolation("collision bookkeeping is inconsistent")
        rec = {"op": "merge", "target": j, "from": s_low, "into": s_high,
               "lifted": lifted, "collision": sources[s_high]}
        merged = sources[s_high] if merge_resolver is None else Value.coerce(merge_resolver(rec))
        rec["merged"] = merged
        del sources[s_low]
        if merged.is_inf:
            del sources[s_high]
        else:
            sources[s_high] = merged
        history.append(rec)
        if not len(sources) < count:
            raise GuardViolation("monomial count did not decrease")
        count = len(sources)
    contributions: dict = {}
    for s in sorted(sources):
        j, m = _split(s, ctx.p)
        val = delta_iter(ctx, m, sources[s])
        if m:
            history.append({"op": "fold", "from": s, "to": j, "steps": m,
                            "value": sources[s], "folded": val})
        contributions.setdefault(j, []).append((s, m, val))
    result = {j: min(v for _, _, v in cs) for j, cs in contributions.items()}
    return ValueMonomialSystem(sys.p, sys.vp, result, history, contributions)


def value_sim_terminates(sys: ValueMonomialSystem, merge_resolver=None) -> dict:
    """Run the simulator to its fixpoint and audit it."""
    out = value_sim_fold(sys, merge_resolver)
    merges = [r for r in out.history if r["op"] == "merge"]
    counts = [sys.count]
    for _ in merges:
        counts.append(counts[-1] - 1)
    ctx = DeltaContext(sys.p, sys.vp)
    # folded values against the closed form, from the surviving source values
    law = all(v == delta_iter(ctx, m, _source_value(out, s, sys)) for cs in out.contributions.values()
              for s, m, v in cs)
    return {
        "final": out,
        "merges": len(merges),
        "initial_count": sys.count,
        "final_count": sum(len(cs) for cs in out.contributions.values()),
        "count_never_increased": len(merges) <= sys.count and all(
            b < a for a, b in zip(counts, counts[1:])),
        "fold_law": law,
    }


def _source_value(out, s, sys):
    for r in reversed(out.history):
        if r["op"] == "merge" and r["into"] == s:
            return r["merged"]
    return sys.entries[s]


# -- exact engine (p = 2) ------------------------------------------------------


@dataclass
class _Mono:
    coef: object
    index: int
    source: int


def _eval_monos(K, monos, w):
    acc = K.zero()
    for m in monos:
        acc = acc + m.coef * w**m.index
    return acc


@dataclass
class _Op:
    kind: str  # "delete" | "fold-step" | "lift-step"
    center: object
    scale: object
    before: list
    mono: _Mono
    after: list
    note: str = ""


@dataclass
class ChainEntry:
    step: str
    note: str
    witnesses: list

    def verify(self) -> bool:
        return all(w.verify() for w in self.witnesses)

    def to_json(self):
        return {"step": self.step, "note": self.note,
                "witnesses": [dict(w.to_json(), verified=w.verify()) for w in self.witnesses]}


@dataclass
class KummerNormalForm:
    c: object
    d: object
    coeffs: list
    i0: int | None
    chain: list
    case: str
    degenerate: bool
    value_trace: list = field(default_factory=list)
    sim_input: dict | None = None
    membership: list = field(default_factory=list)
    p: int = 2
    strengthenings: dict = field(default_factory=dict)
    centers: dict = field(default_factory=dict)

    @property
    def g(self) -> Poly:
        model = self.c.model
        return Poly(model, self.coeffs)

    def shape_violations(self):
        out = []
        K = self.c.model
        theta = DeltaContext(self.p, K.vp).threshold
        if "gamma" in self.centers and self.d.value() != self.centers["gamma"]:
            out.append("v(z) != 0")
        tail = {}
        for i, a in enumerate(self.coeffs):
            if a.is_zero_at_prec():
                continue
            if not a.value() > 0:
                out.append(f"a_{i} not in the maximal ideal")
            if a.value() > theta:
                out.append(f"a_{i} has value > {theta}")
            if i > 0:
                tail[i] = a.value()
        if tail:
            least = min(tail.values())
            at_min = [i for i, v in tail.items() if v == least]
            if len(at_min) != 1 or at_min[0] % self.p == 0:
                out.append("no unique least-value coefficient at an index prime to p")
            elif self.i0 != at_min[0]:
                out.append("i0 mismatch")
        elif not self.degenerate:
            out.append("no coefficient a_i with i > 0")
        return out

    def verify(self) -> dict:
        checks = {f"chain[{n}] {e.step}": e.verify() for n, e in enumerate(self.chain)}
        checks["shape"] = not self.shape_violations()
        checks["membership"] = bool(self.membership) and all(ok for _, ok in self.membership)
        return checks

    def to_json(self):
        return {
            "case": self.case,
            "degenerate": self.degenerate,
            "c": str(self.c),
            "d": str(self.d),
            "g": self.g.format("z"),
            "coefficients": [str(a) for a in self.coeffs],
            "i0": self.i0,
            "centers": {k: str(v) for k, v in self.centers.items()},
            "strengthenings": self.strengthenings,
            "value_trace": [_rec_json(r) for r in self.value_trace],
            "membership": [{"approximant": nu, "square": ok} for nu, ok in self.membership],
            "witness_chain": [e.to_json() for e in self.chain],
        }


def _sqrt(a):
    try:
        return pth_root(a)
    except NotAPthPower as exc:
        raise SquareRootUnavailable(f"{a} has no square root in Q_2") from exc


def _tail_shape(p, monos_by_index):
    tail = {i: c.value() for i, c in monos_by_index.items() if i > 0 and not c.is_zero_at_prec()}
    if not tail:
        return True, None
    least = min(tail.values())
    at_min = [i for i, v in tail.items() if v == least]
    if len(at_min) == 1 and at_min[0] % p:
        return True, at_min[0]
    return False, None


class _Engine:
    def __init__(self, K, N):
        self.K = K
        self.N = N
        self.p = K.p
        self.theta = DeltaContext(K.p, K.vp).threshold
        self.ops: list = []

    def _relevant(self, c):
        return not c.is_zero_at_prec()

    def delete_above(self, monos, center, scale, note, indices=None):
        """Drop monomials of value > theta (the one-unit rewrite a)); zero-at-precision ones
        silently (their value is >= N > theta)."""
        out = [m for m in monos if self._relevant(m.coef)]
        for m in list(out):
            if indices is not None and m.index not in indices:
                continue
            if m.coef.value() > self.theta:
                after = [x for x in out if x is not m]
                self.ops.append(_Op("delete", center, scale, out, m, after, note))
                out = after
        return out

    def fold_step(self, monos, m, center, scale):
        """A z^(2k) -> Delta(A) z^k (one-unit rewrite c))."""
        root = _sqrt(m.coef)
        new = _Mono(-(root.scale(self.p)), m.index // self.p, m.source)
        after = [new if x is m else x for x in monos]
        self.ops.append(_Op("fold-step", center, scale, monos, m, after))
        return after, new

    def lift_step(self, monos, m, center, scale):
        """d = A z^k -> Delta^{-1}(A) z^(pk) (the Delta^{-1} rewrite)."""
        new = _Mono(delta_op_inverse(m.coef).with_prec(self.N), m.index * self.p, m.source)
        after = [new if x is m else x for x in monos]
        self.ops.append(_Op("lift-step", center, scale, monos, m, after))
        return after, new

    def witnesses(self, op, x_nu):
        K = self.K
        w = (x_nu - op.center) * op.scale.inv()
        before = _eval_monos(K, op.before, w)
        term = op.mono.coef * w**op.mono.index
        rest = before - term
        if op.kind == "delete":
            return one_unit_shift_a(K, rest, term, prec=self.N)
        if op.kind == "fold-step":
            c = _sqrt(op.mono.coef) * w ** (op.mono.index // self.p)
            return one_unit_shift_c(K, rest, c, prec=self.N)
        if op.kind == "lift-step":
            return rewrite_delta_inverse(K, rest, term, prec=self.N)[1]
        raise ValueError(op.kind)


def _monos_from_poly(P):
    return [_Mono(c, i, i) for i, c in P.items()]


def _poly_from_monos(K, monos):
    d: dict = {}
    for m in monos:
        d[m.index] = d[m.index] + m.coef if m.index in d else m.coef
    return Poly.from_dict(K, d)


def _choose_c1(f, at, S):
    taylor = f.taylor()
    stabs, beta = {}, {}
    for i, fi in enumerate(taylor):
        if fi.is_zero():
            continue
        cert = stabilize(at, fi, S)
        stabs[i] = cert
        if not cert.stable_value.is_inf:
            beta[i] = cert.stable_value.q
    if 0 in beta and beta[0] <= 0:
        raise PreconditionError(f"1 + f(x) is not a 1-unit: f has stable value {beta[0]}")
    cons = []
    for i in beta:
        cons.append(Constraint(i, beta[i], ">"))  # v(f_i(c)(x-c)^i) > 0: a 1-unit
    tail = sorted(i for i in beta if i >= 1)
    for n, i in enumerate(tail):
        for j in tail[n + 1:]:
            cons.append(Constraint(i - j, beta[i] - beta[j], "!="))
    n = f.degree
    t = 1
    while t <= n:
        for r in range(2, n // t + 1):
            i = t * r
            if i in beta and t in beta:
                cons.append(Constraint(i - t, beta[i] - beta[t], ">"))
        t *= 2
    k, c1, g1 = choose_center(at, cons, [s.alpha0 for s in stabs.values()])
    return k, c1, g1, taylor, stabs


def kummer_normal_form_p2(f: Poly, at: ApproximationType, confirmations: int = DEFAULT_CONFIRMATIONS,
                          prec=12, late: int = 3, max_centers: int = 8) -> KummerNormalForm:
    K = f.model
    if not isinstance(K, PadicField) or K.p != 2:
        raise PreconditionError("the exact Kummer engine runs over the 2-adics only")
    N = Value.coerce(prec)
    eng = _Engine(K, N)
    if not N > eng.theta:
        raise InsufficientPrecision(f"precision {N} must exceed {eng.theta}")
    if f.is_zero():
        at.ensure(1)
        c, g = at[0]
        return KummerNormalForm(c, K.monomial(1, g.q), [K.zero()], None, [], "zero", True,
                                centers={"gamma": g}, membership=[(0, True)])

    k, c1, g1, taylor, _ = _choose_c1(f, at, confirmations)
    a = K.monomial(1, g1.q)
    d_all = [fi(c1) * a**i for i, fi in enumerate(taylor)]
    u0 = K.one() + d_all[0]
    u0_inv = u0.inv(prec=N)
    U = Poly(K, [u0] + d_all[1:])
    one_plus_F = Poly(K, [K.one()] + [(di * u0_inv).with_prec(N) for di in d_all[1:]])
    chain = [ChainEntry("factor-constant", "1 + f = u0 (1 + F(y)), y = (x - c1)/a",
                        [Witness.unit_factor(U, one_plus_F, Poly.const(K, K.one()), 2,
                                             "1 + F = u0^-1 (1 + f)", scalar=u0_inv,
                                             modulus=N)])]
    # tail terms above the threshold go first; the square trick then only
    # needs roots of coefficients known to enough digits
    monos = eng.delete_above(_monos_from_poly(one_plus_F - K.one()), c1, a,
                             "delete values > threshold before the square trick",
                             indices=set(range(1, one_plus_F.degree + 1)))
    cur = _poly_from_monos(K, monos) + K.one()
    evens = [(i, c) for i, c in cur.items() if i >= 2 and i % 2 == 0]
    if evens:
        S_poly = Poly.from_dict(K, {0: K.one(), **{i // 2: _sqrt(c) for i, c in evens}})
        s = geo_inverse(S_poly, K.vp + 1)
        new = (s * s * cur).with_prec(N)
        chain.append(ChainEntry("square-factor", "multiply by s(y)^2, s = S(y)^-1 mod p",
                                [Witness.unit_factor(cur, new, s, 2, "new = old * s^2", modulus=N)]))
        cur = new
    G = cur - K.one()
    tail_vals = {i: c.value() for i, c in G.items() if i >= 1}
    case1 = any(v <= K.vp for v in tail_vals.values())
    trace, sim_input = [], None
    if case1:
        monos = eng.delete_above(_monos_from_poly(G), c1, a, "first case: delete values > threshold")
        P = _poly_from_monos(K, monos)
        ok, _ = _tail_shape(2, dict(P.items()))
        if not ok:
            raise ShapeViolation("first case without a unique least-value coefficient at an odd index")
        kf, c, d, case = k, c1, a, "1"
        centers = {"c1": c1, "a": a, "gamma": g1}
    else:
        result = _second_case(eng, G, at, k, c1, a, confirmations, max_centers)
        P, kf, c, d, trace, sim_input, centers = result
        case = "2"
    centers["gamma"] = d.value()
    # restore the constant: 1 + g = u0 (1 + P)
    g = P * u0 + (u0 - K.one())
    g = g.with_prec(N)
    chain.append(ChainEntry("restore-constant", "1 + g = u0 (1 + P)",
                            [Witness.unit_factor(P + K.one(), g + K.one(), Poly.const(K, K.one()), 2,
                                                 "1 + g = u0 (1 + P)", scalar=u0,
                                                 modulus=N)]))
    monos = eng.delete_above(_monos_from_poly(g), c, d, "delete a constant of value > threshold",
                             indices={0})
    g = _poly_from_monos(K, monos)
    # pointwise witnesses at late approximants
    if not at.ensure(kf + 1 + late):
        raise ApproximantsExhausted("not enough late approximants for the pointwise checks")
    points = list(range(kf + 1, kf + 1 + late))
    for op in eng.ops:
        ws = [eng.witnesses(op, at[nu][0]) for nu in points]
        step = {"delete": "delete-above-threshold", "fold-step": "fold-square",
                "lift-step": "delta-inverse-rewrite"}[op.kind]
        chain.append(ChainEntry(step, f"{op.note} index {op.mono.index} coefficient {op.mono.coef}".strip(),
                                ws))
    membership = []
    for nu in points:
        x_nu = at[nu][0]
        z_nu = (x_nu - c) * d.inv()
        ratio = (K.one() + f(x_nu)) * (K.one() + g(z_nu)).inv(prec=N)
        membership.append((nu, is_pth_power(ratio.with_prec(N)).status == "yes"))
    coeffs = list(g.coeffs) or [K.zero()]
    ok, i0 = _tail_shape(2, dict(g.items()))
    degenerate = g.degree <= 0
    nf = KummerNormalForm(c, d, coeffs, i0, chain, case, degenerate, trace, sim_input, membership,
                          2, _strengthenings(K, g), centers)
    return nf


def _strengthenings(K, g):
    vals = {i: c.value() for i, c in g.items() if i > 0}
    low_odd = all(i % 2 for i, v in vals.items() if v <= K.vp)
    return {"low_values_at_odd_indices": low_odd,
            "distinct_values": len(set(vals.values())) == len(vals)}


def _second_case(eng, G, at, k, c1, a, S, max_centers):
    K = eng.K
    ys = at.transformed(c1, a)
    stabs = []
    for i in range(1, G.degree + 1):
        hi = G.hasse_derivative(i)
        if hi.is_zero():
            continue
        stabs.append(stabilize(ys, hi, S, cap=eng.N))
    alpha = max((s.alpha0 for s in stabs), default=None)
    first_error = None
    degenerate_choice = None
    idx = 0
    tried = 0
    while tried < max_centers:
        idx, c2, g2 = choose_center(ys, [], [alpha] if alpha is not None else [], start=idx)
        tried += 1
        saved_ops = list(eng.ops)
        try:
            res = _second_case_at(eng, G, k, c1, a, idx, c2, g2)
        except (SquareRootUnavailable, ShapeViolation) as exc:
            eng.ops = saved_ops
            first_error = first_error or exc
            idx += 1
            continue
        if res[0].degree <= 0:
            if degenerate_choice is None:
                degenerate_choice = (res, list(eng.ops))
            eng.ops = saved_ops
            idx += 1
            if not ys.ensure(idx + 1):
                break
            continue
        return res
    if degenerate_choice is not None:
        res, ops = degenerate_choice
        eng.ops = ops
        return res
    raise first_error or ShapeViolation("no center yields the normal form")


def _second_case_at(eng, G, k, c1, a, idx, c2, g2):
    K = eng.K
    b = K.monomial(1, g2.q)
    c = c1 + a * c2
    d = a * b
    H = G.shift_scale(c2, b).with_prec(eng.N)
    monos = eng.delete_above(_monos_from_poly(H), c, d, "second case: delete values > threshold",
                             indices=set(range(1, H.degree + 1)))
    sim_input = {m.index: m.coef.value() for m in monos if m.index >= 1}
    state = {"monos": monos}
    trace = []

    def by_source(s):
        return next(m for m in state["monos"] if m.source == s and m.index >= 1)

    def resolver(rec):
        low, high = by_source(rec["from"]), by_source(rec["into"])
        monos_ = state["monos"]
        lifted = []
        cur = low
        for _ in rec["lifted"]:
            monos_, cur = eng.lift_step(monos_, cur, c, d)
            lifted.append(cur.coef.value_lower_bound())
        merged = _Mono((cur.coef + high.coef).with_prec(eng.N), high.index, high.source)
        monos_ = [x for x in monos_ if x is not cur and x is not high] + [merged]
        state["monos"] = monos_
        val = merged.coef.value_lower_bound()
        trace.append({"op": "merge", "target": rec["target"], "from": rec["from"], "into": rec["into"],
                      "lifted": lifted, "collision": high.coef.value_lower_bound(), "merged": val})
        return val

    sys0 = ValueMonomialSystem(2, K.vp, sim_input)
    out = value_sim_fold(sys0, resolver)
    monos = [m for m in state["monos"] if m.index == 0 or not m.coef.is_zero_at_prec()]
    for rec in out.history:
        if rec["op"] != "fold":
            continue
        m = next(x for x in monos if x.source == rec["from"] and x.index == rec["from"])
        start = m.coef.value()
        for _ in range(rec["steps"]):
            monos, m = eng.fold_step(monos, m, c, d)
        trace.append({"op": "fold", "from": rec["from"], "to": rec["to"], "steps": rec["steps"],
                      "value": start, "folded": m.coef.value()})
    P = _poly_from_monos(K, monos).with_prec(eng.N)
    monos = eng.delete_above(_monos_from_poly(P), c, d, "second case: delete after folding",
                             indices=set(range(1, P.degree + 1)))
    P = _poly_from_monos(K, monos)
    ok, _ = _tail_shape(2, dict(P.items()))
    if not ok:
        raise ShapeViolation("second case: least value not unique at an odd index")
    centers = {"c1": c1, "a": a, "c2": c2, "b": b}
    return P, k + idx, c, d, trace, sim_input, centers


def replay_trace(sim_input: dict, trace: list, p: int = 2, vp=1) -> list:
    """The simulator's history on ``sim_input`` with merge values replayed
    from an exact trace."""
    merged = iter([r["merged"] for r in trace if r["op"] == "merge"])
    out = value_sim_fold(ValueMonomialSystem(p, vp, sim_input), lambda rec: next(merged))
    return out.history
