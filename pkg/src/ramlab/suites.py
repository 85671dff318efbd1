"""Seeded property suites run by ``ramlab verify``.

Each suite returns a list of case records ``{"id", "pass", ...}`` sorted by
id; the instance stream depends only on (seed, size). The generator is the
standard library's Mersenne Twister (``random.Random(seed)``).
"""

from __future__ import annotations

import random
from fractions import Fraction

from .approx import ambient_stream
from .asnf import as_normal_form
from .corpus import as_instance, composite_catalog, extension_catalog, kummer_instance, value_system
from .errors import RamlabError
from .extcheck import (
    ExtensionSpec,
    composite_immediate_check,
    extension_invariants,
    is_power_of,
    layerwise_immediate_check,
    tame_check,
)
from .fieldcore.fmt import parse_poly
from .fieldcore.models import PadicElement, PadicField
from .fieldcore.oneunit import one_unit_shift_a, one_unit_shift_c
from .fieldcore.roots import is_pth_power
from .kummer import kummer_normal_form_p2, replay_trace, value_sim_terminates
from .ordval import DeltaContext, Value, delta, delta_iter

__all__ = ["SUITES", "run_suite", "square_class_oracle"]


def _case(i, ok, **detail):
    return {"id": i, "pass": bool(ok), **detail}


# -- delta ---------------------------------------------------------------------


def _manual_iter(p, vp, i, g):
    for _ in range(abs(i)):
        g = vp + g / p if i > 0 else p * (g - vp)
    return g


def suite_delta(rng: random.Random, size: int):
    out = []
    for n in range(size):
        p = (2, 3, 5)[n % 3]
        vp = Fraction(rng.randint(1, 6), rng.choice([1, 2, 3]))
        ctx = DeltaContext(p, Value.coerce(vp))
        g1 = Fraction(rng.randint(-400, 400), rng.choice([1, 2, 4, 9, 25]))
        g2 = g1 + Fraction(rng.randint(1, 50), rng.choice([1, 3, 7]))
        i = rng.randint(-10, 10)
        theta = Fraction(p, p - 1) * vp
        checks = {
            "monotone": delta(ctx, g1) < delta(ctx, g2),
            "fixed_point": delta(ctx, theta) == Value.coerce(theta) and ctx.threshold == Value.coerce(theta),
            "closed_form": delta_iter(ctx, i, g1) == Value.coerce(_manual_iter(p, vp, i, g1)),
            "inverse": delta_iter(ctx, -i, delta_iter(ctx, i, g1)) == Value.coerce(g1),
        }
        out.append(_case(n, all(checks.values()), p=p, checks=checks))
    return out


# -- one-units over Q_2 ----------------------------------------------------------


def square_class_oracle(a: PadicElement) -> bool:
    """Square test from the classical criterion: even valuation and unit part
    congruent to 1 mod 8 (needs the unit known mod 8)."""
    if a.e % 2:
        return False
    return a.u % 8 == 1


def _rand_2adic(rng, min_val, prec=12):
    K = PadicField(2)
    return PadicElement(K, rng.getrandbits(16) | 1, rng.randint(min_val, min_val + 4), prec)


def suite_oneunit(rng: random.Random, size: int):
    K = PadicField(2)
    out = []
    for n in range(size):
        part = "ac"[n % 2]
        b = _rand_2adic(rng, 1)
        if part == "a":
            c = _rand_2adic(rng, 3)
            w = one_unit_shift_a(K, b, c, prec=12)
        else:
            c = _rand_2adic(rng, 1)
            w = one_unit_shift_c(K, b, c, prec=12)
        lhs, base = w.data["lhs"], w.data["base"]
        ratio = lhs * base.inv(prec=12)
        oracle = square_class_oracle(ratio)
        verdict = is_pth_power(ratio).status == "yes"
        out.append(_case(n, w.verify() and oracle and verdict == oracle, part=part,
                         witness=w.verify(), oracle=oracle, verdict=verdict))
    return out


# -- Artin-Schreier normal form -------------------------------------------------


def suite_asnf(rng: random.Random, size: int):
    out = []
    for n in range(size):
        p = (2, 3)[n % 2]
        f, at = as_instance(rng, p)
        try:
            nf = as_normal_form(f, at)
            checks = nf.verify()
            out.append(_case(n, all(checks.values()), p=p, f=f.format("x"), g=nf.g.format("z")))
        except RamlabError as exc:
            out.append(_case(n, False, p=p, f=f.format("x"), error=exc.reason, message=str(exc)))
    return out


# -- Kummer engine and value simulator ---------------------------------------------


def suite_kummer(rng: random.Random, size: int):
    out = []
    for n in range(size):
        f, xi = kummer_instance(rng)
        try:
            nf = kummer_normal_form_p2(f, ambient_stream(xi))
        except RamlabError as exc:
            out.append(_case(n, False, kind="exact", f=f.format("x"), error=exc.reason, message=str(exc)))
            continue
        checks = nf.verify()
        if nf.sim_input is not None:
            checks["trace"] = replay_trace(nf.sim_input, nf.value_trace) == nf.value_trace
        out.append(_case(n, all(checks.values()), kind="exact", f=f.format("x"), g=nf.g.format("z")))
    for n in range(size):
        p = (2, 3, 5)[n % 3]
        sys = value_system(rng, p)
        rep = value_sim_terminates(sys)
        ok = rep["count_never_increased"] and rep["fold_law"] and rep["merges"] <= rep["initial_count"]
        out.append(_case(size + n, ok, kind="sim", p=p, merges=rep["merges"]))
    return out


# -- extensions ----------------------------------------------------------------


def suite_ext(rng: random.Random, size: int):
    out = []
    n = 0
    for label, K, text, declared in extension_catalog():
        inv = extension_invariants(ExtensionSpec(K, parse_poly(text, K), declared))
        ok = (inv.degree == inv.e * inv.f * inv.defect and is_power_of(inv.defect, inv.p)
              and tame_check(inv) == (inv.e % inv.p != 0 and inv.te2 and inv.defect == 1))
        out.append(_case(n, ok, label=label))
        n += 1
    cat = composite_catalog()
    picks = cat if size >= len(cat) else rng.sample(cat, size)
    for p, L, text in picks:
        spec = ExtensionSpec(L, parse_poly(text, L))
        a, b = composite_immediate_check(spec), layerwise_immediate_check(spec)
        out.append(_case(n, a.immediate == b.immediate, label=f"{text} over F_{p}((u))((t))"))
        n += 1
    return out


SUITES = {
    "delta": suite_delta,
    "oneunit": suite_oneunit,
    "asnf": suite_asnf,
    "kummer": suite_kummer,
    "ext": suite_ext,
}


def run_suite(name: str, seed: int, size: int) -> dict:
    if name == "all":
        parts = {k: run_suite(k, seed, size) for k in SUITES}
        return {"suite": "all", "seed": seed, "size": size,
                "passed": sum(r["passed"] for r in parts.values()),
                "total": sum(r["total"] for r in parts.values()),
                "suites": parts}
    if name not in SUITES:
        raise KeyError(name)
    cases = sorted(SUITES[name](random.Random(seed), size), key=lambda c: c["id"])
    return {"suite": name, "seed": seed, "size": size,
            "passed": sum(c["pass"] for c in cases), "total": len(cases), "cases": cases}
