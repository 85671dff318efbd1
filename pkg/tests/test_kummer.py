import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ramlab.approx import ambient_stream
from ramlab.corpus import kummer_corpus, value_system
from ramlab.errors import InsufficientPrecision, PreconditionError
from ramlab.fieldcore.fmt import parse_poly
from ramlab.fieldcore.models import PadicElement, PadicField
from ramlab.kummer import (
    ValueMonomialSystem,
    _Engine,
    _Mono,
    geo_inverse,
    kummer_normal_form_p2,
    replay_trace,
    value_sim_fold,
    value_sim_terminates,
)
from ramlab.ordval import DeltaContext, Value, delta_iter

from .oracles import delta_iterate, is_square_2adic

Q2 = PadicField(2)
XI = PadicElement(Q2, 610618327717597063, 0)


def _geo_oracle(a, k):
    """Integer coefficients of 1/(1 + a y) modulo 2^k: (-a)^i while 2^k does not divide it."""
    out, c = [], 1
    while c % 2**k:
        out.append(c)
        c *= -a
    return out


# -- geometric inverse -------------------------------------------------------------


def test_geo_inverse_mod_8():
    s = geo_inverse(parse_poly("1 + 2*x", Q2), 3)
    assert [c.to_int() for c in s.coeffs] == _geo_oracle(2, 3) == [1, -2, 4]
    prod = s * parse_poly("1 + 2*x", Q2)
    assert prod.coeff(0).to_int() == 1
    assert all(c.value() >= Value.coerce(3) for i, c in prod.items() if i > 0)


def test_geo_inverse_trivial():
    assert geo_inverse(parse_poly("1", Q2), 3) == parse_poly("1", Q2)
    assert geo_inverse(parse_poly("5", Q2), 2) == parse_poly("1", Q2)


def test_geo_inverse_errors():
    with pytest.raises(PreconditionError):
        geo_inverse(parse_poly("1 + x", Q2), 3)
    with pytest.raises(InsufficientPrecision):
        geo_inverse(parse_poly("1 + 2*x @prec 2^2", Q2), 3)


@settings(max_examples=50)
@given(st.integers(1, 15), st.integers(2, 10))
def test_geo_inverse_matches_series(a, k):
    a = 2 * a
    s = geo_inverse(parse_poly(f"1 + {a}*x", Q2), k)
    assert [c.to_int() for c in s.coeffs] == _geo_oracle(a, k)


# -- value simulator ---------------------------------------------------------------


def _sim(entries, p=2, vp=1):
    return value_sim_fold(ValueMonomialSystem(p, vp, entries))


def test_sim_double_fold():
    out = _sim({4: 3})
    assert out.entries == {1: Value.coerce(Fraction(9, 4))}
    assert delta_iterate(2, 1, 2, Fraction(3)) == Fraction(9, 4)


def test_sim_prime_index_unchanged():
    assert _sim({1: Fraction(3, 2)}).entries == {1: Value.coerce(Fraction(3, 2))}


def test_sim_distinct_no_merge():
    out = _sim({1: Fraction(3, 2), 2: 2})
    assert [r["op"] for r in out.history] == ["fold"]
    assert sorted(v for _, _, v in out.contributions[1]) == [Value.coerce(Fraction(3, 2)), Value.coerce(2)]


def test_sim_empty_and_single():
    assert _sim({}).entries == {}
    assert _sim({3: Fraction(5, 2)}).entries == {3: Value.coerce(Fraction(5, 2))}
    assert _sim({6: 3}).entries == {3: Value.coerce(Fraction(5, 2))}


def test_sim_merge_p3():
    out = _sim({1: 2, 3: 3, 9: 5, 2: Fraction(3, 2), 6: 4}, p=3)
    merges = [r for r in out.history if r["op"] == "merge"]
    assert len(merges) == 1
    assert out.entries == {1: Value.coerce(Fraction(17, 9)), 2: Value.coerce(Fraction(3, 2))}


def test_sim_rejects_small_values():
    with pytest.raises(PreconditionError):
        ValueMonomialSystem(2, 1, {0: 2})
    with pytest.raises(PreconditionError):
        _sim({1: 1})


def test_sim_merge_at_fixed_point_and_cancellation():
    # 3/2 is the fixed point for p = 3, so indices 1 and 3 collide
    sys = ValueMonomialSystem(3, 1, {1: Fraction(3, 2), 3: Fraction(3, 2)})
    out = value_sim_fold(sys)
    assert out.entries == {1: Value.coerce(Fraction(3, 2))}
    assert out.history[0]["lifted"] == [Value.coerce(Fraction(3, 2))]
    gone = value_sim_fold(sys, merge_resolver=lambda rec: Value.inf(1))
    assert gone.entries == {}


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2**32), st.sampled_from([2, 3, 5]))
def test_sim_terminates_and_fold_law(seed, p):
    sys = value_system(random.Random(seed), p)
    rep = value_sim_terminates(sys)
    assert rep["count_never_increased"]
    assert rep["merges"] <= rep["initial_count"]
    assert rep["fold_law"]
    ctx = DeltaContext(p, Value.coerce(1))
    for cs in rep["final"].contributions.values():
        vals = [v for _, _, v in cs]
        assert len(set(vals)) == len(vals)
        for s, m, v in cs:
            src = next((r["merged"] for r in reversed(rep["final"].history)
                        if r["op"] == "merge" and r["into"] == s), sys.entries[s])
            assert v == delta_iter(ctx, m, src)
            assert v.q == delta_iterate(p, 1, m, src.q)


# -- exact engine --------------------------------------------------------------------


def test_kummer_zero():
    nf = kummer_normal_form_p2(parse_poly("0", Q2), ambient_stream(XI))
    assert nf.degenerate and nf.g.is_zero()
    assert all(nf.verify().values())


def test_kummer_linear_runs_second_case():
    nf = kummer_normal_form_p2(parse_poly("2*x", Q2), ambient_stream(XI))
    assert nf.case == "2"
    assert nf.g.format("z") == "2 + 4*z"
    assert all(nf.verify().values())


def test_kummer_golden():
    nf = kummer_normal_form_p2(parse_poly("3*x + 1", Q2), ambient_stream(XI))
    assert nf.g.format("z") == "10 + 12*z"
    assert all(nf.verify().values())


def test_kummer_not_one_unit():
    with pytest.raises(PreconditionError):
        kummer_normal_form_p2(parse_poly("x", Q2), ambient_stream(XI))


def test_kummer_corpus():
    for f, xi in kummer_corpus(random.Random(7), 8):
        nf = kummer_normal_form_p2(f, ambient_stream(xi))
        assert nf.shape_violations() == []
        checks = nf.verify()
        assert all(checks.values()), checks
        if nf.sim_input is not None:
            assert replay_trace(nf.sim_input, nf.value_trace) == nf.value_trace


def _class_oracle(w):
    lhs, base = w.data["lhs"], w.data["base"]
    ratio = lhs * base.inv(prec=12)
    return is_square_2adic(ratio.to_int(), 12)


def test_engine_fold_step():
    eng = _Engine(Q2, 12)
    x_nu = PadicElement(Q2, 5, 0)
    monos = [_Mono(Q2.element(2), 1, 1), _Mono(Q2.element(16), 2, 2)]
    after, new = eng.fold_step(monos, monos[1], Q2.zero(), Q2.one())
    assert new.index == 1 and new.coef.to_int() == -8
    w = eng.witnesses(eng.ops[-1], x_nu)
    assert w.verify() and _class_oracle(w)


def test_engine_lift_step():
    eng = _Engine(Q2, 12)
    x_nu = PadicElement(Q2, 3, 0)
    monos = [_Mono(Q2.element(2), 1, 1), _Mono(Q2.element(8), 3, 3)]
    after, new = eng.lift_step(monos, monos[1], Q2.zero(), Q2.one())
    assert new.index == 6 and new.coef.to_int() == 16
    w = eng.witnesses(eng.ops[-1], x_nu)
    assert w.verify() and _class_oracle(w)


def test_engine_delete_above_keeps_boundary():
    eng = _Engine(Q2, 12)
    monos = [_Mono(Q2.element(2), 1, 1), _Mono(Q2.element(4), 3, 3), _Mono(Q2.element(8), 5, 5)]
    out = eng.delete_above(monos, Q2.zero(), Q2.one(), "test")
    assert [m.index for m in out] == [1, 3]
    w = eng.witnesses(eng.ops[-1], PadicElement(Q2, 7, 0))
    assert w.verify() and _class_oracle(w)


def test_replay_matches_simulator():
    sim_input = {4: 3, 1: Fraction(3, 2)}
    trace = value_sim_fold(ValueMonomialSystem(2, 1, {4: 3, 1: Fraction(3, 2)})).history
    assert replay_trace(sim_input, trace) == trace
