from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ramlab.approx import (
    Constraint,
    ambient_stream,
    choose_center,
    default_xi,
    explicit_stream,
    extend,
    stabilize,
)
from ramlab.errors import AmbientExhausted, ApproximantsExhausted, ContradictoryConstraints, PreconditionError
from ramlab.fieldcore.fmt import parse_element, parse_poly
from ramlab.fieldcore.models import PadicElement, PadicField, SeriesField
from ramlab.fieldcore.poly import Poly
from ramlab.ordval import Value

K2 = SeriesField.perfect_hull(2)


def _stream():
    return ambient_stream(default_xi(K2))


def _truncation_oracle(p, n):
    """Independent computation of the n-th truncation of sum t^(1 - p^-i):
    exponents of the first n + 1 terms and the next exponent."""
    exps = [1 - Fraction(1, p**i) for i in range(n + 2)]
    return exps[: n + 1], exps[n + 1]


def test_extend_default_xi_first_three():
    at = extend(_stream(), 3)
    got = [(str(c), g) for c, g in at.approximants]
    assert got == [
        ("1", Value.coerce(Fraction(1, 2))),
        ("1 + t^(1/2)", Value.coerce(Fraction(3, 4))),
        ("1 + t^(1/2) + t^(3/4)", Value.coerce(Fraction(7, 8))),
    ]


@pytest.mark.parametrize("p", [2, 3])
def test_extend_matches_truncation_oracle(p):
    K = SeriesField.perfect_hull(p)
    at = extend(ambient_stream(default_xi(K)), 6)
    for n, (c, g) in enumerate(at.approximants):
        exps, nxt = _truncation_oracle(p, n)
        assert sorted(k[0] for k in c.terms) == exps
        assert g == Value.coerce(nxt)


def test_extend_zero_is_unchanged():
    at = extend(_stream(), 2)
    before = list(at.approximants)
    assert extend(at, 0).approximants == before


def test_extend_past_ambient_precision():
    xi = parse_element("t^(1/2) @prec 1", K2)
    with pytest.raises(AmbientExhausted):
        extend(ambient_stream(xi), 100)


def test_ambient_value_is_checked():
    xi = default_xi(K2)
    at = ambient_stream(xi)
    with pytest.raises(PreconditionError):
        at._append(K2.one(), Value.coerce(Fraction(1, 4)))


def test_stabilize_identity():
    cert = stabilize(_stream(), parse_poly("x", K2))
    assert cert.stable_value == Value.coerce(0)
    assert cert.start_index == 0


def test_stabilize_shifted_by_second_approximant():
    at = extend(_stream(), 3)
    c2 = at[1][0]
    cert = stabilize(at, Poly(K2, [-c2, K2.one()]))
    assert cert.stable_value == Value.coerce(Fraction(3, 4))
    assert cert.start_index == 2
    assert cert.alpha0 == Value.coerce(Fraction(7, 8))


def test_stabilize_constant():
    a = parse_element("t^2 + t^3", K2)
    cert = stabilize(_stream(), a)
    assert cert.stable_value == Value.coerce(2)


def test_stabilize_exhausted():
    at = explicit_stream(K2, [(K2.zero(), 0), (K2.one(), 1)])
    h = parse_poly("x", K2)
    with pytest.raises(ApproximantsExhausted):
        stabilize(at, h, confirmations=3)


def test_choose_center_empty_constraints():
    i, c, g = choose_center(_stream())
    assert i == 0 and str(c) == "1" and g == Value.coerce(Fraction(1, 2))


def test_choose_center_distinctness():
    # gamma != 1/2 skips the first approximant
    i, c, g = choose_center(_stream(), [Constraint(Fraction(1), Fraction(-1, 2))])
    assert i == 1 and g == Value.coerce(Fraction(3, 4))


def test_choose_center_short_stream_exhausted():
    at = extend(_stream(), 3)
    short = explicit_stream(K2, at.approximants)
    with pytest.raises(ApproximantsExhausted):
        choose_center(short, [Constraint(Fraction(1), Fraction(-7, 8), ">")])


def test_choose_center_contradictory():
    with pytest.raises(ContradictoryConstraints):
        choose_center(_stream(), [Constraint(Fraction(0), Fraction(0))])


def test_choose_center_alpha0_floor():
    i, _, g = choose_center(_stream(), alpha0s=[Value.coerce(Fraction(5, 6))])
    assert i == 2 and g == Value.coerce(Fraction(7, 8))


def test_padic_stream():
    Q2 = PadicField(2)
    xi = PadicElement(Q2, 0b1011, 0)
    at = extend(ambient_stream(xi), 2)
    assert [g for _, g in at.approximants] == [Value.coerce(1), Value.coerce(3)]


# -- properties ----------------------------------------------------------------


@settings(max_examples=30, deadline=None)
@given(st.sampled_from([2, 3]), st.integers(2, 8))
def test_pseudo_cauchy_law(p, n):
    K = SeriesField.perfect_hull(p)
    at = extend(ambient_stream(default_xi(K)), n)
    for mu in range(n):
        for nu in range(mu + 1, n):
            assert (at[nu][0] - at[mu][0]).value() == at[mu][1]


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 4), st.integers(1, 3), st.integers(1, 4))
def test_monotone_refinement(shift, deg, more):
    at = _stream()
    exps = sorted({Fraction(shift, 4) + Fraction(k, 8) for k in range(deg)})
    c = K2.from_terms({(e,): 1 for e in exps})
    h = Poly(K2, [c] + [K2.zero()] * (deg - 1) + [K2.one()])
    cert = stabilize(at, h)
    extend(at, more)
    again = stabilize(at, h)
    assert again.stable_value == cert.stable_value


@settings(max_examples=50, deadline=None)
@given(st.lists(st.tuples(st.integers(-4, 4), st.integers(-8, 8), st.sampled_from([">", ">=", "<", "!="])),
                max_size=3))
def test_choose_center_satisfies_constraints(raw):
    cons = [Constraint(Fraction(a), Fraction(b, 8), rel) for a, b, rel in raw]
    at = _stream()
    try:
        _, _, g = choose_center(at, cons)
    except (ApproximantsExhausted, ContradictoryConstraints):
        return
    assert all(con.holds(g) for con in cons)
