import random
from fractions import Fraction
from itertools import product

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ramlab.approx import ambient_stream, default_xi
from ramlab.asnf import (
    as_normal_form,
    fold_p_indices,
    generator_criterion,
    hasse_taylor,
    prefold,
    reduce_degree_p_extension,
    wp,
)
from ramlab.corpus import as_instance
from ramlab.errors import PreconditionError
from ramlab.fieldcore.fmt import parse_element, parse_poly
from ramlab.fieldcore.models import PadicField, SeriesField
from ramlab.fieldcore.poly import Poly
from ramlab.ordval import Value

K2 = SeriesField.perfect_hull(2)


def _stream(K=K2):
    return ambient_stream(default_xi(K))


def _el(text, K=K2):
    return parse_element(text, K)


# -- wp ------------------------------------------------------------------------


def test_wp_examples():
    assert wp(_el("t^-1")) == _el("t^-2 + t^-1")
    assert wp(K2.zero()) == K2.zero()
    assert wp(K2.one()) == K2.zero()


def test_wp_needs_char_p():
    with pytest.raises(PreconditionError):
        wp(PadicField(2).one())


series_terms = st.dictionaries(st.integers(-8, 8).map(lambda k: (Fraction(k, 4),)), st.just(1), max_size=4)


@settings(max_examples=60)
@given(series_terms, series_terms)
def test_wp_additive(b, c):
    b, c = K2.from_terms(b), K2.from_terms(c)
    assert wp(b + c) == wp(b) + wp(c)


@settings(max_examples=60)
@given(series_terms)
def test_frobenius_fold_identity(a):
    a = K2.from_terms(a)
    assert a**2 == wp(a) + a


# -- Taylor expansion and folding -------------------------------------------------


def test_taylor_cube():
    assert [str(c) for c in hasse_taylor(parse_poly("x^3", K2))] == ["x^3", "x^2", "x", "1"]


def test_taylor_fourth_power():
    assert [str(c) for c in hasse_taylor(parse_poly("x^4", K2))] == ["x^4", "0", "0", "0", "1"]


def test_taylor_x2_plus_x():
    assert [str(c) for c in hasse_taylor(parse_poly("x^2 + x", K2))] == ["x + x^2", "1", "1"]


def test_fold_cube():
    T = hasse_taylor(parse_poly("x^3", K2))
    fr = fold_p_indices(T)
    assert {j: str(v) for j, v in fr.targets.items()} == {0: "X0^3", 1: "X0^(1/2) + X0^2", 3: "1"}
    assert fr.verify(T)


def test_fold_fourth_power():
    # two folds move the constant coefficient of (X - X0)^4 onto index 1
    T = hasse_taylor(parse_poly("x^4", K2))
    fr = fold_p_indices(T)
    assert {j: str(v) for j, v in fr.targets.items()} == {0: "X0^4", 1: "1"}
    assert len(fr.witness) == 2
    assert fr.verify(T)


def test_fold_linear_is_identity():
    T = hasse_taylor(parse_poly("t*x + 1", K2))
    fr = fold_p_indices(T)
    assert fr.witness == []
    assert {j: str(v) for j, v in fr.targets.items()} == {0: "1 + t*X0", 1: "t"}


def test_prefold_removes_p_indices():
    f = parse_poly("t^-3*x^2 + x^4 + x", K2)
    f1, W = prefold(f)
    assert all(i % 2 or i == 0 for i, _ in f1.items())
    assert f - f1 == wp_poly(W)


def wp_poly(W):
    return W * W - W


# -- normal form ---------------------------------------------------------------


def test_worked_instance():
    nf = as_normal_form(parse_poly("t^-3*x^2", K2), _stream())
    assert str(nf.c) == "1"
    assert str(nf.d) == "t^(1/2)"
    assert nf.g.format("z") == "t^(-3/2) + t^-1*z"
    assert nf.witness.W.format("x") == "t^(-3/2)*x"
    assert nf.witness.absorbed == []
    assert nf.i0 == 1
    assert all(nf.verify().values())


def test_worked_instance_identity_by_hand():
    # t^-3 x^2 = wp(t^(-3/2) x) + t^(-3/2) + t^-1 z with z = (x - 1) / t^(1/2)
    x = parse_poly("x", K2)
    W = Poly.const(K2, _el("t^(-3/2)")) * x
    z = (x - Poly.const(K2, K2.one())) * Poly.const(K2, _el("t^(-1/2)"))
    rhs = wp_poly(W) + Poly.const(K2, _el("t^(-3/2)")) + Poly.const(K2, _el("t^-1")) * z
    assert rhs == parse_poly("t^-3*x^2", K2)


def test_x2_plus_t_is_absorbed():
    nf = as_normal_form(parse_poly("x^2 + t", K2), _stream())
    assert nf.g.format("z") == "(1 + t)"
    assert nf.witness.W.format("x") == "x"
    assert [(a.index, str(a.coeff)) for a in nf.witness.absorbed] == [(1, "t^(1/2)")]
    checks = nf.verify()
    assert all(checks.values()) and "absorbed[0]" in checks
    assert reduce_degree_p_extension(parse_poly("x^2 + t", K2), _stream()).kind == "degenerate"


def test_zero_and_wp_of_x():
    for text in ("0", "x^2 + x"):
        r = reduce_degree_p_extension(parse_poly(text, K2), _stream())
        assert r.kind == "degenerate"
        assert r.normal_form.g.is_zero()
        assert all(r.normal_form.verify().values())


def test_reduction_new_generator():
    r = reduce_degree_p_extension(parse_poly("t^-3*x^2", K2), _stream())
    assert r.kind == "new-generator" and r.criterion.i0 == 1


def test_needs_perfect_model():
    with pytest.raises(PreconditionError):
        as_normal_form(parse_poly("x^2", SeriesField(2)), ambient_stream(default_xi(K2)))


# -- generator criterion --------------------------------------------------------


def test_criterion_examples():
    g = parse_poly("t^(-3/2) + t^-1*x", K2)
    assert generator_criterion(g) == generator_criterion(g, 2)
    assert generator_criterion(g).holds and generator_criterion(g).i0 == 1
    only_even = generator_criterion({2: Value.coerce(-1)}, 2)
    assert not only_even.holds and "prime to p" in only_even.reason
    tie = generator_criterion({1: Value.coerce(-1), 3: Value.coerce(-1)}, 2)
    assert not tie.holds and "not unique" in tie.reason


def _criterion_oracle(vals, p):
    """Direct reading: some index prime to p whose value is strictly below
    every other nonzero coefficient's value."""
    nz = {i: v for i, v in vals.items() if v is not None}
    for i, v in nz.items():
        if i % p and all(v < w for k, w in nz.items() if k != i):
            return True, i
    return False, None


GRID = [None] + [Fraction(k, 2) for k in range(-3, 4)]


@pytest.mark.parametrize("p", [2, 3])
def test_criterion_exhaustive(p):
    for n in range(1, 4):
        for combo in product(GRID, repeat=n):
            vals = {i + 1: v for i, v in enumerate(combo)}
            got = generator_criterion({i: Value.coerce(v) for i, v in vals.items() if v is not None}, p)
            assert (got.holds, got.i0) == _criterion_oracle(vals, p)


# -- corpus --------------------------------------------------------------------


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32), st.sampled_from([2, 3]))
def test_corpus_normal_forms_verify(seed, p):
    f, at = as_instance(random.Random(seed), p)
    nf = as_normal_form(f, at)
    assert nf.shape_violations() == []
    assert all(nf.verify().values())
    for term in nf.witness.absorbed:
        assert len(term.certificates) == 3
        assert term.coeff.value() > 0
