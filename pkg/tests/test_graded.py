from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

import corpus
from strategies import elements, homogeneous
from workbench.algebra import de_rham_d
from workbench.document import format_element
from workbench.graded import (Generator, GradedError, koszul_sign_bruteforce, mono_factors,
                              partial, ring_for)

SPEC = corpus.mixed4(K=2)
R0 = SPEC.ring(0)
R1 = SPEC.ring(1)


def sign(k):
    return -1 if k % 2 else 1


def test_symbol_degrees_follow_generator_parity():
    r = R0
    # u has chain degree 1: odd coordinate, even one-form, even dual
    assert r.odd[r.index["u"]] == 1
    assert r.odd[r.index["dx_u"]] == 0
    assert r.odd[r.index["pv_u"]] == 0
    # at n = 1 the dual of an even coordinate is even
    assert R1.odd[R1.index["pv_x"]] == 0


def test_odd_square_vanishes_and_even_square_does_not():
    assert not R0.x("u") * R0.x("u")
    assert R0.dx("x") * R0.dx("x") == R0.zero()
    assert R0.x("x") * R0.x("x") == R0.x("x") ** 2 and R0.x("x") ** 2


def test_normal_form_sign():
    # dx_x * u = -u * dx_x since both are odd
    assert R0.normalize(["dx_x", "u"]) == -R0.normalize(["u", "dx_x"])


def test_format_contract():
    r = ring_for([Generator("x"), Generator("y")], 0)
    assert format_element(r.zero()) == "0"
    assert format_element((r.pv("x") * r.pv("y")).scale(Fraction(3, 2))) == "3/2 * pv_x*pv_y"
    assert format_element(r.x("x") - 1) == "-1 + x"


def test_ring_rejects_unknown_names():
    with pytest.raises(GradedError):
        R0.var("nope")


@settings(max_examples=60, deadline=None)
@given(st.lists(st.sampled_from(range(R0.nsym)), max_size=6))
def test_normalize_matches_bubble_sort_sign(factors):
    e = R0.normalize(factors)
    s = koszul_sign_bruteforce(R0, factors)
    if s == 0:
        assert not e
    else:
        (m, c), = e.terms.items()
        assert c == s and sorted(factors) == mono_factors(m)


@settings(max_examples=60, deadline=None)
@given(homogeneous(R0, "dx"), homogeneous(R0, "dx"))
def test_graded_commutativity(a, b):
    assert a * b == (b * a).scale(sign(a.parity() * b.parity()))


@settings(max_examples=40, deadline=None)
@given(elements(R0, ("pv", "dx")), elements(R0, ("pv",)), elements(R0, ("dx",)))
def test_associativity(a, b, c):
    assert (a * b) * c == a * (b * c)


@settings(max_examples=40, deadline=None)
@given(homogeneous(R0, "dx"), homogeneous(R0, "dx"))
def test_de_rham_leibniz(a, b):
    d = lambda e: de_rham_d(R0, e)
    assert d(a * b) == d(a) * b + (a * d(b)).scale(sign(a.parity()))


@settings(max_examples=40, deadline=None)
@given(elements(R0, ("dx",), max_count=2))
def test_de_rham_squares_to_zero(a):
    assert not de_rham_d(R0, de_rham_d(R0, a))


@settings(max_examples=40, deadline=None)
@given(homogeneous(R0, "pv"), homogeneous(R0, "pv"), st.sampled_from(range(R0.nsym)))
def test_left_and_right_partials_are_derivations(a, b, i):
    p = R0.odd[i]
    assert partial(R0, i, a * b) == partial(R0, i, a) * b + (a * partial(R0, i, b)).scale(sign(p * a.parity()))
    assert partial(R0, i, a * b, "right") == a * partial(R0, i, b, "right") + (
        partial(R0, i, a, "right") * b).scale(sign(p * b.parity()))


def test_truncation_and_weights():
    r = R0
    e = r.pv("x") * r.pv("u") + r.pv("x") + r.x("x")
    assert e.weights() == {0, 1, 2}
    assert e.truncate(2) == r.pv("x") + r.x("x")
    assert e.weight_part(2) == r.pv("x") * r.pv("u")
