import pytest
from hypothesis import given, settings

import corpus
from strategies import elements
from workbench.algebra import (DeRhamElement, GradedAlgebraSpec, SpecError, enumerate_basis, is_closed_presymplectic,
                               kaehler, total_D)
from workbench.graded import Generator

KOSZUL = corpus.spec_from([Generator("x"), Generator("y"), Generator("u", 1, 0, 2)], {"u": "x*y"})


def test_minimal_spec():
    s = GradedAlgebraSpec([Generator("x")])
    assert s.names == ["x"] and not s.is_stacky and s.is_weight_homogeneous()


def test_delta_must_lower_chain_degree():
    with pytest.raises(SpecError) as err:
        corpus.spec_from([Generator("x"), Generator("u", 1)], {"x": "u"})
    assert err.value.location == "x"


def test_delta_squared_nonzero_is_located():
    gens = [Generator("x"), Generator("u", 1), Generator("v", 2)]
    base = GradedAlgebraSpec(gens)
    r = base.ring(0)
    with pytest.raises(SpecError) as err:
        GradedAlgebraSpec(gens, {"u": r.x("x"), "v": r.x("u")})
    assert err.value.location == "v"


def test_even_weight_zero_generator_rejected():
    with pytest.raises(SpecError):
        GradedAlgebraSpec([Generator("x", 0, 0, 0)])


def test_unknown_differential_target():
    r = GradedAlgebraSpec([Generator("x")]).ring(0)
    with pytest.raises(SpecError):
        GradedAlgebraSpec([Generator("x")], {"y": r.x("x")})


def test_weight_homogeneity():
    assert KOSZUL.is_weight_homogeneous()
    s = corpus.spec_from([Generator("x"), Generator("u", 1)], {"u": "x + x^2"})
    assert not s.is_weight_homogeneous()


@settings(max_examples=40, deadline=None)
@given(elements(KOSZUL.ring(0), ("dx",), max_count=2))
def test_total_differential_squares_to_zero(a):
    assert not total_D(KOSZUL, total_D(KOSZUL, a))


def test_enumerate_basis_is_exhaustive_and_sorted():
    r = corpus.plane().ring(0)
    B = enumerate_basis(r, "dx", 1, None, 1)
    assert len(B) == 2 * 3 and len(set(B)) == len(B)
    assert enumerate_basis(r, "dx", 1, None, 1) == B


def test_kaehler_generators():
    forms = kaehler(corpus.plane(), 2)
    assert any(f == f.ring.dx("x") * f.ring.dx("y") for f in forms)


def test_closedness():
    s = corpus.cotangent(0)
    r = s.ring(0)
    om = DeRhamElement.from_element(r.dx("x") * r.dx("xi"), 0, 4)
    assert is_closed_presymplectic(s, om).closed
    s = KOSZUL
    r = s.ring(-1)
    # delta(dx_u) = -d(xy) is nonzero, so dx_x*dx_u is not closed
    om = DeRhamElement.from_element(r.dx("x") * r.dx("u"), -1, 4)
    rep = is_closed_presymplectic(s, om)
    assert not rep.closed and rep.failing_weight == 2
