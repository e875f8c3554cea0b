from fractions import Fraction

import pytest
from hypothesis import given, settings

import corpus
from strategies import elements, homogeneous
from workbench import checker, polyvectors
from workbench.graded import Generator, ring_for
from workbench.polyvectors import (Polyvector, coeff_weight, mc_defect, pol_basis, poisson_differential, scale_weights,
                                   schouten, sigma)

SPEC = corpus.mixed4(K=2)
RINGS = [SPEC.ring(n) for n in (-1, 0, 1, 2)]


def sign(k):
    return -1 if k % 2 else 1


def s(e):
    return (e.parity() + e.ring.shift + 1) % 2


def test_pinned_brackets():
    r = ring_for([Generator("x"), Generator("y")], 0)
    x, px, py = r.x("x"), r.pv("x"), r.pv("y")
    assert schouten(px, x) == r.one()
    assert schouten(x * x * px, x) == x * x
    assert schouten(px * py, x) == -py
    assert schouten(x, px) == -r.one()


def test_mc_on_cotangent_and_plane():
    for n in (-1, 0, 1, 2):
        spec = corpus.cotangent(n)
        r = spec.ring(n)
        assert not mc_defect(spec, r.pv("x") * r.pv("xi"), 5)
    r = corpus.plane().ring(0)
    assert not mc_defect(corpus.plane(), (1 + r.x("x")) * r.pv("x") * r.pv("y"), 5)


def test_non_poisson_bivector():
    spec = corpus.spec_from([Generator("x"), Generator("y"), Generator("z")])
    r = spec.ring(0)
    pi = r.pv("x") * r.pv("y") + r.x("y") * r.pv("y") * r.pv("z") + r.x("z") * r.pv("x") * r.pv("z")
    k = mc_defect(spec, pi)
    assert k and k.weights() == {3}


def test_sigma_and_scaling():
    r = corpus.cotangent(-1).ring(-1)
    pi = r.pv("x") * r.pv("xi") + r.pv("x") ** 2 * r.pv("xi")
    assert sigma(pi).direction == r.pv("x") * r.pv("xi") + (r.pv("x") ** 2 * r.pv("xi")).scale(2)
    lam = Fraction(3)
    assert scale_weights(pi, lam) == pi.weight_part(2).scale(Fraction(1, 3)) + pi.weight_part(3).scale(Fraction(1, 9))


def test_polyvector_container():
    r = corpus.cotangent(0).ring(0)
    p = Polyvector.from_element(r.pv("x") * r.pv("xi") + r.pv("x"), 3)
    assert set(p.components) == {1, 2} and not p.is_poisson_candidate()
    assert p.total(r) == r.pv("x") * r.pv("xi") + r.pv("x")


def test_pol_basis_degree_and_weight():
    spec = corpus.plane()
    r = spec.ring(0)
    B = pol_basis(spec, r, 2, 2)
    assert all(r.mono_info(m)[2] == 2 for m in B) and len(B) == 6
    assert coeff_weight(r.x("x") ** 2 * r.pv("x")) == 2


def test_filtration_debug_flag(monkeypatch):
    monkeypatch.setattr(polyvectors, "DEBUG_FILTRATION", True)
    r = RINGS[1]
    a = r.pv("x") * r.pv("u") * r.x("x")
    assert schouten(a, a) == checker.oracle_bracket(a, a)


@pytest.mark.parametrize("ring", RINGS, ids=lambda r: f"n={r.shift}")
@settings(max_examples=25, deadline=None)
@given(data=__import__("hypothesis").strategies.data())
def test_bracket_properties(ring, data):
    a = data.draw(homogeneous(ring, "pv", 2, 1))
    b = data.draw(homogeneous(ring, "pv", 2, 1))
    c = data.draw(homogeneous(ring, "pv", 2, 1))
    ab = schouten(a, b)
    assert ab == checker.oracle_bracket(a, b)
    assert ab == -schouten(b, a).scale(sign(s(a) * s(b)))
    assert schouten(a, b * c) == ab * c + (b * schouten(a, c)).scale(sign(s(a) * b.parity()))
    assert schouten(a, schouten(b, c)) == schouten(ab, c) + schouten(b, schouten(a, c)).scale(sign(s(a) * s(b)))
    # weights add minus one
    if ab:
        assert min(ab.weights()) >= min(a.weights()) + min(b.weights()) - 1


COT = corpus.cotangent(-1)


@settings(max_examples=25, deadline=None)
@given(elements(COT.ring(-1), ("pv",), 3, 2))
def test_poisson_differential_squares_to_zero_at_mc_point(v):
    r = COT.ring(-1)
    pi = r.pv("x") * r.pv("xi") + r.x("x") * r.pv("x") ** 2 * r.pv("xi")
    assert not mc_defect(COT, pi)
    assert not poisson_differential(COT, pi, poisson_differential(COT, pi, v))
