from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

import corpus
from strategies import homogeneous
from workbench import checker
from workbench.compat import (compat_check, compose, form_nondeg_check, form_sharp_matrix, identity, interior,
                              invert_series, is_identity, key_identity_check, mu, nondeg_check, nu,
                              nu_matrix_identity, poisson_round_trip, poisson_to_symplectic, scale_pair,
                              sharp_matrix, symplectic_round_trip, symplectic_to_poisson, tangent_complex_M)
from workbench.graded import Generator
from workbench.mc import PreconditionError
from workbench.polyvectors import pol_basis
from workbench.samples import random_pair

PLANE = corpus.plane()
KOSZUL = corpus.spec_from([Generator("x"), Generator("y"), Generator("u", 1, 0, 2)], {"u": "x*y"})
RK = KOSZUL.ring(0)
PI_MONOS = pol_basis(KOSZUL, RK, 2, 2, 1) + pol_basis(KOSZUL, RK, 3, 2, 1)
poisson_like = st.lists(st.tuples(st.sampled_from(PI_MONOS), st.integers(-3, 3)), min_size=1, max_size=3).map(
    lambda ts: sum((RK.monomial_element(m, c) for m, c in ts), RK.zero()))


def sign(k):
    return -1 if k % 2 else 1


def test_mu_orientation_is_pinned():
    r = PLANE.ring(0)
    pi = r.pv("x") * r.pv("y")
    assert mu(r.dx("x") * r.dx("y"), pi) == pi
    assert mu(r.dx("x"), pi) == checker.oracle_bracket(pi, r.x("x"))


def test_interior_contracts_one_slot():
    r = PLANE.ring(0)
    om = r.dx("x") * r.dx("y")
    assert interior(om, r.pv("x")) in (r.dx("y"), -r.dx("y"))
    assert interior(om, r.pv("x")) == -interior(r.dx("y") * r.dx("x"), r.pv("x"))


@settings(max_examples=30, deadline=None)
@given(homogeneous(RK, "dx", 2, 1), homogeneous(RK, "dx", 2, 1), poisson_like)
def test_mu_is_multiplicative(a, b, pi):
    assert mu(a * b, pi) == mu(a, pi) * mu(b, pi)


@settings(max_examples=30, deadline=None)
@given(homogeneous(RK, "dx", 2, 1), poisson_like, poisson_like)
def test_nu_is_the_derivative_of_mu(om, pi, b):
    assert nu(om, pi, b) == (mu(om, pi + b) - mu(om, pi - b)).scale(Fraction(1, 2))


@settings(max_examples=30, deadline=None)
@given(homogeneous(RK, "dx", 1, 1), homogeneous(RK, "dx", 1, 1), poisson_like, homogeneous(RK, "pv", 2, 1))
def test_nu_is_a_mu_derivation(a, b, pi, v):
    eps = v.parity()          # pi has even degree n + 2 = 2
    lhs = nu(a * b, pi, v)
    rhs = nu(a, pi, v) * mu(b, pi) + (mu(a, pi) * nu(b, pi, v)).scale(sign(eps * a.parity()))
    assert lhs == rhs


def test_key_identities_on_a_sample():
    om, pi = random_pair(KOSZUL, 0, 5, 3)
    assert all(r.exact for r in key_identity_check(KOSZUL, om, pi, 5))


def test_compatibility_and_incompatibility():
    r = PLANE.ring(0)
    om, pi = r.dx("x") * r.dx("y"), r.pv("x") * r.pv("y")
    res = compat_check(PLANE, om, pi, 4)
    assert res.compatible and checker.verify_compat(PLANE, om, pi, res.certificate.h, 4)
    bad = compat_check(PLANE, om.scale(2), pi, 4)
    assert not bad.compatible and bad.residual == pi
    assert sum(c * bad.residual.terms.get(k, 0) for k, c in bad.functional.items()) != 0


def test_compatibility_needs_closed_form():
    r = KOSZUL.ring(-1)
    with pytest.raises(PreconditionError):
        compat_check(KOSZUL, r.dx("x") * r.dx("u"), r.zero(), 4)


def test_nondegeneracy_series_and_degenerate():
    r = PLANE.ring(0)
    cert = nondeg_check(PLANE, r.pv("x") * r.pv("y"))
    assert cert.nondegenerate and cert.method == "series"
    assert checker.verify_inverse(cert.matrix, cert.inverse)
    assert is_identity(compose(cert.inverse, cert.matrix))
    three = corpus.spec_from([Generator("x"), Generator("y"), Generator("z")])
    r3 = three.ring(0)
    assert not nondeg_check(three, r3.pv("x") * r3.pv("y")).nondegenerate
    assert form_nondeg_check(PLANE, r.dx("x") * r.dx("y")).nondegenerate


def test_series_inverse_with_nilpotent_part():
    spec = corpus.cotangent(-1)
    r = spec.ring(-1)
    pi = r.pv("x") * r.pv("xi") + r.x("x") * r.pv("x") ** 2 * r.pv("xi")
    P = sharp_matrix(pi.weight_part(2))
    inv = invert_series(P)
    assert inv is not None and checker.verify_inverse(P, inv)
    assert compose(identity(r, 2), P) == P


def test_sharp_matrices_invert_each_other():
    for n in (-1, 0, 1, 2):
        spec = corpus.cotangent(n)
        om, pi = corpus.canonical_pair(spec, n)
        assert nu_matrix_identity(om, pi)
        assert checker.verify_inverse(sharp_matrix(pi), form_sharp_matrix(om))


def test_tangent_complex_acyclic_for_plane():
    r = PLANE.ring(0)
    for p in (1, 2, 3):
        rep = tangent_complex_M(PLANE, r.dx("x") * r.dx("y"), r.pv("x") * r.pv("y"), p)
        assert rep.acyclic and rep.square_zero


def test_conversions_on_gauged_structure():
    spec = corpus.cotangent(-1)
    r = spec.ring(-1)
    pi = r.pv("x") * r.pv("xi") + r.pv("x") ** 2 * r.pv("xi")
    c = poisson_to_symplectic(spec, pi, 4)
    assert checker.verify_compat(spec, c.omega, c.pi, c.certificate.h, 4)
    b = symplectic_to_poisson(spec, c.omega, 4)
    assert checker.verify_compat(spec, b.omega, b.pi, b.certificate.h, 4)
    rt = poisson_round_trip(spec, pi, 4)
    assert rt.ok
    rt = symplectic_round_trip(spec, c.omega, 4)
    assert rt.ok and checker.verify_form_gauge(spec, rt.start, rt.back, rt.gauge.beta, 4)


def test_poisson_to_symplectic_rejects_degenerate():
    three = corpus.spec_from([Generator("x"), Generator("y"), Generator("z")])
    r = three.ring(0)
    with pytest.raises(PreconditionError):
        poisson_to_symplectic(three, r.pv("x") * r.pv("y"), 4)


@pytest.mark.parametrize("lam", [Fraction(2), Fraction(-1, 3)])
def test_scaling_transports_compatibility(lam):
    spec = corpus.cotangent(-1)
    r = spec.ring(-1)
    pi = r.pv("x") * r.pv("xi") + r.pv("x") ** 2 * r.pv("xi")
    c = poisson_to_symplectic(spec, pi, 4)
    om, p, h = scale_pair(c.omega, c.pi, c.certificate.h, lam)
    assert checker.verify_compat(spec, om, p, h, 4)
