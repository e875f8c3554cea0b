from fractions import Fraction
from math import factorial

import pytest

import corpus
from workbench import checker
from workbench.graded import Generator, GradedError
from workbench.mc import (PreconditionError, TruncatedMCProblem, bch, constant_gauge_path, gauge_equivalent,
                          graded_piece_complex, lift_step, lift_to, obstruction, verify_gauge_path)
from workbench.polyvectors import mc_defect, schouten

XYZ = corpus.spec_from([Generator("x"), Generator("y"), Generator("z")])
XYZU = corpus.spec_from([Generator("x"), Generator("y"), Generator("z"), Generator("u", 1)], {"u": "x + y"})


def test_non_exact_obstruction_has_certificate():
    r = XYZ.ring(0)
    pi = r.pv("x") * r.pv("y") + r.x("y") * r.pv("y") * r.pv("z") + r.x("z") * r.pv("x") * r.pv("z")
    ob = obstruction(TruncatedMCProblem(XYZ, 0, pi, 3, 4))
    assert not ob.vanishes and ob.is_cocycle and ob.representative
    assert checker.verify_functional(ob.certificate, ob.images, ob.representative.terms)
    assert not lift_step(TruncatedMCProblem(XYZ, 0, pi, 3, 4)).ok


def test_exact_nonzero_obstruction_lifts():
    from test_acceptance import rich_family

    seen = 0
    for spec, n, pi, level, W in rich_family():
        prob = TruncatedMCProblem(spec, n, pi, level, W)
        ob = prob.obstruction()
        if ob.vanishes and ob.representative:
            res = prob.lift_step()
            assert res.ok and checker.verify_mc(spec, res.pi, W)
            assert schouten(spec.delta_hat(pi.ring), ob.correction) == -ob.representative
            seen += 1
    assert seen


def test_precondition():
    r = XYZU.ring(0)
    with pytest.raises(PreconditionError):
        TruncatedMCProblem(XYZU, 0, r.x("x") * r.pv("x") * r.pv("u"), 3, 4).check()


def test_lift_to_on_poisson_input_is_identity_mod_W():
    spec = corpus.cotangent(-1)
    r = spec.ring(-1)
    pi = r.pv("x") * r.pv("xi")
    res = lift_to(TruncatedMCProblem(spec, -1, pi, 3, 5))
    assert res.ok and checker.verify_mc(spec, res.pi, 5)


def test_graded_piece_complex():
    gp = graded_piece_complex(XYZU, 0, 2, max_coeff_weight=1)
    assert gp.squares_to_zero(XYZU.ring(0), XYZU)
    assert set(gp.dims()) == {1, 2, 3}


def _exp_ad(lam, X, W):
    out, term, k = X.ring.zero(), X, 0
    while term and k <= W + 1:
        out = out + term.scale(Fraction((-1) ** k, factorial(k)))
        term = schouten(lam, term, W)
        k += 1
    return out.truncate(W)


def test_bch_composes_gauge_actions():
    r = corpus.plane().ring(-1)
    x, y, px, py = r.x("x"), r.x("y"), r.pv("x"), r.pv("y")
    a, b = x * py * py, y * px * px + px * py
    X = x * y * px * py + px * px * py
    W = 7
    lhs = _exp_ad(b, _exp_ad(a, X, W), W)
    rhs = _exp_ad(bch(a, b, W), X, W)
    assert lhs == rhs
    assert bch(a, r.zero(), W) == a and not bch(a, -a, W)


def test_gauge_found_for_weight_two_lambda():
    spec = XYZU
    r = spec.ring(-1)
    # at n = -1 the duals of x, y, z are even of degree 0
    pi = r.zero()
    lam = r.x("x") * r.pv("y") * r.pv("z")
    assert not mc_defect(spec, pi, 5)
    target = constant_gauge_path(spec, pi, lam, 5).at(1)
    assert target and not mc_defect(spec, target, 5)
    g = gauge_equivalent(spec, -1, pi, target, 5)
    assert g.found and g.verified
    h = g.homotopy
    assert verify_gauge_path(spec, h, pi, target)
    assert checker.verify_gauge(spec, h.path, h.lam, pi, target, 5)


def test_gauge_not_found_for_different_weight_two_parts():
    spec = corpus.cotangent(0)
    r = spec.ring(0)
    pi = r.pv("x") * r.pv("xi")
    g = gauge_equivalent(spec, 0, pi, pi.scale(2), 4)
    assert not g.found and g.failing_weight == 2


def test_gauge_truncation_limit():
    spec = corpus.cotangent(0)
    r = spec.ring(0)
    with pytest.raises(GradedError):
        gauge_equivalent(spec, 0, r.zero(), r.zero(), 8)


def test_constant_path_is_mc_over_interval():
    spec = XYZU
    r = spec.ring(-1)
    pi = r.zero()
    lam = r.x("x") * r.pv("y") * r.pv("z") + r.pv("x") * r.pv("y")
    h = constant_gauge_path(spec, pi, lam, 5)
    assert verify_gauge_path(spec, h, pi, h.at(1))
