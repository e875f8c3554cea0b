"""Shifted polyvectors: Schouten bracket, Poisson differential, MC defect, Euler vector.

Polyvectors on a quasi-free ``A`` are elements of the free algebra
``A[pv_1, ..., pv_m]``.  With ``t_a`` the homological degree of ``x_a``, the
cochain degree of ``pv_a`` is ``n + 1 + t_a`` and that of ``x_a`` is
``-t_a``; the bracket has degree ``-(n + 1)``.

The bracket is evaluated by the bidifferential formula

    [F, G] = sum_a (F <d/dpv_a)(d/dx_a> G) + c_a (F <d/dx_a)(d/dpv_a> G)

with right derivatives on ``F``, left derivatives on ``G`` and
``c_a = -(-1)^{n t_a}``; these constants are forced by [pv_a, x_b] = delta_ab
and graded antisymmetry in the shifted grading.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Optional

from .algebra import GradedAlgebraSpec
from .graded import Element, GradedError, Ring, partial

DEBUG_FILTRATION = False


def shifted_degree(e: Element) -> Optional[int]:
    """Degree in the DGLA Pol^{[n+1]} (cochain degree minus n + 1)."""
    d = e.degree()
    return None if d is None else d - (e.ring.shift + 1)


def schouten(a: Element, b: Element, W: Optional[int] = None) -> Element:
    """Schouten-Nijenhuis bracket [a, b], optionally truncated to weight < W."""
    ring = a.ring
    if b.ring is not ring:
        raise GradedError("bracket of elements from different rings")
    n = ring.shift
    out = ring.zero()
    if a.is_zero() or b.is_zero():
        return out
    for g in range(ring.ngens):
        xi = ring.sym_index("x", g)
        pi = ring.sym_index("pv", g)
        t = ring.gens[g].degree
        c = -1 if (n * t) % 2 == 0 else 1
        a_pv = partial(ring, pi, a, "right")
        if a_pv:
            b_x = partial(ring, xi, b, "left")
            if b_x:
                out = out + a_pv * b_x
        a_x = partial(ring, xi, a, "right")
        if a_x:
            b_pv = partial(ring, pi, b, "left")
            if b_pv:
                out = out + (a_x * b_pv).scale(c)
    if W is not None:
        out = out.truncate(W)
    if DEBUG_FILTRATION:
        _assert_filtration(a, b, out)
    return out


def _assert_filtration(a: Element, b: Element, out: Element) -> None:
    if out.is_zero() or a.is_zero() or b.is_zero():
        return
    lo = min(a.weights()) + min(b.weights()) - 1
    if min(out.weights()) < lo:
        raise AssertionError("bracket left the filtration F^{i+j-1}")


# ---------------------------------------------------------------------------

@dataclass
class Polyvector:
    """Weight-decomposed polyvector sum_i pi_i modulo F^W."""

    components: Dict[int, Element]
    shift: int
    W: int

    @classmethod
    def from_element(cls, e: Element, W: int) -> "Polyvector":
        e = e.truncate(W)
        return cls({w: e.weight_part(w) for w in sorted(e.weights())}, e.ring.shift, W)

    def total(self, ring: Ring) -> Element:
        out = ring.zero()
        for c in self.components.values():
            out = out + c
        return out.truncate(self.W)

    def is_poisson_candidate(self) -> bool:
        n = self.shift
        return all(w >= 2 and (c.is_zero() or c.degrees() == {n + 2})
                   for w, c in self.components.items())


@dataclass
class TangentVector:
    """Tangent vector pi + eps * direction at a Poisson candidate (eps^2 = 0)."""

    basepoint: Element
    direction: Element
    W: int


def poisson_differential(spec: GradedAlgebraSpec, pi: Element, v: Element,
                         W: Optional[int] = None) -> Element:
    """delta_pi(v) = [delta_hat + pi, v], truncated to weight < W."""
    ring = v.ring
    return schouten(spec.delta_hat(ring) + pi, v, W)


def mc_defect(spec: GradedAlgebraSpec, pi: Element, W: Optional[int] = None) -> Element:
    """kappa(pi) = [delta, pi] + 1/2 [pi, pi], truncated to weight < W."""
    ring = pi.ring
    return (schouten(spec.delta_hat(ring), pi, W) + schouten(pi, pi, W).scale(Fraction(1, 2)))


def defect_by_weight(defect: Element) -> Dict[int, Element]:
    return {w: defect.weight_part(w) for w in sorted(defect.weights())}


def sigma(pi: Element, W: Optional[int] = None) -> TangentVector:
    """Euler vector: weight-i component multiplied by (i - 1)."""
    ring = pi.ring
    out = ring.zero()
    for w in pi.weights():
        out = out + pi.weight_part(w).scale(w - 1)
    if W is not None:
        out = out.truncate(W)
    return TangentVector(pi, out, W if W is not None else 10 ** 9)


def scale_weights(pi: Element, lam) -> Element:
    """The G_m action: weight-i component multiplied by lam^(1 - i)."""
    lam = Fraction(lam)
    out = pi.ring.zero()
    for w in pi.weights():
        out = out + pi.weight_part(w).scale(lam ** (1 - w))
    return out


# ---------------------------------------------------------------------------
# bases

def coeff_weight(e: Element) -> int:
    """Largest coefficient polyweight occurring (0 for the zero element)."""
    return max((e.ring.mono_info(m)[5] for m in e.terms), default=0)


def pol_basis(spec: GradedAlgebraSpec, ring: Ring, weight: int, degree: int,
              max_coeff_weight: Optional[int] = None, polyweights=None) -> list:
    """Monomials of given polyvector weight and cochain degree.

    With ``polyweights`` the basis is the union of the exact total-polyweight
    pieces listed; otherwise coefficient polyweight is bounded by
    ``max_coeff_weight`` (default: the spec's maxPolyWeight).
    """
    from .algebra import enumerate_basis

    if polyweights is not None:
        out = []
        for q in sorted(set(polyweights)):
            out.extend(enumerate_basis(ring, "pv", weight, degree, polyweight=q))
        return out
    K = spec.max_poly_weight if max_coeff_weight is None else max_coeff_weight
    return enumerate_basis(ring, "pv", weight, degree, K)
