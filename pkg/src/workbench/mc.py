"""Maurer-Cartan tower: graded pieces, obstruction classes, lifting, gauge paths.

Everything happens in F^2 Pol(A, n) / F^W.  On the graded piece gr^p the
induced differential is [delta_hat, -] alone, since [pi_2, gr^p] lies in
F^{p+1}.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import factorial
from typing import Dict, List, Optional

from .algebra import GradedAlgebraSpec
from .graded import Element, GradedError, Monomial, Ring
from .linalg import Echelon, Vector, check_cap
from .polyvectors import coeff_weight, mc_defect, pol_basis, schouten


class PreconditionError(GradedError):
    """An operation was called on input that violates its stated precondition."""


def _window(spec: GradedAlgebraSpec, rhs: Optional[Element] = None):
    """Basis selection for solving d(x) = rhs: exact polyweight pieces when possible."""
    if rhs is not None and rhs and spec.is_weight_homogeneous():
        return {"polyweights": rhs.polyweights()}
    K = spec.max_poly_weight
    if rhs is not None and rhs:
        K = max(K, coeff_weight(rhs) + max((g.weight for g in spec.generators), default=0))
    return {"max_coeff_weight": K}


@dataclass
class GradedPiece:
    """gr^p Pol in a window of degrees, with the matrices of [delta_hat, -]."""

    weight: int
    bases: Dict[int, List[Monomial]]
    images: Dict[int, List[Vector]]   # degree -> image column per basis element

    def dims(self) -> Dict[int, int]:
        return {d: len(b) for d, b in self.bases.items()}

    def squares_to_zero(self, ring: Ring, spec: GradedAlgebraSpec) -> bool:
        dh = spec.delta_hat(ring)
        for d, cols in self.images.items():
            for c in cols:
                if schouten(dh, Element(ring, c)):
                    return False
        return True


def graded_piece_complex(spec: GradedAlgebraSpec, n: int, p: int, pi: Optional[Element] = None,
                         degrees=None, **window) -> GradedPiece:
    """Bases and differential of gr^p Pol(A, n) in degrees n+1 .. n+3 (by default)."""
    ring = spec.ring(n)
    if pi is not None and pi.ring is not ring:
        raise GradedError("basepoint lives in a different ring")
    if degrees is None:
        degrees = (n + 1, n + 2, n + 3)
    dh = spec.delta_hat(ring)
    bases, images = {}, {}
    for d in degrees:
        B = pol_basis(spec, ring, p, d, **window)
        check_cap(len(B))
        bases[d] = B
        images[d] = [schouten(dh, ring.monomial_element(m)).terms for m in B]
    return GradedPiece(p, bases, images)


@dataclass
class ObstructionClass:
    level: int
    representative: Element
    basis: List[Monomial]
    images: List[Vector]
    vanishes: bool
    correction: Optional[Element] = None      # x with [delta_hat, x] = -representative
    certificate: Optional[Vector] = None      # functional killing the image, 1 on the representative
    is_cocycle: bool = True

    def __bool__(self):
        return not self.vanishes


@dataclass
class TruncatedMCProblem:
    """pi with kappa(pi) = 0 mod F^level, to be lifted towards F^W."""

    spec: GradedAlgebraSpec
    n: int
    pi: Element
    level: int
    W: int

    @property
    def ring(self) -> Ring:
        return self.spec.ring(self.n)

    def check(self) -> None:
        k = mc_defect(self.spec, self.pi.truncate(self.level), self.level)
        if k:
            raise PreconditionError(f"kappa(pi) is nonzero below weight {self.level}: {k!r}")

    def obstruction(self, pad: Optional[Element] = None) -> ObstructionClass:
        return obstruction(self, pad)

    def lift_step(self) -> "LiftResult":
        return lift_step(self)


def obstruction(problem: TruncatedMCProblem, pad: Optional[Element] = None) -> ObstructionClass:
    """Weight-p part of kappa of the lift pi + pad (pad of weight p, zero by default)."""
    spec, p, ring = problem.spec, problem.level, problem.ring
    problem.check()
    lift = problem.pi.truncate(p)
    if pad is not None:
        lift = lift + pad.weight_part(p)
    o = mc_defect(spec, lift, p + 1).weight_part(p)
    cocycle = not schouten(spec.delta_hat(ring), o)
    window = _window(spec, o)
    basis = pol_basis(spec, ring, p, problem.n + 2, **window)
    check_cap(len(basis))
    dh = spec.delta_hat(ring)
    images = [schouten(dh, ring.monomial_element(m)).terms for m in basis]
    E = Echelon()
    for c in images:
        E.add(c)
    sol, cert = E.solve({m: -c for m, c in o.terms.items()})
    if sol is not None:
        corr = ring.zero()
        for j, c in sol.items():
            corr = corr + ring.monomial_element(basis[j], c)
        return ObstructionClass(p, o, basis, images, True, corr, None, cocycle)
    return ObstructionClass(p, o, basis, images, False, None, cert, cocycle)


@dataclass
class LiftResult:
    ok: bool
    pi: Optional[Element]
    obstruction: ObstructionClass


def lift_step(problem: TruncatedMCProblem) -> LiftResult:
    """Lift pi from MC mod F^p to MC mod F^{p+1}, or return the blocking class."""
    ob = obstruction(problem)
    if not ob.vanishes:
        return LiftResult(False, None, ob)
    new = problem.pi.truncate(problem.level) + ob.correction
    return LiftResult(True, new, ob)


def lift_to(problem: TruncatedMCProblem) -> LiftResult:
    """Iterate lift_step from the problem's level up to W."""
    pi, res = problem.pi, None
    for p in range(problem.level, problem.W):
        res = lift_step(TruncatedMCProblem(problem.spec, problem.n, pi, p, problem.W))
        if not res.ok:
            return res
        pi = res.pi
    if res is None:
        res = LiftResult(True, problem.pi.truncate(problem.W), None)
    return res


# ---------------------------------------------------------------------------
# gauge equivalence

def bch(a: Element, b: Element, W: int) -> Element:
    """Baker-Campbell-Hausdorff series log(e^a e^b) for degree-0 polyvectors, through fifth order.

    Brackets of k elements of F^2 lie in F^{k+1}, so this is exact mod F^W for W <= 7.
    """
    def br(u, v):
        return schouten(u, v, W)

    ab = br(a, b)
    out = a + b + ab.scale(Fraction(1, 2))
    aab, bba = br(a, ab), br(b, br(b, a))
    out = out + (aab + bba).scale(Fraction(1, 12))
    out = out - br(b, aab).scale(Fraction(1, 24))
    if W > 6:
        ba = br(b, a)
        t1 = br(b, br(b, br(b, ba))) + br(a, br(a, br(a, ab)))
        t2 = br(a, br(b, br(b, ba))) + br(b, br(a, br(a, ab)))
        t3 = br(b, br(a, br(b, ab))) + br(a, br(b, br(a, ba)))
        out = out - t1.scale(Fraction(1, 720)) + t2.scale(Fraction(1, 360)) + t3.scale(Fraction(1, 120))
    return out.truncate(W)


@dataclass
class GaugeHomotopy:
    """MC element Pi(t) + lam(t) dt over Q[t, dt].

    ``path[k]`` is the coefficient of t^k, ``lam[k]`` that of t^k dt.  The MC
    equation splits into kappa(Pi(t)) = 0 and d/dt Pi = [delta_hat + Pi(t), lam(t)].
    """

    shift: int
    W: int
    path: List[Element]
    lam: List[Element]

    def at(self, t) -> Element:
        t = Fraction(t)
        out = self.path[0].ring.zero()
        for k, c in enumerate(self.path):
            out = out + c.scale(t ** k)
        return out

    @property
    def t_degree(self) -> int:
        return len(self.path) - 1


def constant_gauge_path(spec: GradedAlgebraSpec, pi: Element, lam: Element, W: int) -> GaugeHomotopy:
    """Pi(t) = exp(-t ad lam)(delta_hat + pi) - delta_hat, truncated mod F^W."""
    ring = pi.ring
    dh = spec.delta_hat(ring)
    term = dh + pi
    path = []
    k = 0
    while term and k < W + 2:
        path.append(term.scale(Fraction((-1) ** k, factorial(k))).truncate(W))
        term = schouten(lam, term, W)
        k += 1
    if not path:
        path = [ring.zero()]
    path[0] = (path[0] - dh).truncate(W)
    while len(path) > 1 and not path[-1]:
        path.pop()
    return GaugeHomotopy(ring.shift, W, path, [lam.truncate(W)])


def _poly_mul_bracket(f: List[Element], g: List[Element], W: int) -> List[Element]:
    ring = f[0].ring
    out = [ring.zero() for _ in range(len(f) + len(g) - 1)]
    for i, a in enumerate(f):
        if not a:
            continue
        for j, b in enumerate(g):
            if b:
                out[i + j] = out[i + j] + schouten(a, b, W)
    return out


def verify_gauge_path(spec: GradedAlgebraSpec, h: GaugeHomotopy, pi0: Element, pi1: Element) -> bool:
    """Exact check of both MC components over Q[t, dt] and of the endpoints."""
    W = h.W
    ring = h.path[0].ring
    dh = spec.delta_hat(ring)
    if (h.at(0) - pi0).truncate(W) or (h.at(1) - pi1).truncate(W):
        return False
    # kappa(Pi(t)) = [dh, Pi] + 1/2 [Pi, Pi]
    kap = [schouten(dh, c, W) for c in h.path]
    sq = _poly_mul_bracket(h.path, h.path, W)
    for k in range(max(len(kap), len(sq))):
        v = ring.zero()
        if k < len(kap):
            v = v + kap[k]
        if k < len(sq):
            v = v + sq[k].scale(Fraction(1, 2))
        if v.truncate(W):
            return False
    # d/dt Pi = [dh + Pi(t), lam(t)]
    deriv = [c.scale(k) for k, c in enumerate(h.path)][1:] or [ring.zero()]
    total = list(h.path)
    total[0] = total[0] + dh
    rhs = _poly_mul_bracket(total, h.lam, W)
    for k in range(max(len(deriv), len(rhs))):
        a = deriv[k] if k < len(deriv) else ring.zero()
        b = rhs[k] if k < len(rhs) else ring.zero()
        if (a - b).truncate(W):
            return False
    return True


@dataclass
class GaugeResult:
    found: bool
    homotopy: Optional[GaugeHomotopy] = None
    lam: Optional[Element] = None
    failing_weight: Optional[int] = None
    functional: Optional[Vector] = None
    verified: bool = False


def gauge_equivalent(spec: GradedAlgebraSpec, n: int, pi: Element, pi2: Element, W: int) -> GaugeResult:
    """Search weight by weight for a degree n+1 element lam with exp(-ad lam).pi = pi2 mod F^W."""
    if W > 7:
        raise GradedError("gauge search supports truncation W <= 7")
    ring = spec.ring(n)
    for name, e in (("first", pi), ("second", pi2)):
        if mc_defect(spec, e, W):
            raise PreconditionError(f"{name} polyvector is not MC mod F^{W}")
    pi, pi2 = pi.truncate(W), pi2.truncate(W)
    dh = spec.delta_hat(ring)
    lam = ring.zero()
    cur = pi
    for p in range(2, W):
        e = (pi2 - cur).truncate(p + 1)
        if not e:
            continue
        low = min(e.weights())
        if low < p:
            raise GradedError("gauge stage left a lower-weight discrepancy")
        # delta_cur(mu) must vanish below weight p and equal e_p at weight p
        window = _window(spec, e)
        cols, basis = [], []
        for w in range(2, p + 1):
            for m in pol_basis(spec, ring, w, n + 1, **window):
                basis.append(m)
                img = schouten(dh + cur, ring.monomial_element(m), p + 1)
                cols.append(img.terms)
        check_cap(len(basis))
        E = Echelon()
        for c in cols:
            E.add(c)
        sol, cert = E.solve(e.weight_part(p).terms)
        if sol is None:
            return GaugeResult(False, failing_weight=p, functional=cert)
        mu = ring.zero()
        for j, c in sol.items():
            mu = mu + ring.monomial_element(basis[j], c)
        cur = constant_gauge_path(spec, cur, mu, W).at(1)
        lam = bch(lam, mu, W)
    path = constant_gauge_path(spec, pi, lam, W)
    ok = verify_gauge_path(spec, path, pi, pi2)
    return GaugeResult(ok, path if ok else None, lam, verified=ok)
