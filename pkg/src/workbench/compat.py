"""Contraction of forms into polyvectors, compatibility and the two conversions.

mu(-, pi) is the algebra map with x_a -> x_a and dx_a -> [pi, x_a].  nu(-, pi, b)
is its derivative in pi along b: the parameter eps with eps^2 = 0 is given the
parity of |b| - |pi| and pulled to the front, which fixes every sign.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from .algebra import (DeRhamElement, GradedAlgebraSpec, enumerate_basis, is_closed_presymplectic,
                      total_D)
from .graded import Element, Monomial, Ring
from .linalg import Echelon, Vector, check_cap
from .mc import PreconditionError, gauge_equivalent
from .polyvectors import coeff_weight, mc_defect, pol_basis, poisson_differential, schouten, sigma


# ---------------------------------------------------------------------------
# mu and nu

def _split(ring: Ring, m: Monomial) -> Tuple[Monomial, List[int]]:
    """Coefficient part (x and pv symbols) and the list of dx generator indices in order."""
    g = ring.ngens
    coeff = list(m)
    dxs: List[int] = []
    for a in range(g):
        e = m[g + a]
        if e:
            dxs.extend([a] * e)
            coeff[g + a] = 0
    return tuple(coeff), dxs


def _contractions(pi: Element) -> Dict[int, Element]:
    ring = pi.ring
    return {a: schouten(pi, ring.x(g.name)) for a, g in enumerate(ring.gens)}


def mu(omega: Element, pi: Element, W: Optional[int] = None) -> Element:
    """Multiplicative extension of x -> x, dx_a -> [pi, x_a]."""
    ring = omega.ring
    images = _contractions(pi)
    out = ring.zero()
    for m, c in omega.terms.items():
        cm, dxs = _split(ring, m)
        t = ring.monomial_element(cm, c)
        for a in dxs:
            t = t * images[a]
            if W is not None:
                t = t.truncate(W)
            if not t:
                break
        out = out + t
    return out.truncate(W) if W is not None else out


def _nu_core(omega: Element, sub: Optional[Dict[int, Element]], b: Element, eps_parity: int,
             W: Optional[int] = None) -> Element:
    """Sum over dx positions i of sign * coeff * s(dx_1)..[b, x_i]..s(dx_k).

    ``sub`` maps dx_a to its image (mu) or is None to keep dx_a itself.
    """
    ring = omega.ring
    hit = {a: schouten(b, ring.x(g.name)) for a, g in enumerate(ring.gens)}
    out = ring.zero()
    for m, c in omega.terms.items():
        cm, dxs = _split(ring, m)
        coeff = ring.monomial_element(cm, c)
        par = ring.mono_info(cm)[1]
        facs = [sub[a] if sub is not None else ring.sym(ring.sym_index("dx", a)) for a in dxs]
        for i, a in enumerate(dxs):
            if hit[a]:
                sgn = -1 if (eps_parity and par % 2) else 1
                t = coeff
                for j, f in enumerate(facs):
                    t = t * (hit[a] if j == i else f)
                    if W is not None:
                        t = t.truncate(W)
                    if not t:
                        break
                out = out + t.scale(sgn)
            par += ring.odd[ring.sym_index("dx", a)]
    return out.truncate(W) if W is not None else out


def _parity_parts(b: Element) -> Dict[int, Element]:
    ring = b.ring
    parts: Dict[int, Dict] = {0: {}, 1: {}}
    for m, c in b.terms.items():
        parts[ring.mono_info(m)[1]][m] = c
    return {p: Element(ring, t) for p, t in parts.items() if t}


def nu(omega: Element, pi: Element, b: Element, W: Optional[int] = None) -> Element:
    """Derivation over mu(-, pi) with dx_a -> [b, x_a]; linear in omega and b."""
    ring = omega.ring
    n = ring.shift
    images = _contractions(pi)
    out = ring.zero()
    for p, bp in _parity_parts(b).items():
        out = out + _nu_core(omega, images, bp, (p + n) % 2, W)
    return out


def interior(omega: Element, b: Element) -> Element:
    """b contracted into omega with the remaining dx factors kept (the map omega^sharp)."""
    ring = omega.ring
    out = ring.zero()
    for p, bp in _parity_parts(b).items():
        out = out + _nu_core(omega, None, bp, (p + ring.shift) % 2)
    return out


# ---------------------------------------------------------------------------
# the key identities

@dataclass
class IdentityReport:
    name: str
    exact: bool
    lhs: Element
    rhs: Element
    first_difference: Optional[Tuple[Monomial, Fraction]] = None


def _report(name, lhs, rhs) -> IdentityReport:
    diff = lhs - rhs
    first = next(iter(diff), None) if diff else None
    return IdentityReport(name, not diff, lhs, rhs, first)


def key_identity_check(spec: GradedAlgebraSpec, omega: Element, pi: Element, W: int) -> List[IdentityReport]:
    """Both contraction identities mod F^W, for arbitrary (not necessarily MC) pi."""
    ring = omega.ring
    from .algebra import de_rham_d

    m = mu(omega, pi, W)
    pp = schouten(pi, pi, W)
    lhs1 = schouten(pi, m, W)
    rhs1 = (mu(de_rham_d(ring, omega), pi, W) + nu(omega, pi, pp, W).scale(Fraction(1, 2))).truncate(W)
    lhs2 = poisson_differential(spec, pi, m, W)
    rhs2 = (mu(total_D(spec, omega), pi, W) + nu(omega, pi, mc_defect(spec, pi, W), W)).truncate(W)
    return [_report("bracket", lhs1, rhs1), _report("differential", lhs2, rhs2)]


# ---------------------------------------------------------------------------
# compatibility

@dataclass
class CompatCertificate:
    omega: Element
    pi: Element
    h: Element
    W: int

    @property
    def shift(self) -> int:
        return self.pi.ring.shift


@dataclass
class CompatResult:
    compatible: bool
    certificate: Optional[CompatCertificate] = None
    residual: Optional[Element] = None          # mu(omega, pi) - sigma(pi)
    functional: Optional[Vector] = None         # vanishes on the image of delta_pi, 1 on the residual


def _solve_window(spec, rhs: Element, extra: Element = None) -> int:
    K = spec.max_poly_weight
    top = max((g.weight for g in spec.generators), default=0)
    for e in (rhs, extra):
        if e is not None and e:
            K = max(K, coeff_weight(e) + top)
    return K


def _h_basis(spec, ring, n, W, K, weights=None) -> List[Monomial]:
    out: List[Monomial] = []
    for w in (weights if weights is not None else range(2, W)):
        out.extend(pol_basis(spec, ring, w, n + 1, max_coeff_weight=K))
    check_cap(len(out))
    return out


def _elem(ring, basis, sol, offset=0) -> Element:
    out = ring.zero()
    for j, c in sol.items():
        if offset <= j < offset + len(basis):
            out = out + ring.monomial_element(basis[j - offset], c)
    return out


def compat_check(spec: GradedAlgebraSpec, omega: Element, pi: Element, W: int) -> CompatResult:
    """Solve delta_pi h = mu(omega, pi) - sigma(pi) mod F^W for h of degree n+1, weight >= 2."""
    ring = pi.ring
    n = ring.shift
    if mc_defect(spec, pi, W):
        raise PreconditionError("pi is not Maurer-Cartan modulo F^W")
    if not omega.ring is ring:
        omega = ring.embed(omega)
    rep = is_closed_presymplectic(spec, DeRhamElement.from_element(omega, n, W))
    if not rep.closed:
        raise PreconditionError(f"omega is not closed (first failure at weight {rep.failing_weight})")
    resid = (mu(omega, pi, W) - sigma(pi, W).direction).truncate(W)
    if not resid:
        return CompatResult(True, CompatCertificate(omega, pi, ring.zero(), W), resid)
    K = _solve_window(spec, resid, pi)
    basis = _h_basis(spec, ring, n, W, K)
    E = Echelon()
    for m in basis:
        E.add(poisson_differential(spec, pi, ring.monomial_element(m), W).terms)
    sol, cert = E.solve(resid.terms)
    if sol is None:
        return CompatResult(False, None, resid, cert)
    return CompatResult(True, CompatCertificate(omega, pi, _elem(ring, basis, sol), W), resid)


# ---------------------------------------------------------------------------
# matrices over A

Matrix = List[List[Element]]


def compose(Q: Matrix, P: Matrix) -> Matrix:
    """Matrix of Q after P for even A-linear maps: (Q o P)_{cb} = sum_a P_ab Q_ca."""
    rows, inner, cols = len(Q), len(P), len(P[0]) if P else 0
    ring = (Q[0][0] if Q and Q[0] else P[0][0]).ring
    out = [[ring.zero() for _ in range(cols)] for _ in range(rows)]
    for c in range(rows):
        for b in range(cols):
            acc = ring.zero()
            for a in range(inner):
                if P[a][b] and Q[c][a]:
                    acc = acc + P[a][b] * Q[c][a]
            out[c][b] = acc
    return out


def identity(ring: Ring, m: int) -> Matrix:
    return [[ring.one() if i == j else ring.zero() for j in range(m)] for i in range(m)]


def is_identity(M: Matrix) -> bool:
    return all((M[i][j] - (1 if i == j else 0)).is_zero() for i in range(len(M)) for j in range(len(M)))


def sharp_matrix(pi2: Element) -> Matrix:
    """P with [pi2, x_b] = sum_a P_ab pv_a."""
    ring = pi2.ring
    m = ring.ngens
    P = [[ring.zero() for _ in range(m)] for _ in range(m)]
    for b, g in enumerate(ring.gens):
        img = schouten(pi2, ring.x(g.name))
        for a in range(m):
            P[a][b] = _coefficient_of(img, ring.sym_index("pv", a))
    return P


def form_sharp_matrix(omega2: Element) -> Matrix:
    """O with interior(omega2, pv_c) = sum_a O_ac dx_a."""
    ring = omega2.ring
    m = ring.ngens
    O = [[ring.zero() for _ in range(m)] for _ in range(m)]
    for c, g in enumerate(ring.gens):
        img = interior(omega2, ring.pv(g.name))
        for a in range(m):
            O[a][c] = _coefficient_of(img, ring.sym_index("dx", a))
    return O


def _coefficient_of(e: Element, sym: int) -> Element:
    """The coefficient f_s in e = sum_s f_s * s, where the f_s involve only x symbols.

    x symbols precede dx and pv in the global order, so f * s is already in
    normal form with sign +1.
    """
    ring = e.ring
    out = {}
    for m, c in e.terms.items():
        if m[sym] == 1:
            mm = list(m)
            mm[sym] = 0
            out[tuple(mm)] = c
    return Element(ring, out)


def invert_series(P: Matrix, max_terms: int = 64) -> Optional[Matrix]:
    """Two-sided inverse via P = P0 + N with P0 constant: sum_k (-P0^{-1} N)^k P0^{-1}.

    Returns None when P0 is singular or the series does not terminate.
    """
    from .linalg import invert_matrix

    m = len(P)
    if m == 0:
        return []
    ring = P[0][0].ring
    unit = ring.unit_mono()
    P0 = [[P[i][j].terms.get(unit, Fraction(0)) for j in range(m)] for i in range(m)]
    inv0 = invert_matrix(P0)
    if inv0 is None:
        return None
    I0 = [[ring.const(inv0[i][j]) for j in range(m)] for i in range(m)]
    N = [[P[i][j] - ring.const(P0[i][j]) for j in range(m)] for i in range(m)]
    X = compose(I0, N)
    X = [[-e for e in row] for row in X]
    total = I0
    power = I0
    for _ in range(max_terms):
        power = compose(X, power)
        if all(e.is_zero() for row in power for e in row):
            break
        total = [[total[i][j] + power[i][j] for j in range(m)] for i in range(m)]
    else:
        return None
    if not (is_identity(compose(total, P)) and is_identity(compose(P, total))):
        return None
    return total


# ---------------------------------------------------------------------------
# chain complexes per polyweight piece

@dataclass
class PieceComplex:
    """Finite complex: basis keys per degree and sparse images of each basis vector."""

    bases: Dict[int, List]
    images: Dict[int, List[Vector]]

    def ranks(self) -> Dict[int, int]:
        out = {}
        for d, cols in self.images.items():
            E = Echelon()
            for c in cols:
                E.add(c)
            out[d] = E.rank
        return out

    def cohomology(self) -> Dict[int, int]:
        r = self.ranks()
        return {d: len(b) - r.get(d, 0) - r.get(d - 1, 0) for d, b in self.bases.items()}

    def is_acyclic(self) -> bool:
        return all(v == 0 for v in self.cohomology().values())

    def squares_to_zero(self) -> bool:
        for d, cols in self.images.items():
            nxt = self.images.get(d + 1)
            if nxt is None:
                continue
            idx = {k: i for i, k in enumerate(self.bases.get(d + 1, []))}
            for c in cols:
                acc: Dict = {}
                for k, v in c.items():
                    for kk, vv in nxt[idx[k]].items():
                        acc[kk] = acc.get(kk, 0) + v * vv
                if any(acc.values()):
                    return False
        return True


def _by_degree(ring: Ring, monos: List[Monomial]) -> Dict[int, List[Monomial]]:
    out: Dict[int, List[Monomial]] = {}
    for m in monos:
        out.setdefault(ring.mono_info(m)[2], []).append(m)
    return out


def _form_diff(spec, ring):
    D = spec.differential(ring)
    return lambda e: D(e)


def _cone_pieces(spec, ring, X: List[Monomial], Y: List[Monomial], V: List[Monomial], dX, dY, F_X, G) -> PieceComplex:
    """Cone of the projection cocone(F) -> X with F(x, y) = F_X(x) + G(y): X (+) Y -> V.

    Basis tags: 0 = X^{k+1}, 1 = Y^{k+1}, 2 = V^k, 3 = X^k.
    """
    Xd, Yd, Vd = _by_degree(ring, X), _by_degree(ring, Y), _by_degree(ring, V)
    degs = set()
    for d in Xd:
        degs |= {d - 1, d}
    for d in Yd:
        degs.add(d - 1)
    degs |= set(Vd)
    bases: Dict[int, List] = {}
    images: Dict[int, List[Vector]] = {}
    for k in sorted(degs):
        keys, cols = [], []
        for m in Xd.get(k + 1, []):
            a = ring.monomial_element(m)
            col = {}
            for mm, c in dX(a).terms.items():
                col[(0, mm)] = -c
            for mm, c in F_X(a).terms.items():
                col[(2, mm)] = -c
            col[(3, m)] = Fraction(1)
            keys.append((0, m))
            cols.append(col)
        for m in Yd.get(k + 1, []):
            b = ring.monomial_element(m)
            col = {}
            for mm, c in dY(b).terms.items():
                col[(1, mm)] = -c
            for mm, c in G(b).terms.items():
                col[(2, mm)] = col.get((2, mm), 0) - c
            keys.append((1, m))
            cols.append({kk: v for kk, v in col.items() if v})
        for m in Vd.get(k, []):
            v = ring.monomial_element(m)
            keys.append((2, m))
            cols.append({(2, mm): c for mm, c in dY(v).terms.items()})
        for m in Xd.get(k, []):
            x = ring.monomial_element(m)
            keys.append((3, m))
            cols.append({(3, mm): c for mm, c in dX(x).terms.items()})
        if keys:
            bases[k] = keys
            images[k] = cols
    return PieceComplex(bases, images)


def _single_polyweight(e: Element) -> Optional[int]:
    pw = e.polyweights()
    return next(iter(pw)) if len(pw) == 1 else None


@dataclass
class TangentMReport:
    p: int
    acyclic: Optional[bool]            # None: pieces could not be separated (inconclusive)
    pieces: Dict[int, Dict[int, int]] = field(default_factory=dict)   # polyweight -> cohomology dims
    square_zero: bool = True


def tangent_complex_M(spec: GradedAlgebraSpec, omega2: Element, pi2: Element, p: int) -> TangentMReport:
    """Cone of the projection M(omega2, pi2, p) -> Omega^p, per total-polyweight piece."""
    ring = pi2.ring
    qpi, qom = _single_polyweight(pi2), _single_polyweight(omega2)
    if qpi is None or (omega2 and qom is None) or (omega2 and qom + qpi != 0) or not spec.is_weight_homogeneous():
        return TangentMReport(p, None)
    K = spec.max_poly_weight
    dform = _form_diff(spec, ring)
    dh = spec.delta_hat(ring)
    dpol = lambda b: schouten(dh, b)
    F_X = lambda a: mu(a, pi2)
    G = lambda b: nu(omega2, pi2, b) - b.scale(p - 1)
    forms = enumerate_basis(ring, "dx", p, None, K)
    pols = enumerate_basis(ring, "pv", p, None, K)
    targets = {ring.mono_info(m)[6] + p * qpi for m in forms} | {ring.mono_info(m)[6] for m in pols}
    report = TangentMReport(p, True)
    for q in sorted(targets):
        X = enumerate_basis(ring, "dx", p, None, polyweight=q - p * qpi)
        Y = enumerate_basis(ring, "pv", p, None, polyweight=q)
        check_cap(len(X) + 2 * len(Y))
        C = _cone_pieces(spec, ring, X, Y, Y, dform, dpol, F_X, G)
        if not C.squares_to_zero():
            report.square_zero = False
        h = C.cohomology()
        report.pieces[q] = h
        if any(h.values()):
            report.acyclic = False
    return report


def nu_matrix_identity(omega2: Element, pi2: Element) -> bool:
    """On weight one, nu(omega2, pi2, -) is pi2^sharp after omega2^sharp."""
    ring = pi2.ring
    P, O = sharp_matrix(pi2), form_sharp_matrix(omega2)
    PO = compose(P, O)
    for c, g in enumerate(ring.gens):
        lhs = nu(omega2, pi2, ring.pv(g.name))
        rhs = ring.zero()
        for d in range(ring.ngens):
            rhs = rhs + PO[d][c] * ring.sym(ring.sym_index("pv", d))
        if lhs != rhs:
            return False
    return True


# ---------------------------------------------------------------------------
# non-degeneracy

@dataclass
class NondegCertificate:
    status: str                        # "nondegenerate" | "degenerate" | "inconclusive"
    matrix: Optional[Matrix] = None
    inverse: Optional[Matrix] = None
    method: str = "series"
    pieces: Dict[int, Dict[int, int]] = field(default_factory=dict)

    @property
    def nondegenerate(self) -> bool:
        return self.status == "nondegenerate"


def _sharp_cone(spec, pi2: Element) -> NondegCertificate:
    ring = pi2.ring
    q = _single_polyweight(pi2)
    P = sharp_matrix(pi2)
    if not spec.is_weight_homogeneous() or (pi2 and q is None):
        return NondegCertificate("inconclusive", P, method="cone")
    if not pi2:
        return NondegCertificate("degenerate" if ring.ngens else "nondegenerate", P, method="cone")
    K = spec.max_poly_weight
    dform = _form_diff(spec, ring)
    dh = spec.delta_hat(ring)
    dpol = lambda b: schouten(dh, b)
    forms = enumerate_basis(ring, "dx", 1, None, K)
    cert = NondegCertificate("nondegenerate", P, method="cone")
    for qq in sorted({ring.mono_info(m)[6] for m in forms}):
        X = enumerate_basis(ring, "dx", 1, None, polyweight=qq)
        V = enumerate_basis(ring, "pv", 1, None, polyweight=qq + q)
        check_cap(len(X) + len(V))
        # cone of mu(-, pi2): Omega^1 -> gr^1 Pol, with Y empty
        C = _mapping_cone(ring, X, V, dform, dpol, lambda a: mu(a, pi2))
        h = C.cohomology()
        cert.pieces[qq] = h
        if any(h.values()):
            cert.status = "degenerate"
    return cert


def _mapping_cone(ring, X, V, dX, dV, f) -> PieceComplex:
    """Cone(f: X -> V): C^k = X^{k+1} (+) V^k, d(x, v) = (-dx, f(x) + dv)."""
    Xd, Vd = _by_degree(ring, X), _by_degree(ring, V)
    degs = {d - 1 for d in Xd} | set(Vd)
    bases, images = {}, {}
    for k in sorted(degs):
        keys, cols = [], []
        for m in Xd.get(k + 1, []):
            a = ring.monomial_element(m)
            col = {(0, mm): -c for mm, c in dX(a).terms.items()}
            for mm, c in f(a).terms.items():
                col[(1, mm)] = c
            keys.append((0, m))
            cols.append(col)
        for m in Vd.get(k, []):
            v = ring.monomial_element(m)
            keys.append((1, m))
            cols.append({(1, mm): c for mm, c in dV(v).terms.items()})
        if keys:
            bases[k] = keys
            images[k] = cols
    return PieceComplex(bases, images)


def nondeg_check(spec: GradedAlgebraSpec, pi: Element) -> NondegCertificate:
    """Invertibility of pi_2^sharp: explicit inverse when possible, else cone ranks per piece."""
    ring = pi.ring
    pi2 = pi.weight_part(2)
    if ring.ngens == 0:
        return NondegCertificate("nondegenerate", [], [])
    P = sharp_matrix(pi2)
    inv = invert_series(P)
    if inv is not None:
        return NondegCertificate("nondegenerate", P, inv, "series")
    return _sharp_cone(spec, pi2)


def form_nondeg_check(spec: GradedAlgebraSpec, omega: Element) -> NondegCertificate:
    """Invertibility of omega_2^sharp via the same series construction."""
    ring = omega.ring
    om2 = omega.form_part(2)
    if ring.ngens == 0:
        return NondegCertificate("nondegenerate", [], [])
    O = form_sharp_matrix(om2)
    inv = invert_series(O)
    if inv is not None:
        return NondegCertificate("nondegenerate", O, inv, "series")
    if all(not e for row in O for e in row):
        return NondegCertificate("degenerate", O)
    return NondegCertificate("inconclusive", O)


# ---------------------------------------------------------------------------
# conversions

@dataclass
class ConversionResult:
    omega: Element
    pi: Element
    certificate: CompatCertificate


def _form_basis(spec, ring, p, n, K) -> List[Monomial]:
    return enumerate_basis(ring, "dx", p, n + 2, K)


def poisson_to_symplectic(spec: GradedAlgebraSpec, pi: Element, W: int) -> ConversionResult:
    """Solve mu(omega, pi) - delta_pi h = sigma(pi), D omega = 0 mod F^W jointly for (omega, h)."""
    ring = pi.ring
    n = ring.shift
    if mc_defect(spec, pi, W):
        raise PreconditionError("pi is not Maurer-Cartan modulo F^W")
    nd = nondeg_check(spec, pi)
    if nd.status != "nondegenerate":
        raise PreconditionError(f"pi is {nd.status}")
    target = sigma(pi, W).direction
    K = _solve_window(spec, target, pi)
    fbasis: List[Monomial] = []
    for p in range(2, W):
        fbasis.extend(_form_basis(spec, ring, p, n, K))
    hbasis = _h_basis(spec, ring, n, W, K)
    check_cap(len(fbasis) + len(hbasis))
    E = Echelon()
    for m in fbasis:
        f = ring.monomial_element(m)
        col = {(0, k): v for k, v in mu(f, pi, W).terms.items()}
        col.update({(1, k): v for k, v in total_D(spec, f).truncate(W).terms.items()})
        E.add(col)
    for m in hbasis:
        col = {(0, k): -v for k, v in poisson_differential(spec, pi, ring.monomial_element(m), W).terms.items()}
        E.add(col)
    sol, cert = E.solve({(0, k): v for k, v in target.terms.items()})
    if sol is None:
        raise AssertionError("no symplectic partner found; the linear system is inconsistent")
    omega = _elem(ring, fbasis, sol)
    h = _elem(ring, hbasis, sol, len(fbasis))
    return ConversionResult(omega, pi.truncate(W), CompatCertificate(omega, pi.truncate(W), h, W))


def symplectic_to_poisson(spec: GradedAlgebraSpec, omega: Element, W: int) -> ConversionResult:
    """pi_2 inverts omega_2; then pi_p and h are solved stage by stage from MC and compatibility."""
    ring = omega.ring
    n = ring.shift
    rep = is_closed_presymplectic(spec, DeRhamElement.from_element(omega, n, W))
    if not rep.closed:
        raise PreconditionError("omega is not closed modulo F^W")
    omega = omega.truncate(W)
    om2 = omega.form_part(2)
    nd = form_nondeg_check(spec, omega)
    if nd.status == "degenerate":
        raise PreconditionError("omega_2 is degenerate")
    K = _solve_window(spec, om2)
    # weight 2: nu(omega2, pi2, pv_c) = pv_c for every generator
    b2 = pol_basis(spec, ring, 2, n + 2, max_coeff_weight=K)
    E = Echelon()
    for m in b2:
        e = ring.monomial_element(m)
        col = {}
        for c, g in enumerate(ring.gens):
            for k, v in nu(om2, e, ring.pv(g.name)).terms.items():
                col[(c, k)] = v
        E.add(col)
    rhs = {}
    for c, g in enumerate(ring.gens):
        for k, v in ring.pv(g.name).terms.items():
            rhs[(c, k)] = v
    sol, _ = E.solve(rhs)
    if sol is None:
        raise PreconditionError("omega_2^sharp is not invertible within the polyweight window")
    pi = _elem(ring, b2, sol)
    h = ring.zero()
    dh = spec.delta_hat(ring)
    for p in range(3, W):
        K = _solve_window(spec, mu(omega, pi, p + 1), pi)
        pb = pol_basis(spec, ring, p, n + 2, max_coeff_weight=K)
        hb = _h_basis(spec, ring, n, p + 1, K)
        E = Echelon()
        for m in pb:
            e = ring.monomial_element(m)
            col = {(0, k): v for k, v in schouten(dh, e).weight_part(p).terms.items()}
            comp = (mu(omega, pi + e, p + 1) - mu(omega, pi, p + 1) - e.scale(p - 1)).truncate(p + 1)
            col.update({(1, k): v for k, v in comp.terms.items()})
            E.add(col)
        for m in hb:
            e = ring.monomial_element(m)
            col = {(1, k): -v for k, v in poisson_differential(spec, pi, e, p + 1).terms.items()}
            E.add(col)
        kap = mc_defect(spec, pi, p + 1).weight_part(p)
        res = (mu(omega, pi, p + 1) - sigma(pi, p + 1).direction).truncate(p + 1)
        rhs = {(0, k): -v for k, v in kap.terms.items()}
        rhs.update({(1, k): -v for k, v in res.terms.items()})
        sol, _ = E.solve(rhs)
        if sol is None:
            raise AssertionError(f"no Poisson lift at weight {p}")
        pi = pi + _elem(ring, pb, sol)
        h = _elem(ring, hb, sol, len(pb))
    if W <= 3:
        res = (mu(omega, pi, W) - sigma(pi, W).direction).truncate(W)
        if res:
            hb = _h_basis(spec, ring, n, W, K)
            E = Echelon()
            for m in hb:
                E.add(poisson_differential(spec, pi, ring.monomial_element(m), W).terms)
            sol, _ = E.solve(res.terms)
            if sol is None:
                raise AssertionError("weight-2 compatibility failed")
            h = _elem(ring, hb, sol)
    return ConversionResult(omega, pi, CompatCertificate(omega, pi, h, W))


def scale_pair(omega: Element, pi: Element, h: Element, lam) -> Tuple[Element, Element, Element]:
    """(lam omega, s pi, s h) where s multiplies weight i by lam^(1-i)."""
    from .polyvectors import scale_weights

    lam = Fraction(lam)
    return omega.scale(lam), scale_weights(pi, lam), scale_weights(h, lam)


# ---------------------------------------------------------------------------
# round trips

@dataclass
class FormGauge:
    found: bool
    beta: Optional[Element] = None
    functional: Optional[Vector] = None


def form_gauge(spec: GradedAlgebraSpec, omega0: Element, omega1: Element, W: int) -> FormGauge:
    """Find beta in F^2 DR of degree n+1 with omega1 - omega0 = D beta mod F^W."""
    ring = omega0.ring
    n = ring.shift
    diff = (omega1 - omega0).truncate(W)
    if not diff:
        return FormGauge(True, ring.zero())
    K = _solve_window(spec, diff)
    basis: List[Monomial] = []
    for p in range(2, W):
        basis.extend(enumerate_basis(ring, "dx", p, n + 1, K))
    check_cap(len(basis))
    E = Echelon()
    for m in basis:
        E.add(total_D(spec, ring.monomial_element(m)).truncate(W).terms)
    sol, cert = E.solve(diff.terms)
    if sol is None:
        return FormGauge(False, functional=cert)
    return FormGauge(True, _elem(ring, basis, sol))


@dataclass
class RoundTrip:
    start: Element
    partner: Element
    back: Element
    forward: ConversionResult
    backward: ConversionResult
    gauge: object                  # GaugeResult for polyvectors, FormGauge for forms

    @property
    def ok(self) -> bool:
        return bool(self.gauge.found)


def poisson_round_trip(spec: GradedAlgebraSpec, pi: Element, W: int) -> RoundTrip:
    """pi -> omega -> pi', compared with pi by a gauge homotopy."""
    fwd = poisson_to_symplectic(spec, pi, W)
    bwd = symplectic_to_poisson(spec, fwd.omega, W)
    g = gauge_equivalent(spec, pi.ring.shift, pi.truncate(W), bwd.pi, W)
    return RoundTrip(pi.truncate(W), fwd.omega, bwd.pi, fwd, bwd, g)


def symplectic_round_trip(spec: GradedAlgebraSpec, omega: Element, W: int) -> RoundTrip:
    """omega -> pi -> omega', compared with omega by a de Rham coboundary."""
    fwd = symplectic_to_poisson(spec, omega, W)
    bwd = poisson_to_symplectic(spec, fwd.pi, W)
    g = form_gauge(spec, omega.truncate(W), bwd.omega, W)
    return RoundTrip(omega.truncate(W), fwd.pi, bwd.omega, fwd, bwd, g)
