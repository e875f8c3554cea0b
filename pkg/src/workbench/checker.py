"""Independent re-verification of certificates.

Nothing here calls the solver modules: the bracket is re-derived factor by
factor from the generator pairings, and contraction, the Euler vector and
the differentials are rebuilt from the raw algebra data.  Only the graded
core (normal forms and Leibniz extension) is shared.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import product
from typing import Dict, Iterable, List, Optional

from .graded import Derivation, Element, Ring, apply_derivation, mono_factors


def _pairing(ring: Ring, i: int, j: int) -> int:
    """[s_i, s_j] for single symbols: [pv_a, x_a] = 1 and its graded mirror."""
    si, sj = ring.symbols[i], ring.symbols[j]
    if si.gen != sj.gen:
        return 0
    n = ring.shift
    if si.kind == "pv" and sj.kind == "x":
        return 1
    if si.kind == "x" and sj.kind == "pv":
        s_x = si.degree - (n + 1)
        s_pv = sj.degree - (n + 1)
        return -1 if (s_x * s_pv) % 2 == 0 else 1
    return 0


def _parity(ring: Ring, factors: Iterable[int]) -> int:
    return sum(ring.odd[f] for f in factors) % 2


def _product(ring: Ring, factors: List[int], coeff) -> Element:
    out = ring.const(coeff)
    for f in factors:
        out = out * ring.sym(f)
    return out


def oracle_bracket(a: Element, b: Element) -> Element:
    """Biderivation expansion of [a, b] over every pair of factors.

    For u = L f R and v = L' g R' the pair (f, g) contributes
    (-1)^{|R| s(v) + s(f) |L'|} L L' [f, g] R' R, with s the shifted parity.
    """
    ring = a.ring
    n1 = (ring.shift + 1) % 2
    out = ring.zero()
    for ma, ca in a.terms.items():
        fa = mono_factors(ma)
        for mb, cb in b.terms.items():
            fb = mono_factors(mb)
            s_v = (_parity(ring, fb) + n1) % 2
            for i, f in enumerate(fa):
                L, R = fa[:i], fa[i + 1:]
                s_f = (ring.odd[f] + n1) % 2
                for j, g in enumerate(fb):
                    c = _pairing(ring, f, g)
                    if not c:
                        continue
                    Lp, Rp = fb[:j], fb[j + 1:]
                    sign = (_parity(ring, R) * s_v + s_f * _parity(ring, Lp)) % 2
                    coef = ca * cb * c * (-1 if sign else 1)
                    out = out + _product(ring, L + Lp + Rp + R, coef)
    return out


# ---------------------------------------------------------------------------
# raw data of a spec

def _diff_values(spec, ring: Ring) -> Dict[str, Element]:
    vals = {}
    for g in ring.gens:
        v = ring.zero()
        for table in (spec.delta, spec.partial):
            if g.name in table:
                v = v + ring.embed(table[g.name])
        vals[g.name] = v
    return vals


def delta_hat(spec, ring: Ring) -> Element:
    vals = _diff_values(spec, ring)
    out = ring.zero()
    for g in ring.gens:
        out = out + vals[g.name] * ring.pv(g.name)
    return out


def total_D(spec, ring: Ring, e: Element) -> Element:
    """d + delta on forms, with delta(dx_a) = -d(delta x_a)."""
    dvals = {ring.sym_index("x", a): ring.dx(g.name) for a, g in enumerate(ring.gens)}
    d = Derivation(ring, dvals, 1)
    vals = _diff_values(spec, ring)
    dl = {}
    for a, g in enumerate(ring.gens):
        dl[ring.sym_index("x", a)] = vals[g.name]
        dl[ring.sym_index("dx", a)] = -apply_derivation(d, vals[g.name])
    return apply_derivation(d, e) + apply_derivation(Derivation(ring, dl, 1), e)


def truncate(e: Element, W: int) -> Element:
    ring = e.ring
    out = {}
    for m, c in e.terms.items():
        npv = sum(m[i] for i in ring.symbol_range("pv"))
        ndx = sum(m[i] for i in ring.symbol_range("dx"))
        if npv < W and ndx < W:
            out[m] = c
    return Element(ring, out)


def kappa(spec, pi: Element, W: int) -> Element:
    dh = delta_hat(spec, pi.ring)
    return truncate(oracle_bracket(dh, pi) + oracle_bracket(pi, pi).scale(Fraction(1, 2)), W)


def euler(pi: Element) -> Element:
    ring = pi.ring
    out = {}
    for m, c in pi.terms.items():
        w = sum(m[i] for i in ring.symbol_range("pv"))
        if w != 1:
            out[m] = c * (w - 1)
    return Element(ring, out)


def contract(omega: Element, pi: Element, W: int) -> Element:
    """Substitute dx_a -> [pi, x_a] factor by factor."""
    ring = omega.ring
    imgs = {ring.sym_index("dx", a): oracle_bracket(pi, ring.x(g.name)) for a, g in enumerate(ring.gens)}
    out = ring.zero()
    for m, c in omega.terms.items():
        t = ring.const(c)
        for f in mono_factors(m):
            t = truncate(t * imgs.get(f, ring.sym(f)), W)
        out = out + t
    return truncate(out, W)


# ---------------------------------------------------------------------------
# certificate checks

def verify_mc(spec, pi: Element, W: int) -> bool:
    return not kappa(spec, pi, W)


def verify_closed(spec, omega: Element, W: int) -> bool:
    return not truncate(total_D(spec, omega.ring, omega), W)


def verify_compat(spec, omega: Element, pi: Element, h: Element, W: int) -> bool:
    """kappa(pi) = 0, D omega = 0 and [delta_hat + pi, h] = mu(omega, pi) - sigma(pi), all mod F^W."""
    ring = pi.ring
    if not verify_mc(spec, pi, W) or not verify_closed(spec, omega, W):
        return False
    if any(sum(m[i] for i in ring.symbol_range("pv")) < 2 for m in h.terms):
        return False
    lhs = truncate(oracle_bracket(delta_hat(spec, ring) + pi, h), W)
    rhs = truncate(contract(omega, pi, W) - euler(truncate(pi, W)), W)
    return lhs == rhs


def verify_inverse(P, Q) -> bool:
    """Both composites of even A-linear maps are the identity: sum_a P_ab Q_ca = delta_cb."""
    m = len(P)
    for first, second in ((P, Q), (Q, P)):
        for c in range(m):
            for b in range(m):
                acc = None
                for a in range(m):
                    t = first[a][b] * second[c][a]
                    acc = t if acc is None else acc + t
                want = 1 if c == b else 0
                if acc is None or (acc - want):
                    return False
    return True


def verify_gauge(spec, path: List[Element], lam: List[Element], pi0: Element, pi1: Element, W: int) -> bool:
    """Endpoints plus the two components of the MC equation over Q[t, dt]."""
    ring = pi0.ring
    dh = delta_hat(spec, ring)
    at0 = path[0]
    at1 = ring.zero()
    for c in path:
        at1 = at1 + c
    if truncate(at0 - pi0, W) or truncate(at1 - pi1, W):
        return False
    deg = len(path) - 1
    for k in range(2 * deg + 1):
        v = ring.zero()
        if k <= deg:
            v = v + oracle_bracket(dh, path[k])
        for i in range(max(0, k - deg), min(k, deg) + 1):
            v = v + oracle_bracket(path[i], path[k - i]).scale(Fraction(1, 2))
        if truncate(v, W):
            return False
    total = list(path)
    total[0] = total[0] + dh
    for k in range(deg + len(lam)):
        lhs = path[k + 1].scale(k + 1) if k + 1 <= deg else ring.zero()
        rhs = ring.zero()
        for i, X in enumerate(total):
            j = k - i
            if 0 <= j < len(lam):
                rhs = rhs + oracle_bracket(X, lam[j])
        if truncate(lhs - rhs, W):
            return False
    return True


def verify_form_gauge(spec, omega0: Element, omega1: Element, beta: Element, W: int) -> bool:
    """omega1 - omega0 = D beta mod F^W."""
    return not truncate(omega1 - omega0 - total_D(spec, omega0.ring, beta), W)


def lattice_solvable(images: List[Dict], rhs: Dict, bound: int = 2, denominator: int = 1) -> Optional[tuple]:
    """Brute force over coefficient vectors in ([-bound, bound] / denominator)^k."""
    k = len(images)
    steps = [Fraction(c, denominator) for c in range(-bound * denominator, bound * denominator + 1)]
    for coeffs in product(steps, repeat=k):
        acc: Dict = {}
        for c, col in zip(coeffs, images):
            if c:
                for key, v in col.items():
                    acc[key] = acc.get(key, 0) + c * v
        if {kk: v for kk, v in acc.items() if v} == {kk: v for kk, v in rhs.items() if v}:
            return coeffs
    return None


def verify_functional(y: Dict, columns: Iterable[Dict], rhs: Dict) -> bool:
    """y kills every column and is nonzero on rhs: a certificate that rhs is not in the span."""
    def ev(v):
        return sum((c * v.get(k, 0) for k, c in y.items()), Fraction(0))

    return all(ev(c) == 0 for c in columns) and ev(rhs) != 0


def verify_obstruction_correction(spec, pi: Element, level: int, correction: Element) -> bool:
    """pi mod F^level plus the correction is MC mod F^{level+1}."""
    ring = pi.ring
    lift = truncate(pi, level) + correction
    return verify_mc(spec, lift, level + 1) and all(
        sum(m[i] for i in ring.symbol_range("pv")) == level for m in correction.terms)
