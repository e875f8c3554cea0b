"""Quasi-free CDGAs over Q, Kähler forms and the de Rham complex.

A :class:`GradedAlgebraSpec` fixes the generators of ``A`` and the values
of its differentials on them.  Forms live in the same :class:`~workbench.graded.Ring`
as polyvectors (symbols ``dx_a``), so all sign bookkeeping is shared.

The differential on forms is fixed by ``delta(dx_a) = -d(delta x_a)``; with
the single-parity convention this makes ``d`` and ``delta`` anticommute and
the total differential is ``D = d + delta``.  Read against the bigraded
convention where delta acts on Omega^p without passing the form factors,
this is ``D = d + (-1)^p delta``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations_with_replacement
from typing import Dict, Iterator, List, Optional, Tuple

from .graded import (Derivation, Element, GradedError, Generator, Monomial, Ring,
                     apply_derivation, ring_for)


class SpecError(GradedError):
    """Invalid algebra specification; ``location`` names the failing generator."""

    def __init__(self, msg: str, location: Optional[str] = None):
        super().__init__(msg)
        self.location = location


@dataclass
class GradedAlgebraSpec:
    generators: List[Generator]
    delta: Dict[str, Element] = field(default_factory=dict)
    partial: Dict[str, Element] = field(default_factory=dict)
    max_poly_weight: int = 2
    cochain_bound: Optional[int] = None
    check: bool = True

    def __post_init__(self):
        self.generators = list(self.generators)
        names = [g.name for g in self.generators]
        base = self.ring(0)
        for table in (self.delta, self.partial):
            for k in list(table):
                if k not in names:
                    raise SpecError(f"differential given on unknown generator {k!r}", k)
                table[k] = base.embed(table[k])
        if self.check:
            self.validate()

    # ------------------------------------------------------------------
    def ring(self, n: int = 0) -> Ring:
        return ring_for(self.generators, n)

    @property
    def names(self) -> List[str]:
        return [g.name for g in self.generators]

    @property
    def is_stacky(self) -> bool:
        return any(g.cochain for g in self.generators) or any(v for v in self.partial.values())

    def differential(self, ring: Ring, which: str = "total") -> Derivation:
        """Odd derivation on A[dx] for ``which`` in {'total', 'delta', 'partial'}."""
        dr = de_rham_derivation(ring)
        vals: Dict[int, Element] = {}
        for a, g in enumerate(self.generators):
            v = ring.zero()
            if which in ("total", "delta") and g.name in self.delta:
                v = v + ring.embed(self.delta[g.name])
            if which in ("total", "partial") and g.name in self.partial:
                v = v + ring.embed(self.partial[g.name])
            vals[ring.sym_index("x", a)] = v
            vals[ring.sym_index("dx", a)] = -apply_derivation(dr, v)
        return Derivation(ring, vals, 1)

    def is_weight_homogeneous(self) -> bool:
        """True when delta and partial preserve total polyweight, so complexes split into finite pieces."""
        for table in (self.delta, self.partial):
            for name, v in table.items():
                w = self.generators[self.names.index(name)].weight
                if v and v.polyweights() != {w}:
                    return False
        return True

    def delta_hat(self, ring: Ring) -> Element:
        """The weight-1 polyvector sum_a D(x_a) pv_a; bracketing with it is the differential."""
        out = ring.zero()
        for a, g in enumerate(self.generators):
            v = ring.zero()
            if g.name in self.delta:
                v = v + ring.embed(self.delta[g.name])
            if g.name in self.partial:
                v = v + ring.embed(self.partial[g.name])
            if v:
                out = out + v * ring.sym(ring.sym_index("pv", a))
        return out

    # ------------------------------------------------------------------
    def validate(self) -> None:
        ring = self.ring(0)
        for g in self.generators:
            if g.chain < 0:
                raise SpecError(f"generator {g.name} has negative chain degree {g.chain}", g.name)
            if g.cochain < 0:
                raise SpecError(f"generator {g.name} has negative cochain degree {g.cochain}", g.name)
            if g.weight < 0 or (g.weight == 0 and g.degree % 2 == 0):
                raise SpecError(f"even generator {g.name} needs polyWeight >= 1", g.name)
        for name, v in self.delta.items():
            g = self.generators[self.names.index(name)]
            bad = {b for b in v.bidegrees() if b != (g.chain - 1, g.cochain)}
            if bad:
                raise SpecError(f"delta({name}) has bidegree {sorted(bad)}, expected {(g.chain - 1, g.cochain)}", name)
            if v.form_degrees() - {0} or v.weights() - {0}:
                raise SpecError(f"delta({name}) must lie in A", name)
        for name, v in self.partial.items():
            g = self.generators[self.names.index(name)]
            bad = {b for b in v.bidegrees() if b != (g.chain, g.cochain + 1)}
            if bad:
                want = (g.chain, g.cochain + 1)
                raise SpecError(f"partial({name}) has bidegree {sorted(bad)}, expected {want}", name)
        dl = self.differential(ring, "delta")
        pt = self.differential(ring, "partial")
        for a, g in enumerate(self.generators):
            x = ring.sym(ring.sym_index("x", a))
            if dl(dl(x)):
                raise SpecError(f"delta^2({g.name}) = {dl(dl(x))!r} != 0", g.name)
            if pt(pt(x)):
                raise SpecError(f"partial^2({g.name}) = {pt(pt(x))!r} != 0", g.name)
            mixed = pt(dl(x)) + dl(pt(x))
            if mixed:
                raise SpecError(f"(partial delta + delta partial)({g.name}) = {mixed!r} != 0", g.name)


# ---------------------------------------------------------------------------

def de_rham_derivation(ring: Ring) -> Derivation:
    vals = {ring.sym_index("x", a): ring.sym(ring.sym_index("dx", a)) for a in range(ring.ngens)}
    return Derivation(ring, vals, 1)


def de_rham_d(ring: Ring, a: Element) -> Element:
    """de Rham differential: d(x_a) = dx_a, d(dx_a) = 0."""
    return apply_derivation(de_rham_derivation(ring), a)


def total_D(spec: GradedAlgebraSpec, a: Element) -> Element:
    ring = a.ring
    return de_rham_d(ring, a) + spec.differential(ring)(a)


# ---------------------------------------------------------------------------
# enumeration of monomial bases

def coefficient_monomials(ring: Ring, polyweight: int) -> Iterator[Monomial]:
    """Monomials in the x symbols of exactly the given coefficient polyweight."""
    gens = ring.gens
    m = len(gens)

    def rec(a: int, left: int, acc: List[int]):
        if a == m:
            if left == 0:
                full = list(acc) + [0] * (2 * m)
                yield tuple(full)
            return
        w = gens[a].weight
        if ring.odd[a]:
            maxe = 1 if w <= left else 0
        else:
            maxe = left // w
        for e in range(maxe + 1):
            acc.append(e)
            yield from rec(a + 1, left - e * w, acc)
            acc.pop()

    if polyweight < 0:
        return iter(())
    return rec(0, polyweight, [])


def symbol_monomials(ring: Ring, kind: str, count: int) -> Iterator[Monomial]:
    """Monomials with exactly ``count`` factors of the given kind and no others."""
    idx = list(ring.symbol_range(kind))
    for combo in combinations_with_replacement(idx, count):
        if any(ring.odd[i] and combo.count(i) > 1 for i in set(combo)):
            continue
        m = [0] * ring.nsym
        for i in combo:
            m[i] += 1
        yield tuple(m)


def enumerate_basis(ring: Ring, kind: str, count: int, degree: Optional[int] = None,
                    max_coeff_weight: int = 2, polyweight: Optional[int] = None) -> List[Monomial]:
    """Monomials with ``count`` symbols of ``kind`` ('dx' or 'pv').

    Filters: cochain ``degree`` (if given); either coefficient polyweight
    <= ``max_coeff_weight`` or, when ``polyweight`` is given, total polyweight
    exactly equal to it.
    """
    from .linalg import check_cap

    out: List[Monomial] = []
    for sm in symbol_monomials(ring, kind, count):
        spw = ring.mono_info(sm)[6]
        if polyweight is not None:
            ranges = [polyweight - spw]
        else:
            ranges = range(0, max_coeff_weight + 1)
        for k in ranges:
            for cm in coefficient_monomials(ring, k):
                s, mono = ring.mono_mul(cm, sm)
                if not s:
                    continue
                if degree is not None and ring.mono_info(mono)[2] != degree:
                    continue
                out.append(mono)
                check_cap(len(out))
    out.sort(key=_basis_key)
    return out


def _basis_key(m: Monomial):
    return tuple(-e for e in reversed(m))


def kaehler(spec: GradedAlgebraSpec, p: int, n: int = 0, degree: Optional[int] = None) -> List[Element]:
    """Monomial basis of Omega^p (coefficient polyweight <= maxPolyWeight)."""
    ring = spec.ring(n)
    return [ring.monomial_element(m) for m in
            enumerate_basis(ring, "dx", p, degree, spec.max_poly_weight)]


# ---------------------------------------------------------------------------

@dataclass
class DeRhamElement:
    """omega = sum_p omega_p in F^2 DR / F^W, each omega_p in Omega^p of total degree n + 2."""

    components: Dict[int, Element]
    shift: int
    W: int

    def total(self, ring: Optional[Ring] = None) -> Element:
        comps = [c for c in self.components.values()]
        if not comps:
            if ring is None:
                raise GradedError("empty DeRhamElement needs a ring")
            return ring.zero()
        out = comps[0].ring.zero()
        for c in comps:
            out = out + c
        return out

    @classmethod
    def from_element(cls, e: Element, shift: int, W: int) -> "DeRhamElement":
        comps: Dict[int, Element] = {}
        for p in sorted(e.form_degrees()):
            comps[p] = e.form_part(p)
        return cls(comps, shift, W)

    def check_degrees(self) -> None:
        for p, c in self.components.items():
            if c.is_zero():
                continue
            if c.form_degrees() != {p}:
                raise GradedError(f"component {p} has form degrees {sorted(c.form_degrees())}")
            if c.degrees() != {self.shift + 2}:
                raise GradedError(
                    f"component omega_{p} is not homogeneous of degree {self.shift + 2}: {sorted(c.degrees())}")


@dataclass
class ClosednessReport:
    closed: bool
    failing_weight: Optional[int] = None
    failing_term: Optional[Tuple[Monomial, Fraction]] = None


def is_closed_presymplectic(spec: GradedAlgebraSpec, omega: DeRhamElement) -> ClosednessReport:
    """True iff D(omega) = 0 modulo F^W; otherwise the first failing form degree and coefficient."""
    omega.check_degrees()
    comps = [c for c in omega.components.values() if not c.is_zero()]
    if not comps:
        return ClosednessReport(True)
    ring = comps[0].ring
    Dw = total_D(spec, omega.total(ring)).truncate(omega.W)
    if Dw.is_zero():
        return ClosednessReport(True)
    form = min(Dw.form_degrees())
    first = next(iter(Dw.form_part(form)))
    # D(omega) in form degree q is delta omega_q + d omega_{q-1}
    return ClosednessReport(False, form, first)
