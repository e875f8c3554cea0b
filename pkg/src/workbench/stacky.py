"""Stacky CDGAs, Chevalley-Eilenberg models and Casimir-type Poisson structures.

A stacky CDGA here is a :class:`GradedAlgebraSpec` whose generators may
carry cochain degree and whose ``partial`` table is populated.  The CE model
of a Lie algebra action on Y adjoins odd generators ``eps_<e>`` of bidegree
(0, 1), with partial(a) = sum_i eps_i rho_i(a) and
partial(eps_k) = -1/2 sum c_ij^k eps_i eps_j.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .algebra import GradedAlgebraSpec, SpecError, enumerate_basis, coefficient_monomials
from .graded import Derivation, Element, Generator, GradedError, Monomial, Ring
from .linalg import Echelon, check_cap
from .polyvectors import mc_defect, schouten, sigma


class LieSpecError(SpecError):
    """Invalid Lie algebra data; ``location`` pins the failing index triple or generator."""


@dataclass
class LieAlgebraSpec:
    """Structure constants [e_i, e_j] = sum_k c[i][j][k] e_k and an action on Y by derivations.

    ``action[i]`` maps generator names of Y to rho_i(generator), elements of Y's ring.
    """

    basis: List[str]
    c: List[List[List[Fraction]]]
    action: Dict[int, Dict[str, Element]] = field(default_factory=dict)
    check: bool = True

    def __post_init__(self):
        m = len(self.basis)
        self.c = [[[Fraction(self.c[i][j][k]) for k in range(m)] for j in range(m)] for i in range(m)]
        if self.check:
            self.validate()

    @property
    def dim(self) -> int:
        return len(self.basis)

    @classmethod
    def from_brackets(cls, basis: Sequence[str], brackets: Dict[Tuple[str, str], Dict[str, Fraction]],
                      action=None, check: bool = True) -> "LieAlgebraSpec":
        """Build from the listed brackets, completing them by antisymmetry."""
        basis = list(basis)
        m = len(basis)
        c = [[[Fraction(0)] * m for _ in range(m)] for _ in range(m)]
        for (a, b), val in brackets.items():
            i, j = basis.index(a), basis.index(b)
            for name, q in val.items():
                k = basis.index(name)
                c[i][j][k] = Fraction(q)
                c[j][i][k] = -Fraction(q)
        return cls(basis, c, dict(action or {}), check)

    def validate(self, Y: Optional[GradedAlgebraSpec] = None) -> None:
        m, c = self.dim, self.c
        for i in range(m):
            for j in range(m):
                for k in range(m):
                    if c[i][j][k] != -c[j][i][k]:
                        raise LieSpecError(
                            f"antisymmetry fails: c[{self.basis[i]}][{self.basis[j]}][{self.basis[k]}] = {c[i][j][k]}",
                            (self.basis[i], self.basis[j], self.basis[k]))
        for i in range(m):
            for j in range(m):
                for k in range(m):
                    for l in range(m):
                        s = sum(c[j][k][p] * c[i][p][l] + c[k][i][p] * c[j][p][l] + c[i][j][p] * c[k][p][l]
                                for p in range(m))
                        if s:
                            raise LieSpecError(
                                f"Jacobi fails for ({self.basis[i]}, {self.basis[j]}, {self.basis[k]}): "
                                f"coefficient of {self.basis[l]} is {s}",
                                (self.basis[i], self.basis[j], self.basis[k], self.basis[l]))
        if Y is not None:
            self.check_action(Y)

    def rho(self, ring: Ring, i: int) -> Derivation:
        vals = {}
        for name, v in self.action.get(i, {}).items():
            vals[ring.sym_index("x", ring.gen_index(name))] = ring.embed(v)
        return Derivation(ring, vals, 0)

    def check_action(self, Y: GradedAlgebraSpec) -> None:
        """[rho_i, rho_j] = sum_k c_ij^k rho_k on every generator of Y."""
        ring = Y.ring(0)
        m = self.dim
        rhos = [self.rho(ring, i) for i in range(m)]
        for i in range(m):
            for j in range(m):
                for g in Y.generators:
                    x = ring.x(g.name)
                    lhs = rhos[i](rhos[j](x)) - rhos[j](rhos[i](x))
                    rhs = ring.zero()
                    for k in range(m):
                        if self.c[i][j][k]:
                            rhs = rhs + rhos[k](x).scale(self.c[i][j][k])
                    if lhs != rhs:
                        raise LieSpecError(
                            f"action is not a Lie map: [rho_{self.basis[i]}, rho_{self.basis[j]}]({g.name}) = {lhs!r}, "
                            f"expected {rhs!r}", (self.basis[i], self.basis[j], g.name))


def eps_name(e: str) -> str:
    return f"eps_{e}"


def chevalley_eilenberg(Y: GradedAlgebraSpec, g: LieAlgebraSpec, check: bool = True) -> GradedAlgebraSpec:
    """The stacky CDGA O(Y) (x) Lambda(g^vee) with the CE differential as partial."""
    if any(gen.cochain for gen in Y.generators) or any(v for v in Y.partial.values()):
        raise SpecError("Y must be concentrated in cochain degree 0")
    if check:
        g.validate(Y)
    eps = [Generator(eps_name(e), 0, 1, 0) for e in g.basis]
    gens = list(Y.generators) + eps
    spec0 = GradedAlgebraSpec(gens, {}, {}, Y.max_poly_weight, g.dim, check=False)
    ring = spec0.ring(0)
    E = [ring.x(eps_name(e)) for e in g.basis]
    partial: Dict[str, Element] = {}
    for gen in Y.generators:
        x = ring.x(gen.name)
        v = ring.zero()
        for i in range(g.dim):
            v = v + E[i] * g.rho(ring, i)(x)
        partial[gen.name] = v
    for k, e in enumerate(g.basis):
        v = ring.zero()
        for i in range(g.dim):
            for j in range(g.dim):
                if g.c[i][j][k]:
                    v = v + (E[i] * E[j]).scale(-Fraction(g.c[i][j][k], 2))
        partial[eps_name(e)] = v
    delta = {k: ring.embed(v) for k, v in Y.delta.items()}
    return GradedAlgebraSpec(gens, delta, partial, Y.max_poly_weight, g.dim, check=check)


# ---------------------------------------------------------------------------

@dataclass
class TotView:
    """Bigraded monomials regrouped by total degree chain - cochain, with differential partial + delta."""

    spec: GradedAlgebraSpec
    pieces: Dict[int, List[Element]]

    def differential(self, e: Element) -> Element:
        return self.spec.differential(e.ring)(e)

    def squares_to_zero(self) -> bool:
        return all(not self.differential(self.differential(e)) for es in self.pieces.values() for e in es)


def bidegree(e: Element) -> Tuple[int, int]:
    b = e.bidegrees()
    if len(b) != 1:
        raise GradedError(f"element is not bihomogeneous: {sorted(b)}")
    return next(iter(b))


def tot_hat(spec: GradedAlgebraSpec, elements: Sequence[Element], bound: Optional[int] = None) -> TotView:
    """Regroup bihomogeneous elements by total degree; cochain degrees must stay in [0, bound]."""
    N = spec.cochain_bound if bound is None else bound
    if N is None:
        raise GradedError("totalisation needs a cochain-degree bound")
    pieces: Dict[int, List[Element]] = {}
    for e in elements:
        ch, co = bidegree(e)
        if co < 0 or co > N:
            raise GradedError(f"cochain degree {co} outside [0, {N}]")
        pieces.setdefault(ch - co, []).append(e)
    return TotView(spec, pieces)


def ce_monomials(spec: GradedAlgebraSpec, max_coeff_weight: Optional[int] = None) -> List[Element]:
    """All monomials in the x symbols with coefficient polyweight <= K."""
    ring = spec.ring(0)
    K = spec.max_poly_weight if max_coeff_weight is None else max_coeff_weight
    out = []
    for k in range(K + 1):
        out.extend(ring.monomial_element(m) for m in coefficient_monomials(ring, k))
    return out


# ---------------------------------------------------------------------------

@dataclass
class StackyPolyvectors:
    """Polyvector calculus on a stacky CDGA; the MC equation uses the total differential."""

    spec: GradedAlgebraSpec
    n: int
    W: int

    @property
    def ring(self) -> Ring:
        return self.spec.ring(self.n)

    def bracket(self, a: Element, b: Element) -> Element:
        return schouten(a, b, self.W)

    def kappa(self, pi: Element) -> Element:
        return mc_defect(self.spec, pi, self.W)

    def sigma(self, pi: Element) -> Element:
        return sigma(pi, self.W).direction

    def basis(self, weight: int, degree: Optional[int], max_coeff_weight: Optional[int] = None) -> List[Monomial]:
        K = self.spec.max_poly_weight if max_coeff_weight is None else max_coeff_weight
        return enumerate_basis(self.ring, "pv", weight, degree, K)

    def closed_part(self, weight: int, degree: int) -> List[Element]:
        """Kernel of [delta_hat, -] on the given weight and degree (the cocycles z^degree(gr^weight))."""
        ring = self.ring
        B = self.basis(weight, degree)
        check_cap(len(B))
        dh = self.spec.delta_hat(ring)
        return _kernel(ring, B, [schouten(dh, ring.monomial_element(m)) for m in B])


def stacky_polyvectors(A: GradedAlgebraSpec, n: int, W: int) -> StackyPolyvectors:
    return StackyPolyvectors(A, n, W)


def _kernel(ring: Ring, basis: List[Monomial], images: List[Element]) -> List[Element]:
    """Basis of the kernel of the linear map basis[j] -> images[j]."""
    out = []
    for v in _kernel_vectors([img.terms for img in images]):
        e = ring.zero()
        for j, c in v.items():
            e = e + ring.monomial_element(basis[j], c)
        out.append(e)
    return out


# ---------------------------------------------------------------------------
# 2-shifted Poisson structures on [Y/g]

@dataclass
class CasimirResult:
    dimension: int
    basis: List[Element]                      # weight-2 polyvectors in pv_eps
    tensors: List[Dict[Tuple[int, int], Element]]
    mc_dimension: Optional[int] = None
    mc_basis: List[Element] = field(default_factory=list)
    agree: Optional[bool] = None


def _sym_keys(m: int) -> List[Tuple[int, int]]:
    return [(j, k) for j in range(m) for k in range(j, m)]


def tensor_to_polyvector(ring: Ring, g: LieAlgebraSpec, T: Dict[Tuple[int, int], Element]) -> Element:
    """sum_{j,k} T^{jk} pv_eps_j pv_eps_k for the symmetric tensor with upper entries T[(j, k)], j <= k."""
    out = ring.zero()
    for (j, k), f in T.items():
        term = ring.embed(f) * ring.pv(eps_name(g.basis[j])) * ring.pv(eps_name(g.basis[k]))
        out = out + (term if j == k else term.scale(2))
    return out


def shifted_poisson_bg(Y: GradedAlgebraSpec, g: LieAlgebraSpec, n: int = 2, W: int = 3) -> CasimirResult:
    """Basis of P([Y/g], 2): g-invariant T in S^2 g (x) O(Y) with sum_i T^{ij} rho_i(a) = 0.

    Solved directly on symmetric tensors and cross-checked against the cocycles of
    weight 2 and degree 4 in the stacky polyvector complex.
    """
    if n != 2:
        raise GradedError("the closed-form description needs n = 2")
    m = g.dim
    yring = Y.ring(0)
    coeffs = [mm for mm in ce_monomials(Y) if mm.degrees() == {0}]
    keys = _sym_keys(m)
    unknowns = [(jk, f) for jk in keys for f in coeffs]
    check_cap(len(unknowns))
    rhos = [g.rho(yring, i) for i in range(m)]

    def full(T, a, b):
        return T.get((min(a, b), max(a, b)))

    columns = []
    for (jk, f) in unknowns:
        T = {jk: f}
        col: Dict = {}

        def put(key, e: Element):
            for mono, c in e.terms.items():
                kk = key + (mono,)
                col[kk] = col.get(kk, 0) + c

        # invariance: (e_i . T)^{ab} = sum_p c_ip^a T^{pb} + c_ip^b T^{ap} + rho_i(T^{ab})
        for i in range(m):
            for (a, b) in keys:
                e = yring.zero()
                for p in range(m):
                    t = full(T, p, b)
                    if t is not None and g.c[i][p][a]:
                        e = e + t.scale(g.c[i][p][a])
                    t = full(T, a, p)
                    if t is not None and g.c[i][p][b]:
                        e = e + t.scale(g.c[i][p][b])
                t = full(T, a, b)
                if t is not None:
                    e = e + rhos[i](t)
                put((0, i, a, b), e)
        # anchor: sum_i T^{ij} rho_i(x) = 0
        for xg in range(yring.ngens):
            x = yring.sym(xg)
            for j in range(m):
                e = yring.zero()
                for i in range(m):
                    t = full(T, i, j)
                    if t is not None:
                        e = e + t * rhos[i](x)
                put((1, xg, j, 0), e)
        columns.append({k: v for k, v in col.items() if v})
    basis_vecs = _kernel_vectors(columns)
    tensors = []
    for v in basis_vecs:
        T: Dict[Tuple[int, int], Element] = {}
        for idx, c in v.items():
            jk, f = unknowns[idx]
            T[jk] = T.get(jk, yring.zero()) + f.scale(c)
        tensors.append({k: e for k, e in T.items() if e})
    A = chevalley_eilenberg(Y, g)
    ring = A.ring(n)
    polys = [tensor_to_polyvector(ring, g, T) for T in tensors]
    res = CasimirResult(len(polys), polys, tensors)
    if Y.generators:
        return res
    # Y = point: weight-2 degree-4 polyvectors are exactly S^2 g
    engine = stacky_polyvectors(A, n, W)
    mc = engine.closed_part(2, n + 2)
    res.mc_dimension = len(mc)
    res.mc_basis = mc
    res.agree = _same_span(polys, mc)
    return res


def _kernel_vectors(columns: List[Dict]) -> List[Dict[int, Fraction]]:
    E = Echelon()
    out = []
    for j, col in enumerate(columns):
        r, combo = E.reduce(col)
        if not r:
            v = {j: Fraction(1)}
            for jj, c in combo.items():
                v[jj] = v.get(jj, 0) - c
            out.append({k: c for k, c in v.items() if c})
        else:
            E.add(col)
        E.ncols = j + 1
    return out


def _same_span(a: List[Element], b: List[Element]) -> bool:
    if len(a) != len(b):
        return False
    E = Echelon()
    for e in a:
        E.add(e.terms)
    if E.rank != len(a):
        return False
    return all(not E.reduce(e.terms)[0] for e in b)


def degree_bound_holds(A: GradedAlgebraSpec, n: int, max_weight: int) -> bool:
    """F^i Pol[n+1] lives in shifted degrees >= 2i - 3, checked monomial by monomial."""
    ring = A.ring(n)
    for i in range(max_weight + 1):
        for m in enumerate_basis(ring, "pv", i, None, A.max_poly_weight):
            if ring.mono_info(m)[2] - (n + 1) < 2 * i - 3:
                return False
    return True
