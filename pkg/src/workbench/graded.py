"""Exact sparse arithmetic in free graded-commutative algebras over Q.

Sign convention (the only one used anywhere in the package): every symbol
carries a single parity and a product of monomials picks up ``(-1)`` for
each pair of odd symbols that has to be transposed to reach the global
symbol order.  The parities are

* ``x_a``  : total degree ``t_a = chain_a - cochain_a``
* ``dx_a`` : ``t_a + 1`` (form degree counts)
* ``pv_a`` : ``n + 1 + t_a`` (the dual of ``dx_a`` shifted by ``n + 1``)

so the parity of any monomial equals its cochain degree mod 2, whether it is
read as a de Rham form or as a polyvector.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple

Monomial = Tuple[int, ...]

KINDS = ("x", "dx", "pv")
PREFIX = {"x": "", "dx": "dx_", "pv": "pv_"}


class GradedError(ValueError):
    """Raised on malformed algebraic input (unknown names, bad degrees)."""


@dataclass(frozen=True)
class Generator:
    name: str
    chain: int = 0
    cochain: int = 0
    weight: int = 1

    @property
    def degree(self) -> int:
        # homological total degree; parity of x_a
        return self.chain - self.cochain


@dataclass(frozen=True)
class Symbol:
    name: str
    kind: str
    gen: int
    parity: int
    degree: int  # cochain degree (DR degree for x/dx, Pol degree for x/pv)
    chain: int
    cochain: int
    polyweight: int


def to_fraction(q) -> Fraction:
    if isinstance(q, Fraction):
        return q
    return Fraction(q)


@lru_cache(maxsize=None)
def _ring_cached(gens: Tuple[Generator, ...], shift: int) -> "Ring":
    return Ring(gens, shift)


def ring_for(gens: Sequence[Generator], shift: int = 0) -> "Ring":
    return _ring_cached(tuple(gens), shift)


class Ring:
    """Free graded-commutative Q-algebra on x_a, dx_a, pv_a for a fixed shift n.

    Symbol order: all ``x`` in declaration order, then all ``dx``, then all ``pv``.
    """

    def __init__(self, gens: Sequence[Generator], shift: int = 0):
        self.gens = tuple(gens)
        self.shift = shift
        names = [g.name for g in self.gens]
        if len(set(names)) != len(names):
            raise GradedError(f"duplicate generator names in {names}")
        m = len(self.gens)
        self.ngens = m
        syms: List[Symbol] = []
        for kind in KINDS:
            for a, g in enumerate(self.gens):
                t = g.degree
                if kind == "x":
                    par, deg = t, -t
                    bideg = (g.chain, g.cochain)
                    pw = g.weight
                elif kind == "dx":
                    par, deg = t + 1, 1 - t
                    bideg = (g.chain, g.cochain)
                    pw = g.weight
                else:
                    par, deg = shift + 1 + t, shift + 1 + t
                    bideg = (-(g.chain + shift + 1), -g.cochain)
                    pw = -g.weight
                syms.append(Symbol(PREFIX[kind] + g.name, kind, a, par % 2, deg,
                                   bideg[0], bideg[1], pw))
        self.symbols = tuple(syms)
        self.nsym = len(syms)
        self.index = {s.name: i for i, s in enumerate(syms)}
        self.odd = tuple(s.parity for s in syms)
        self._mono_cache: Dict[Monomial, tuple] = {}

    # -- symbol access -------------------------------------------------
    def sym_index(self, kind: str, a: int) -> int:
        return KINDS.index(kind) * self.ngens + a

    def gen_index(self, name: str) -> int:
        for a, g in enumerate(self.gens):
            if g.name == name:
                return a
        raise GradedError(f"unknown generator {name!r}")

    def symbol_range(self, kind: str) -> range:
        k = KINDS.index(kind)
        return range(k * self.ngens, (k + 1) * self.ngens)

    # -- monomial data ---------------------------------------------------
    def mono_info(self, m: Monomial) -> tuple:
        """(odd bitmask, parity, degree, pv count, dx count, coefficient polyweight, polyweight)."""
        info = self._mono_cache.get(m)
        if info is None:
            mask = 0
            par = deg = npv = ndx = cpw = pw = 0
            for i, e in enumerate(m):
                if not e:
                    continue
                s = self.symbols[i]
                if s.parity:
                    mask |= 1 << i
                par += e * s.parity
                deg += e * s.degree
                pw += e * s.polyweight
                if s.kind == "pv":
                    npv += e
                elif s.kind == "dx":
                    ndx += e
                else:
                    cpw += e * s.polyweight
            info = (mask, par % 2, deg, npv, ndx, cpw, pw)
            self._mono_cache[m] = info
        return info

    def unit_mono(self) -> Monomial:
        return (0,) * self.nsym

    def mono_mul(self, m1: Monomial, m2: Monomial) -> Tuple[int, Optional[Monomial]]:
        """Product of normal-form monomials: (sign, monomial) or (0, None)."""
        a = self.mono_info(m1)[0]
        b = self.mono_info(m2)[0]
        if a & b:
            return 0, None
        sign = 1
        if a and b:
            # pairs (i in m1, j in m2) with j < i must be swapped
            cnt = 0
            bb = b
            while bb:
                low = bb & -bb
                j = low.bit_length() - 1
                cnt += bin(a >> (j + 1)).count("1")
                bb ^= low
            if cnt & 1:
                sign = -1
        return sign, tuple(x + y for x, y in zip(m1, m2))

    # -- elements ----------------------------------------------------------
    def zero(self) -> "Element":
        return Element(self, {})

    def one(self) -> "Element":
        return Element(self, {self.unit_mono(): Fraction(1)})

    def const(self, q) -> "Element":
        q = to_fraction(q)
        return Element(self, {self.unit_mono(): q} if q else {})

    def sym(self, i: int) -> "Element":
        m = [0] * self.nsym
        m[i] = 1
        return Element(self, {tuple(m): Fraction(1)})

    def var(self, name: str) -> "Element":
        try:
            return self.sym(self.index[name])
        except KeyError:
            raise GradedError(f"unknown symbol {name!r}") from None

    def x(self, name: str) -> "Element":
        return self.sym(self.sym_index("x", self.gen_index(name)))

    def dx(self, name: str) -> "Element":
        return self.sym(self.sym_index("dx", self.gen_index(name)))

    def pv(self, name: str) -> "Element":
        return self.sym(self.sym_index("pv", self.gen_index(name)))

    def normalize(self, factors: Iterable, coeff=1) -> "Element":
        """Product of an ordered list of symbol names/indices, in normal form.

        An odd symbol appearing twice gives the zero element.
        """
        out = self.const(coeff)
        for f in factors:
            i = self.index[f] if isinstance(f, str) else f
            if isinstance(f, str) and f not in self.index:
                raise GradedError(f"unknown symbol {f!r}")
            out = out * self.sym(i)
        return out

    def monomial_element(self, m: Monomial, c=1) -> "Element":
        return Element(self, {m: to_fraction(c)})

    def embed(self, e: "Element") -> "Element":
        """Transport an element of another ring into this one by symbol name."""
        if e.ring is self:
            return e
        out: Dict[Monomial, Fraction] = {}
        for m, c in e.terms.items():
            new = [0] * self.nsym
            for i, k in enumerate(m):
                if k:
                    name = e.ring.symbols[i].name
                    if name not in self.index:
                        raise GradedError(f"symbol {name!r} missing in target ring")
                    new[self.index[name]] = k
            out[tuple(new)] = c
        return Element(self, out)

    def __repr__(self) -> str:
        return f"Ring({[g.name for g in self.gens]}, n={self.shift})"


class Element:
    """Sparse Q-linear combination of normal-form monomials.  Treated as immutable."""

    __slots__ = ("ring", "terms")

    def __init__(self, ring: Ring, terms: Optional[Mapping[Monomial, Fraction]] = None):
        self.ring = ring
        self.terms: Dict[Monomial, Fraction] = dict(terms) if terms else {}

    # arithmetic
    def _coerce(self, other) -> "Element":
        if isinstance(other, Element):
            if other.ring is not self.ring:
                raise GradedError("elements from different rings")
            return other
        return self.ring.const(other)

    def __add__(self, other):
        other = self._coerce(other)
        out = dict(self.terms)
        for m, c in other.terms.items():
            v = out.get(m, 0) + c
            if v:
                out[m] = v
            else:
                out.pop(m, None)
        return Element(self.ring, out)

    __radd__ = __add__

    def __neg__(self):
        return Element(self.ring, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def scale(self, q) -> "Element":
        q = to_fraction(q)
        if not q:
            return self.ring.zero()
        return Element(self.ring, {m: c * q for m, c in self.terms.items()})

    def __mul__(self, other):
        if not isinstance(other, Element):
            return self.scale(other)
        other = self._coerce(other)
        ring = self.ring
        out: Dict[Monomial, Fraction] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                s, m = ring.mono_mul(m1, m2)
                if not s:
                    continue
                v = out.get(m, 0) + (c1 * c2 if s > 0 else -c1 * c2)
                if v:
                    out[m] = v
                else:
                    out.pop(m, None)
        return Element(ring, out)

    def __rmul__(self, other):
        return self.scale(other)

    def __pow__(self, k: int):
        out = self.ring.one()
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        if isinstance(other, Element):
            return self.ring is other.ring and self.terms == other.terms
        if other == 0:
            return not self.terms
        return NotImplemented

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __bool__(self):
        return bool(self.terms)

    def __iter__(self) -> Iterator[Tuple[Monomial, Fraction]]:
        return iter(sorted(self.terms.items(), key=lambda t: mono_key(t[0])))

    def is_zero(self) -> bool:
        return not self.terms

    # grading data
    def degrees(self) -> set:
        return {self.ring.mono_info(m)[2] for m in self.terms}

    def degree(self) -> Optional[int]:
        """Cochain degree if homogeneous, else None (zero counts as homogeneous of any degree)."""
        ds = self.degrees()
        if len(ds) == 1:
            return next(iter(ds))
        return None

    def parity(self) -> Optional[int]:
        ps = {self.ring.mono_info(m)[1] for m in self.terms}
        if len(ps) == 1:
            return next(iter(ps))
        return None

    def weights(self) -> set:
        """Polyvector weights (number of pv factors) occurring."""
        return {self.ring.mono_info(m)[3] for m in self.terms}

    def form_degrees(self) -> set:
        return {self.ring.mono_info(m)[4] for m in self.terms}

    def bidegrees(self) -> set:
        ring = self.ring
        out = set()
        for m in self.terms:
            ch = co = 0
            for i, e in enumerate(m):
                if e:
                    ch += e * ring.symbols[i].chain
                    co += e * ring.symbols[i].cochain
            out.add((ch, co))
        return out

    def polyweights(self) -> set:
        return {self.ring.mono_info(m)[6] for m in self.terms}

    def weight_part(self, w: int) -> "Element":
        ring = self.ring
        return Element(ring, {m: c for m, c in self.terms.items() if ring.mono_info(m)[3] == w})

    def form_part(self, p: int) -> "Element":
        ring = self.ring
        return Element(ring, {m: c for m, c in self.terms.items() if ring.mono_info(m)[4] == p})

    def truncate(self, W: int) -> "Element":
        """Drop everything of polyvector weight >= W and form degree >= W."""
        ring = self.ring
        return Element(ring, {m: c for m, c in self.terms.items()
                              if ring.mono_info(m)[3] < W and ring.mono_info(m)[4] < W})

    def __repr__(self) -> str:
        from .document import format_element

        return format_element(self)


def mono_key(m: Monomial) -> tuple:
    """Deterministic ordering of monomials: by total exponent, then reversed exponents."""
    return (sum(m), tuple(-e for e in m))


def mono_factors(m: Monomial) -> List[int]:
    """Symbol indices of a normal-form monomial, repeated per exponent."""
    out: List[int] = []
    for i, e in enumerate(m):
        out.extend([i] * e)
    return out


# ---------------------------------------------------------------------------
# derivations

@dataclass
class Derivation:
    """Graded derivation given by its values on symbols.

    Symbols missing from ``values`` are mapped to zero when ``strict`` is
    False; with ``strict`` a missing value is an error.
    """

    ring: Ring
    values: Dict[int, Element]
    parity: int
    strict: bool = False

    def __call__(self, a: Element) -> Element:
        return apply_derivation(self, a)


def apply_derivation(D: Derivation, a: Element, side: str = "left") -> Element:
    """Leibniz extension of ``D`` acting from the left (default) or from the right.

    Left:  D(uv) = D(u) v + (-1)^{|D||u|} u D(v)
    Right: (uv)D = u (v)D + (-1)^{|D||v|} (u)D v
    """
    ring = D.ring
    if a.ring is not ring:
        raise GradedError("derivation applied to element of another ring")
    out = ring.zero()
    acc: Dict[Monomial, Fraction] = {}
    for m, c in a.terms.items():
        for i, e in enumerate(m):
            if not e:
                continue
            val = D.values.get(i)
            if val is None:
                if D.strict:
                    raise GradedError(f"derivation has no value on {ring.symbols[i].name}")
                continue
            if not val.terms:
                continue
            before = list(m[:i]) + [0] * (ring.nsym - i)
            after = [0] * (i + 1) + list(m[i + 1:])
            reduced = [0] * ring.nsym
            reduced[i] = e - 1
            before_m, after_m, red_m = tuple(before), tuple(after), tuple(reduced)
            # sign of passing D across the factors it has to skip
            if side == "left":
                skip = ring.mono_info(before_m)[1] + (e - 1) * ring.odd[i]
            else:
                skip = ring.mono_info(after_m)[1] + (e - 1) * ring.odd[i]
            sign = -1 if (D.parity * skip) % 2 else 1
            coef = c * e * sign
            core = ring.monomial_element(red_m)
            if side == "left":
                piece = ring.monomial_element(before_m) * (core * val) * ring.monomial_element(after_m)
            else:
                piece = ring.monomial_element(before_m) * (val * core) * ring.monomial_element(after_m)
            # symbol i is placed adjacent to copies of itself: for even symbols the
            # order is irrelevant, odd ones have e == 1
            for mm, cc in piece.terms.items():
                v = acc.get(mm, 0) + coef * cc
                if v:
                    acc[mm] = v
                else:
                    acc.pop(mm, None)
    out = Element(ring, acc)
    return out


def partial(ring: Ring, i: int, a: Element, side: str = "left") -> Element:
    """Left or right partial derivative with respect to symbol ``i``."""
    D = Derivation(ring, {i: ring.one()}, ring.odd[i])
    return apply_derivation(D, a, side)


def koszul_sign_bruteforce(ring: Ring, factors: Sequence[int]) -> int:
    """Sign of sorting a factor list by bubble sort, counting odd/odd swaps.

    Returns 0 when an odd symbol repeats.  Written independently of
    :meth:`Ring.mono_mul` and used as its test oracle.
    """
    seq = list(factors)
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] == seq[j] and ring.odd[seq[i]]:
                return 0
    sign = 1
    n = len(seq)
    for i in range(n):
        for j in range(n - 1 - i):
            if seq[j] > seq[j + 1]:
                if ring.odd[seq[j]] and ring.odd[seq[j + 1]]:
                    sign = -sign
                seq[j], seq[j + 1] = seq[j + 1], seq[j]
    return sign
