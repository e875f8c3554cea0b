"""Seeded random homogeneous elements for property checks and demo documents."""

from __future__ import annotations

import random
from typing import Optional

from .algebra import enumerate_basis
from .graded import Element, Ring


def random_element(ring: Ring, rng: random.Random, kind: str, count: int, degree: Optional[int],
                   max_coeff_weight: int, terms: int = 3, bound: int = 3) -> Element:
    """Sum of up to ``terms`` basis monomials with nonzero integer coefficients in [-bound, bound]."""
    basis = enumerate_basis(ring, kind, count, degree, max_coeff_weight)
    out = ring.zero()
    if not basis:
        return out
    for m in rng.sample(basis, min(terms, len(basis))):
        c = rng.choice([k for k in range(-bound, bound + 1) if k])
        out = out + ring.monomial_element(m, c)
    return out


def random_filtered(ring: Ring, rng: random.Random, kind: str, degree: int, W: int,
                    max_coeff_weight: int, terms: int = 2) -> Element:
    """Homogeneous element of the given degree with components of weight 2 .. W-1."""
    out = ring.zero()
    for w in range(2, W):
        out = out + random_element(ring, rng, kind, w, degree, max_coeff_weight, terms)
    return out


def random_pair(spec, n: int, W: int, seed: int):
    """A (omega, pi) pair of degree n+2, neither required to be closed or MC."""
    rng = random.Random(seed)
    ring = spec.ring(n)
    K = spec.max_poly_weight
    return (random_filtered(ring, rng, "dx", n + 2, W, K), random_filtered(ring, rng, "pv", n + 2, W, K))
