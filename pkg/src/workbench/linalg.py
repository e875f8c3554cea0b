"""Exact sparse linear algebra over Q.

Vectors are dicts ``{row_key: Fraction}`` with arbitrary sortable keys.
Elimination keeps a reduced row echelon basis of the column span and
records how each basis vector is built from the input columns, so the same
pass yields ranks, solutions and non-membership certificates.

Pivot rule: columns are processed in the order given; within a column the
pivot is the smallest row key (row keys must be mutually comparable).
Columns that reduce to zero are free and receive coefficient zero in
every solution.
"""

from __future__ import annotations

import os
from fractions import Fraction
from typing import Dict, Hashable, List, Optional, Sequence, Tuple

Vector = Dict[Hashable, Fraction]

DEFAULT_BASIS_CAP = 20000


class BasisCapExceeded(RuntimeError):
    """A linear problem is larger than the configured basis-size cap."""


def basis_cap() -> int:
    return int(os.environ.get("WORKBENCH_BASIS_CAP", DEFAULT_BASIS_CAP))


def check_cap(n: int, what: str = "basis") -> None:
    cap = basis_cap()
    if n > cap:
        raise BasisCapExceeded(f"{what} of size {n} exceeds cap {cap} (WORKBENCH_BASIS_CAP)")


def _axpy(y: Vector, a: Fraction, x: Vector) -> None:
    """y += a * x in place."""
    for k, v in x.items():
        nv = y.get(k, 0) + a * v
        if nv:
            y[k] = nv
        else:
            y.pop(k, None)


class Echelon:
    """Incremental reduced row-echelon basis of a span of sparse columns."""

    def __init__(self):
        self.pivots: List[Hashable] = []
        self.vectors: Dict[Hashable, Vector] = {}   # pivot -> vector with 1 at pivot
        self.combos: Dict[Hashable, Vector] = {}    # pivot -> {column index: coeff}
        self.ncols = 0

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def reduce(self, v: Vector) -> Tuple[Vector, Vector]:
        """Return (residual, combo) with v = residual + sum combo[j] * col_j."""
        r = dict(v)
        combo: Vector = {}
        for p in self.pivots:
            c = r.get(p)
            if c:
                _axpy(r, -c, self.vectors[p])
                _axpy(combo, c, self.combos[p])
        return r, combo

    def add(self, col: Vector) -> bool:
        """Add a column; return True if it increased the rank."""
        j = self.ncols
        self.ncols += 1
        r, combo = self.reduce(col)
        if not r:
            return False
        # r = col - combo.cols  ->  new basis vector built from col_j and combo
        new_combo = {k: -v for k, v in combo.items()}
        new_combo[j] = new_combo.get(j, 0) + Fraction(1)
        p = min(r)
        inv = 1 / r[p]
        r = {k: v * inv for k, v in r.items()}
        new_combo = {k: v * inv for k, v in new_combo.items() if v}
        # eliminate the new pivot from existing vectors
        for q in self.pivots:
            c = self.vectors[q].get(p)
            if c:
                _axpy(self.vectors[q], -c, r)
                _axpy(self.combos[q], -c, new_combo)
        self.pivots.append(p)
        self.vectors[p] = r
        self.combos[p] = new_combo
        return True

    def solve(self, rhs: Vector) -> Tuple[Optional[Vector], Optional[Vector]]:
        """(solution, None) with sum x_j col_j = rhs, or (None, certificate).

        The certificate is a functional y (sparse over row keys) with
        y(col_j) = 0 for every column and y(rhs) = 1.
        """
        r, combo = self.reduce(rhs)
        if not r:
            return combo, None
        rho = min(r)
        scale = 1 / r[rho]
        y: Vector = {rho: scale}
        for p in self.pivots:
            c = self.vectors[p].get(rho)
            if c:
                y[p] = y.get(p, 0) - c * scale
        y = {k: v for k, v in y.items() if v}
        return None, y


def echelon_of(columns: Sequence[Vector]) -> Echelon:
    check_cap(len(columns), "column set")
    E = Echelon()
    for c in columns:
        E.add(c)
    return E


def rank(columns: Sequence[Vector]) -> int:
    return echelon_of(columns).rank


def solve(columns: Sequence[Vector], rhs: Vector):
    """Solve sum x_j col_j = rhs exactly; see :meth:`Echelon.solve`."""
    return echelon_of(columns).solve(rhs)


def apply_functional(y: Vector, v: Vector) -> Fraction:
    return sum((c * v.get(k, 0) for k, c in y.items()), Fraction(0))


def combine(columns: Sequence[Vector], x: Vector) -> Vector:
    out: Vector = {}
    for j, c in x.items():
        _axpy(out, c, columns[j])
    return out


def invert_matrix(M: List[List[Fraction]]) -> Optional[List[List[Fraction]]]:
    """Inverse of a dense square rational matrix, or None if singular."""
    n = len(M)
    A = [[Fraction(v) for v in row] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(M)]
    for col in range(n):
        piv = next((r for r in range(col, n) if A[r][col] != 0), None)
        if piv is None:
            return None
        A[col], A[piv] = A[piv], A[col]
        inv = 1 / A[col][col]
        A[col] = [v * inv for v in A[col]]
        for r in range(n):
            if r != col and A[r][col] != 0:
                f = A[r][col]
                A[r] = [a - f * b for a, b in zip(A[r], A[col])]
    return [row[n:] for row in A]
