from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from workbench import linalg
from workbench.linalg import BasisCapExceeded, Echelon, apply_functional, check_cap, combine, invert_matrix, rank

vectors = st.dictionaries(st.integers(0, 4), st.integers(-3, 3).map(Fraction), max_size=4).map(
    lambda d: {k: v for k, v in d.items() if v})


def test_solve_and_certificate():
    cols = [{0: Fraction(1), 1: Fraction(1)}, {1: Fraction(1), 2: Fraction(1)}]
    sol, cert = linalg.solve(cols, {0: Fraction(1), 2: Fraction(-1)})
    assert cert is None and combine(cols, sol) == {0: 1, 2: -1}
    sol, cert = linalg.solve(cols, {0: Fraction(1)})
    assert sol is None
    assert all(apply_functional(cert, c) == 0 for c in cols) and apply_functional(cert, {0: Fraction(1)}) != 0


@settings(max_examples=80, deadline=None)
@given(st.lists(vectors, max_size=5), vectors)
def test_solve_is_sound(cols, rhs):
    sol, cert = linalg.solve(cols, rhs)
    if sol is not None:
        got = {k: v for k, v in combine(cols, sol).items() if v}
        assert got == rhs
    else:
        assert all(apply_functional(cert, c) == 0 for c in cols) and apply_functional(cert, rhs) != 0


@settings(max_examples=50, deadline=None)
@given(st.lists(vectors, max_size=5))
def test_rank_bounded_and_order_free(cols):
    assert rank(cols) <= min(len(cols), 5)
    assert rank(cols) == rank(list(reversed(cols)))


def test_invert_matrix():
    M = [[Fraction(2), Fraction(1)], [Fraction(1), Fraction(1)]]
    inv = invert_matrix(M)
    assert inv == [[1, -1], [-1, 2]]
    assert invert_matrix([[Fraction(1), Fraction(2)], [Fraction(2), Fraction(4)]]) is None


def test_cap(monkeypatch):
    monkeypatch.setenv("WORKBENCH_BASIS_CAP", "5")
    check_cap(5)
    with pytest.raises(BasisCapExceeded):
        check_cap(6)


def test_echelon_incremental():
    E = Echelon()
    assert E.add({0: Fraction(1)}) and not E.add({0: Fraction(3)})
    assert E.rank == 1
