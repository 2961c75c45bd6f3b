"""Exact linear algebra helpers."""

from fractions import Fraction

from hypothesis import given, settings, strategies as st

from geosym import _linalg


frac = st.integers(-6, 6).map(Fraction)
matrix = st.integers(1, 4).flatmap(
    lambda n: st.lists(
        st.lists(frac, min_size=n, max_size=n), min_size=1, max_size=5))


@settings(max_examples=50, deadline=None)
@given(m=matrix)
def test_rank_nullity(m):
    ncols = len(m[0])
    assert _linalg.rank(m) + len(_linalg.nullspace(m, ncols)) == ncols


@settings(max_examples=50, deadline=None)
@given(m=matrix)
def test_nullspace_vectors_annihilate(m):
    ncols = len(m[0])
    for v in _linalg.nullspace(m, ncols):
        for row in m:
            assert sum(r * x for r, x in zip(row, v)) == 0


@settings(max_examples=50, deadline=None)
@given(m=matrix, data=st.data())
def test_solve_roundtrip(m, data):
    ncols = len(m[0])
    x = data.draw(st.lists(frac, min_size=ncols, max_size=ncols))
    rhs = [sum(r * v for r, v in zip(row, x)) for row in m]
    sol = _linalg.solve(m, rhs)
    assert sol is not None
    for row, b in zip(m, rhs):
        assert sum(r * v for r, v in zip(row, sol)) == b


def test_solve_inconsistent():
    assert _linalg.solve([[1, 1], [1, 1]], [1, 2]) is None


@settings(max_examples=50, deadline=None)
@given(m=matrix)
def test_independent_rows_have_full_rank(m):
    idx = _linalg.independent_rows(m)
    sub = [m[i] for i in idx]
    assert _linalg.rank(sub) == len(sub) == _linalg.rank(m)


def test_rref_idempotent():
    m = [[Fraction(2), Fraction(4)], [Fraction(1), Fraction(3)]]
    red, pivots = _linalg.rref(m)
    red2, pivots2 = _linalg.rref(red)
    assert red == red2 and pivots == pivots2
