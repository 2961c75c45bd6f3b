"""Prolongation-projection engine: symbol tables, bounds, and solution
verification."""

import random
from fractions import Fraction

import pytest

from geosym import geometry as G
from geosym import prolong as P
from geosym import symsys as S
from geosym.exprfield import Chart, parse_expr


def _monotone_tables(tables):
    """dim g_k never increases from one stage to the next (aligned by
    jet order, counted from the low end of each table)."""
    for prev, cur in zip(tables, tables[1:]):
        for k in range(len(prev.dims)):
            assert cur.dim(k) <= prev.dim(k) if k <= cur.top_order else True


def test_prolong_adds_first_derivatives():
    chart = Chart(["x", "y"])
    sys1 = P.LinearPDESystem.from_coefficient_maps(
        chart, 2, [{(0, (1, 0)): chart.one()}])
    sys2 = P.prolong(sys1)
    assert sorted(e.order for e in sys2.equations) == [1, 2, 2]


def test_symbol_dimensions_trivial():
    chart = Chart(["x", "y"])
    # u_x = 0 for a single scalar unknown: g_1 loses one of two slots
    system = P.LinearPDESystem.from_coefficient_maps(
        chart, 1, [{(0, (1, 0)): chart.one()}])
    pt = P.GenericPoint.sample(chart, 17)
    table = P.symbol_dimensions(system, pt)
    assert table.dims == (1, 1)  # (dim g_1, dim g_0)


def test_flat_killing_bound(flat2):
    chart, g = flat2
    res = P.solution_bound(S.invariance_system(g))
    assert res.conclusive
    assert res.bound == 3
    _monotone_tables(res.tables)


def test_sphere_killing_bound(sphere):
    chart, g = sphere
    res = P.solution_bound(S.invariance_system(g))
    assert res.conclusive
    assert res.bound == 3
    assert res.point_independent
    _monotone_tables(res.tables)


def test_point_independence_uses_at_least_three_points(flat2):
    chart, g = flat2
    res = P.solution_bound(S.invariance_system(g))
    assert len(res.points) >= 3
    assert res.point_independent


def test_bound_changes_with_metric():
    # a generic non-symmetric metric admits no Killing fields
    chart = Chart(["x", "y"])
    g = G.TensorField(chart, ("d", "d"), {
        (0, 0): parse_expr(chart, "1 + x^2 + y^4"),
        (1, 1): parse_expr(chart, "1 + x^4 + x*y^2"),
    })
    res = P.solution_bound(S.invariance_system(g))
    assert res.conclusive
    # strictly below the maximal value 3 attained by constant-curvature
    # metrics; the bound is an upper estimate, not the exact dimension
    assert res.bound < 3


def test_inconclusive_when_capped(flat2):
    chart, g = flat2
    res = P.solution_bound(S.invariance_system(g), max_stage=1)
    assert not res.conclusive
    assert res.bound is None


def test_max_stage_validation(flat2):
    chart, g = flat2
    with pytest.raises(P.ProlongError):
        P.solution_bound(S.invariance_system(g), max_stage=0)


def test_verify_solution(flat2):
    chart, g = flat2
    ks = S.invariance_system(g)
    ok, residuals = P.verify_solution(
        ks, [parse_expr(chart, "-y"), parse_expr(chart, "x")])
    assert ok
    assert all(r.is_zero() for r in residuals)
    ok, _ = P.verify_solution(ks, [parse_expr(chart, "x"), chart.zero()])
    assert not ok


def test_verify_solution_arity(flat2):
    chart, g = flat2
    ks = S.invariance_system(g)
    with pytest.raises(P.ProlongError):
        P.verify_solution(ks, [chart.one()])


def test_solution_space_dimensions_match_known_algebras(flat4):
    # flat R^4: isometry algebra has dimension 10
    chart, g = flat4
    res = P.solution_bound(S.invariance_system(g))
    assert res.conclusive
    assert res.bound == 10


def test_clear_denominators_preserves_solutions():
    chart = Chart(["x"])
    e = parse_expr(chart, "1/(1 + x^2)")
    system = P.LinearPDESystem.from_coefficient_maps(
        chart, 1, [{(0, (1,)): e, (0, (0,)): e * parse_expr(chart, "-1")}])
    # u' = u has solutions; the cleared system must keep u = e^x jets free
    res = P.solution_bound(system)
    assert res.conclusive
    assert res.bound == 1
    ok, _ = P.verify_solution(system, [chart.zero()])
    assert ok


def test_tables_deterministic_for_seed(sphere):
    chart, g = sphere
    r1 = P.solution_bound(S.invariance_system(g), seeds=(7, 8, 9))
    r2 = P.solution_bound(S.invariance_system(g), seeds=(7, 8, 9))
    assert [t.dims for t in r1.tables] == [t.dims for t in r2.tables]
    assert r1.bound == r2.bound
