"""Symmetry PDE generators: invariance systems, quaternionic and
c-projective systems, and the Obata connection."""

import pytest

from geosym import geometry as G
from geosym import prolong as P
from geosym import symsys as S
from geosym.exprfield import Chart, parse_expr

from conftest import standard_triple


def test_invariance_system_counts(flat2):
    chart, g = flat2
    ks = S.invariance_system(g)
    # one first-order equation per independent symmetric pair
    assert len(ks) == 3 or len(ks) == 4  # zero components may drop out
    ok, _ = P.verify_solution(ks, [chart.one(), chart.zero()])
    assert ok


def test_flat_quaternionic_bound_is_maximal(flat4):
    chart, g = flat4
    I, J, K = standard_triple(chart)
    qs = S.quaternionic_symmetry_system([I, J, K], g)
    res = P.solution_bound(qs, max_stage=6)
    assert res.conclusive
    assert res.bound == 15


def test_flat_cprojective_bound(flat4):
    chart, g = flat4
    I, _, _ = standard_triple(chart)
    cs = S.cprojective_symmetry_system(I, G.Connection(chart, {}))
    res = P.solution_bound(cs, max_stage=6)
    assert res.conclusive
    assert res.bound == 16


def test_quaternionic_system_rejects_bad_frame(flat4):
    chart, g = flat4
    I, J, K = standard_triple(chart)
    with pytest.raises(S.SymSysError):
        S.quaternionic_symmetry_system([I, I, I], g)


def test_cprojective_system_preconditions(flat4):
    chart, g = flat4
    I, _, _ = standard_triple(chart)
    torsion = G.Connection(chart, {(0, 0, 1): chart.one()})
    with pytest.raises(S.SymSysError):
        S.cprojective_symmetry_system(I, torsion)


def test_obata_flat_triple_gives_flat_connection(flat4):
    chart, g = flat4
    I, J, K = standard_triple(chart)
    D = S.obata_solve(I, J, K)
    assert not D.gamma
    for A in (I, J, K):
        assert G.covariant_derivative(D, A).is_zero()


def test_obata_requires_hypercomplex(flat4):
    chart, g = flat4
    I, J, K = standard_triple(chart)
    with pytest.raises(S.SymSysError):
        S.obata_solve(I, J, J)


def test_lie_derivative_jet_matches_direct_computation(flat2):
    chart, g = flat2
    # the jet-linear form of L_X g evaluated on a concrete field equals
    # the geometric Lie derivative
    X = G.vector(chart, [parse_expr(chart, "x*y"), parse_expr(chart, "y^2")])
    jets = S.lie_derivative_jet(g)
    L = G.lie_derivative(g, X)
    for idx, coeff_map in jets.items():
        total = chart.zero()
        for (a, alpha), c in coeff_map.items():
            term = X.comp(a)
            for i, k in enumerate(alpha):
                for _ in range(k):
                    term = term.differentiate(chart.coordinates[i])
            total = total + c * term
        assert (total - L.comp(*idx)).is_zero()


def test_translations_solve_every_flat_system(flat4):
    chart, g = flat4
    I, J, K = standard_triple(chart)
    qs = S.quaternionic_symmetry_system([I, J, K], g)
    cs = S.cprojective_symmetry_system(I, G.Connection(chart, {}))
    for i in range(4):
        comps = [chart.one() if j == i else chart.zero() for j in range(4)]
        for system in (qs, cs):
            ok, _ = P.verify_solution(system, comps)
            assert ok


def test_rotation_in_quaternionic_but_scaling_too(flat4):
    chart, g = flat4
    I, J, K = standard_triple(chart)
    qs = S.quaternionic_symmetry_system([I, J, K], g)
    # the Euler field is a quaternionic symmetry (not an isometry)
    euler = [parse_expr(chart, c) for c in ("x0", "x1", "x2", "x3")]
    ok, _ = P.verify_solution(qs, euler)
    assert ok
    ks = S.invariance_system(g)
    ok, _ = P.verify_solution(ks, euler)
    assert not ok
