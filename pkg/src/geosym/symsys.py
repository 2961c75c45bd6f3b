"""Generators of the linear PDE systems whose solutions are
infinitesimal symmetries of metrics, quaternionic bundles, and
c-projective classes.

Equations are produced directly in jet-coordinate form (coefficients of
X^a_alpha); the substitution route through geometry.lie_derivative is
used by the tests as an independent cross-check.
"""

from __future__ import annotations

import itertools
from typing import Dict, List, Sequence, Tuple

from . import _linalg
from .exprfield import Chart, Expr, ExprError
from .geometry import (Connection, GeometryError, TensorField, covariant_derivative,
                       check_hypercomplex_frame, endo_mul, endo_trace)
from .prolong import Equation, JetKey, LinearPDESystem


class SymSysError(ExprError):
    pass


def _unit(i: int, n: int) -> Tuple[int, ...]:
    e = [0] * n
    e[i] = 1
    return tuple(e)


def lie_derivative_jet(T: TensorField) -> Dict[Tuple[int, ...], Dict[JetKey, Expr]]:
    """Jet-linear coefficient maps of (L_X T)_idx, one per component."""
    chart = T.chart
    n = chart.dim
    zero_a = (0,) * n
    out: Dict[Tuple[int, ...], Dict[JetKey, Expr]] = {}
    for idx in T.indices():
        m_: Dict[JetKey, Expr] = {}

        def add(key: JetKey, c: Expr):
            if c.is_zero(cross_check=False):
                return
            cur = m_.get(key)
            m_[key] = c if cur is None else cur + c

        base = T.comp(*idx)
        for mm in range(n):
            add((mm, zero_a), base.differentiate(chart.coordinates[mm]))
        for p, v in enumerate(T.variance):
            for mm in range(n):
                jdx = list(idx)
                jdx[p] = mm
                t = T.comp(*jdx)
                if t.is_zero(cross_check=False):
                    continue
                if v == "d":
                    # + (d_{idx_p} X^m) T(..m..)
                    add((mm, _unit(idx[p], n)), t)
                else:
                    # - (d_m X^{idx_p}) T(..m..)
                    add((idx[p], _unit(mm, n)), -t)
        out[idx] = m_
    return out


def invariance_system(T: TensorField) -> LinearPDESystem:
    """L_X T = 0 componentwise; first order in X."""
    chart = T.chart
    maps = list(lie_derivative_jet(T).values())
    return LinearPDESystem.from_coefficient_maps(chart, chart.dim, maps)


def lie_derivative_connection_jet(D: Connection) -> Dict[Tuple[int, int, int], Dict[JetKey, Expr]]:
    """Jet-linear maps of (L_X D)^a_{ij}; second order in X."""
    chart = D.chart
    n = chart.dim
    zero_a = (0,) * n
    out: Dict[Tuple[int, int, int], Dict[JetKey, Expr]] = {}
    for a, i, j in itertools.product(range(n), repeat=3):
        if i > j:
            continue  # symmetric in (i, j) for torsion-free D
        m_: Dict[JetKey, Expr] = {}

        def add(key: JetKey, c: Expr):
            if isinstance(c, int):
                c = chart.const(c)
            if c.is_zero(cross_check=False):
                return
            cur = m_.get(key)
            m_[key] = c if cur is None else cur + c

        for mm in range(n):
            add((mm, zero_a), D.comp(a, i, j).differentiate(chart.coordinates[mm]))
            add((a, _unit(mm, n)), -D.comp(mm, i, j))
            add((mm, _unit(i, n)), D.comp(a, mm, j))
            add((mm, _unit(j, n)), D.comp(a, i, mm))
        ei = list(zero_a)
        ei[i] += 1
        ei[j] += 1
        add((a, tuple(ei)), chart.one())
        out[(a, i, j)] = m_
    return out


def _endo_annihilator_full(frame: Sequence[TensorField], chart: Chart) -> List[List[Expr]]:
    """Basis of functionals on End(TM) vanishing on span(frame), via the
    trace pairing; each returned row is omega flattened as omega[b][a]
    pairing with A^a_b (tr(omega A) = sum omega_{ba} A^a_b)."""
    n = chart.dim
    rows = []
    for A in frame:
        # <omega, A> = sum_{a,b} omega_flat[(b,a)] A^a_b; unknowns omega_flat
        rows.append([A.comp(a, b) for (b, a) in itertools.product(range(n), repeat=2)])
    isz = lambda e: e.is_zero(cross_check=False)
    null = _linalg.nullspace(rows, n * n, is_zero=isz, one=chart.one())
    return null  # each entry indexed like (b, a) product order


def quaternionic_symmetry_system(frame: Sequence[TensorField],
                                 g: TensorField) -> LinearPDESystem:
    """omega(L_X I_j) = 0 for every annihilator element omega of span(frame)
    in End(TM) and every frame element; first order in X.

    The annihilator is taken inside all endomorphisms (trace pairing),
    not only the skew ones: the skew-part conditions alone degenerate on
    conformally flat structures.
    """
    chart = g.chart
    n = chart.dim
    isz = lambda e: e.is_zero(cross_check=False)
    # precondition: frame spans rank 3 at a generic point
    flat = [[A.comp(a, b) for a, b in itertools.product(range(n), repeat=2)]
            for A in frame]
    if len(_linalg.independent_rows(flat, is_zero=isz)) != 3:
        raise SymSysError("frame does not span a rank-3 bundle")
    ann = _endo_annihilator_full(frame, chart)
    maps: List[Dict[JetKey, Expr]] = []
    for A in frame:
        jets = lie_derivative_jet(A)  # keys (a, b) for (1,1) tensor
        for omega in ann:
            m_: Dict[JetKey, Expr] = {}
            for k, (b, a) in enumerate(itertools.product(range(n), repeat=2)):
                w = omega[k]
                if isinstance(w, Expr) and isz(w):
                    continue
                for key, c in jets[(a, b)].items():
                    term = c * w
                    cur = m_.get(key)
                    m_[key] = term if cur is None else cur + term
            maps.append(m_)
    return LinearPDESystem.from_coefficient_maps(chart, n, maps)


def _cprojective_shift_patterns(J: TensorField) -> List[Dict[Tuple[int, int, int], Expr]]:
    """The shift tensors for gamma = dx^k: (1/2)(gamma_i delta^a_j +
    gamma_j delta^a_i - (gamma J)_i J^a_j - (gamma J)_j J^a_i), stored on
    i <= j only."""
    chart = J.chart
    n = chart.dim
    half = chart.const(1) / 2
    out = []
    for k in range(n):
        pat: Dict[Tuple[int, int, int], Expr] = {}
        for a, i, j in itertools.product(range(n), repeat=3):
            if i > j:
                continue
            term = chart.zero()
            if i == k and a == j:
                term = term + 1
            if j == k and a == i:
                term = term + 1
            term = term - J.comp(k, i) * J.comp(a, j) - J.comp(k, j) * J.comp(a, i)
            term = term * half
            if not term.is_zero(cross_check=False):
                pat[(a, i, j)] = term
        out.append(pat)
    return out


def cprojective_symmetry_system(J: TensorField, D: Connection) -> LinearPDESystem:
    """L_X J = 0 plus: L_X D lies pointwise in the c-projective shift
    subspace.  The latter is imposed through an exact annihilator basis
    of the shift subspace and is second order in X."""
    chart = J.chart
    n = chart.dim
    if not D.is_torsion_free():
        raise SymSysError("connection has torsion")
    if not covariant_derivative(D, J).is_zero():
        raise SymSysError("connection does not preserve J")
    isz = lambda e: e.is_zero(cross_check=False)

    maps: List[Dict[JetKey, Expr]] = list(lie_derivative_jet(J).values())

    slots = [(a, i, j) for a, i, j in itertools.product(range(n), repeat=3) if i <= j]
    patterns = _cprojective_shift_patterns(J)
    rows = [[pat.get(s, chart.zero()) for s in slots] for pat in patterns]
    ann = _linalg.nullspace(rows, len(slots), is_zero=isz, one=chart.one())
    ld = lie_derivative_connection_jet(D)
    for omega in ann:
        m_: Dict[JetKey, Expr] = {}
        for w, s in zip(omega, slots):
            if isinstance(w, Expr) and isz(w):
                continue
            for key, c in ld[s].items():
                term = c * w
                cur = m_.get(key)
                m_[key] = term if cur is None else cur + term
        maps.append(m_)
    return LinearPDESystem.from_coefficient_maps(chart, n, maps)


def obata_solve(I: TensorField, J: TensorField, K: TensorField) -> Connection:
    """The unique torsion-free connection with DI = DJ = DK = 0.

    Solves the pointwise linear system for the Christoffel symbols;
    raises if the frame is not hypercomplex (inconsistent system) or the
    solution is not unique.
    """
    report = check_hypercomplex_frame(I, J, K)
    if not report.is_hypercomplex:
        raise SymSysError(f"frame is not hypercomplex: {report}")
    chart = I.chart
    n = chart.dim
    unknowns = [(k, i, j) for k in range(n) for i in range(n) for j in range(i, n)]
    col = {u: c for c, u in enumerate(unknowns)}
    rows: List[List[Expr]] = []
    rhs: List[Expr] = []

    def gamma_col(k: int, i: int, j: int) -> int:
        return col[(k, i, j)] if i <= j else col[(k, j, i)]

    for A in (I, J, K):
        for a, b, mm in itertools.product(range(n), repeat=3):
            # d_m A^a_b + G^a_{mc} A^c_b - G^c_{mb} A^a_c = 0
            row = [chart.zero()] * len(unknowns)
            for c in range(n):
                t = A.comp(c, b)
                if not t.is_zero(cross_check=False):
                    cc = gamma_col(a, mm, c)
                    row[cc] = row[cc] + t
                t = A.comp(a, c)
                if not t.is_zero(cross_check=False):
                    cc = gamma_col(c, mm, b)
                    row[cc] = row[cc] - t
            rows.append(row)
            rhs.append(-A.comp(a, b).differentiate(chart.coordinates[mm]))
    isz = lambda e: e.is_zero(cross_check=False)
    null = _linalg.nullspace(rows, len(unknowns), is_zero=isz, one=chart.one())
    if null:
        raise SymSysError(
            f"parallelism system underdetermined: {len(null)}-dimensional defect")
    sol = _linalg.solve(rows, rhs, is_zero=isz)
    if sol is None:
        raise SymSysError("parallelism system inconsistent; frame not hypercomplex")
    gamma = {}
    for (k, i, j), c in col.items():
        gamma[(k, i, j)] = sol[c]
        gamma[(k, j, i)] = sol[c]
    return Connection(chart, gamma)
