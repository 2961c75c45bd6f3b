"""Prolongation–projection engine for linear homogeneous PDE systems.

Systems are linear in the jet coordinates X^a_alpha of the unknown
vector-field components.  Prolongation appends total derivatives;
symbol dimensions are computed by exact elimination of the system
evaluated at admissible rational points, graded by jet order with the
highest order eliminated first.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from typing import Dict, List, Optional, Sequence, Tuple

from .exprfield import Chart, Expr, ExprError, PoleError, _eval_pair

JetKey = Tuple[int, Tuple[int, ...]]  # (unknown index, derivative exponents)


class ProlongError(ExprError):
    pass


@dataclass
class Equation:
    """One linear homogeneous equation sum c_{a,alpha} X^a_alpha = 0.

    ``base`` and ``deriv`` record provenance: the originating equation
    and how often it has been differentiated per coordinate, so that a
    mixed partial is generated only once.
    """

    coeffs: Dict[JetKey, Expr]
    base: int
    deriv: Tuple[int, ...]

    @property
    def order(self) -> int:
        return max((sum(alpha) for (_, alpha) in self.coeffs), default=0)

    def evaluate_sparse(self, point) -> Dict[Tuple[int, int, Tuple[int, ...]], Fraction]:
        """Row at the point, keyed by the graded column key
        (-order, unknown, multi-index) so that min() picks the jet
        coordinate eliminated first."""
        row = {}
        for (a, alpha), c in self.coeffs.items():
            v = _eval_pair(c.chart, (c._num, c._den), point)
            if not isinstance(v, Fraction):
                raise ProlongError(
                    "coefficient evaluates outside QQ at the sample point")
            if v:
                row[(-sum(alpha), a, alpha)] = v
        return row


class LinearPDESystem:
    """Immutable bundle of equations over one chart."""

    def __init__(self, chart: Chart, n_unknowns: int, equations: Sequence[Equation]):
        self.chart = chart
        self.n_unknowns = n_unknowns
        self.equations = list(equations)
        self._seen = {(e.base, e.deriv) for e in self.equations}

    @property
    def order(self) -> int:
        return max((e.order for e in self.equations), default=0)

    def __len__(self):
        return len(self.equations)

    @staticmethod
    def from_coefficient_maps(chart: Chart, n_unknowns: int,
                              maps: Sequence[Dict[JetKey, Expr]]) -> "LinearPDESystem":
        zero_d = (0,) * chart.dim
        eqs = []
        for i, m in enumerate(maps):
            m = {k: v for k, v in m.items() if not v.is_zero(cross_check=False)}
            if m:
                eqs.append(Equation(m, base=i, deriv=zero_d))
        return LinearPDESystem(chart, n_unknowns, eqs)


def _total_derivative(chart: Chart, eq: Equation, i: int) -> Equation:
    coord = chart.coordinates[i]
    out: Dict[JetKey, Expr] = {}

    def add(key: JetKey, c: Expr):
        cur = out.get(key)
        out[key] = c if cur is None else cur + c

    for (a, alpha), c in eq.coeffs.items():
        dc = c.differentiate(coord)
        if not dc.is_zero(cross_check=False):
            add((a, alpha), dc)
        up = list(alpha)
        up[i] += 1
        add((a, tuple(up)), c)
    deriv = list(eq.deriv)
    deriv[i] += 1
    out = {k: v for k, v in out.items() if not v.is_zero(cross_check=False)}
    return Equation(out, base=eq.base, deriv=tuple(deriv))


def prolong(system: LinearPDESystem) -> LinearPDESystem:
    """Append all total derivatives of all equations (deduplicated by
    provenance so each mixed partial appears once); originals retained."""
    chart = system.chart
    new = list(system.equations)
    seen = set(system._seen)
    for eq in system.equations:
        for i in range(chart.dim):
            d = list(eq.deriv)
            d[i] += 1
            key = (eq.base, tuple(d))
            if key in seen:
                continue
            seen.add(key)
            new.append(_clear_denominators(chart, _total_derivative(chart, eq, i)))
    return LinearPDESystem(chart, system.n_unknowns, new)


@dataclass
class GenericPoint:
    """Admissible rational point with the seed that produced it."""

    values: Dict[str, object]
    seed: int

    @staticmethod
    def sample(chart: Chart, seed: int) -> "GenericPoint":
        rng = random.Random(seed)
        return GenericPoint(chart.sample_point(rng), seed)


@dataclass
class SymbolTable:
    """Symbol dimensions dim g_k at one prolongation stage.

    ``dims`` is ordered top jet order first, matching the printed
    tables (g_M, ..., g_0)."""

    stage: int
    dims: Tuple[int, ...]

    @property
    def top_order(self) -> int:
        return len(self.dims) - 1

    def dim(self, k: int) -> int:
        return self.dims[self.top_order - k]

    def total(self) -> int:
        return sum(self.dims)


class _GradedElimination:
    """Incremental echelon form over sparse Fraction rows keyed by the
    graded column key (-order, unknown, multi-index).

    Whatever order rows arrive in, the resulting pivot-key set is the
    canonical one: a column is a pivot exactly when it enlarges the rank
    of the leading column block, which depends only on the row space.
    """

    def __init__(self):
        self.rows: Dict[Tuple, Dict[Tuple, Fraction]] = {}

    @property
    def rank(self) -> int:
        return len(self.rows)

    def add(self, row: Dict[Tuple, Fraction]) -> Optional[Tuple]:
        """Reduce the row; store it and return its pivot key, or return
        None if it is dependent on the rows seen so far."""
        row = dict(row)
        while row:
            p = min(row)
            krow = self.rows.get(p)
            if krow is None:
                inv = 1 / row[p]
                self.rows[p] = {k: v * inv for k, v in row.items()}
                return p
            f = row.pop(p)
            for k, v in krow.items():
                if k == p:
                    continue
                nv = row.get(k, Fraction(0)) - f * v
                if nv:
                    row[k] = nv
                else:
                    row.pop(k, None)
        return None

    def pivots_per_order(self) -> Dict[int, int]:
        out: Dict[int, int] = {}
        for (neg_order, _, _) in self.rows:
            out[-neg_order] = out.get(-neg_order, 0) + 1
        return out


def _dims_from_pivots(per_order: Dict[int, int], n: int, m: int,
                      max_order: int) -> Tuple[int, ...]:
    return tuple(m * comb(n + k - 1, k) - per_order.get(k, 0)
                 for k in range(max_order, -1, -1))


def symbol_dimensions(system: LinearPDESystem, point: GenericPoint,
                      stage: int = 1) -> SymbolTable:
    """dim g_k for k = 0..order: order-k jet freedom left after exact
    elimination of the evaluated system, higher orders eliminated first."""
    n = system.chart.dim
    m = system.n_unknowns
    elim = _GradedElimination()
    for eq in system.equations:
        try:
            elim.add(eq.evaluate_sparse(point.values))
        except PoleError:
            raise ProlongError(
                f"coefficient pole at sampled point (seed {point.seed}); resample")
    dims = _dims_from_pivots(elim.pivots_per_order(), n, m, system.order)
    return SymbolTable(stage=stage, dims=dims)


@dataclass
class BoundResult:
    """Outcome of iterated prolongation–projection."""

    bound: Optional[int]
    conclusive: bool
    tables: List[SymbolTable]
    points: List[int] = field(default_factory=list)  # seeds used
    point_independent: bool = True

    @property
    def final_table(self) -> SymbolTable:
        return self.tables[-1]


def _clear_denominators(chart: Chart, eq: Equation) -> Equation:
    """Scale the equation by the least common denominator and divide by
    the common polynomial content; the solution set and symbol spaces
    are unchanged, and polynomial coefficients differentiate cheaply."""
    if not eq.coeffs:
        return eq
    ring = chart._ring
    pairs = {k: chart._current(c) for k, c in eq.coeffs.items()}
    lcd = ring.one
    for _, den in pairs.values():
        if not den.is_one:
            lcd = lcd * den.exquo(lcd.gcd(den))
    nums = {}
    for k, (num, den) in pairs.items():
        f = lcd if den.is_one else lcd.exquo(den)
        nums[k] = chart._reduce_poly(num * f) if not f.is_one else num
    content = None
    for p in nums.values():
        content = p if content is None else content.gcd(p)
        if content.is_ground:
            break
    out = {}
    for k, p in nums.items():
        if content is not None and not content.is_ground:
            p = p.exquo(content)
        out[k] = Expr(chart, p, ring.one)
    return Equation(out, base=eq.base, deriv=eq.deriv)


_DEFAULT_SEEDS = (101, 202, 303)


def _finite_type(table: SymbolTable) -> bool:
    # Guard against an accidental single zero: require the two top
    # symbol dimensions to vanish simultaneously.
    return len(table.dims) >= 2 and table.dims[0] == 0 and table.dims[1] == 0


def solution_bound(system: LinearPDESystem, max_stage: int = 6,
                   seeds: Sequence[int] = _DEFAULT_SEEDS) -> BoundResult:
    """Iterate prolongation and symbol projection until finite type.

    Internally only a maximal independent subset of equations (certified
    at the sample points) is carried forward: derivatives of a dependent
    equation are spanned by derivatives of the retained ones plus the
    retained lower-order equations, so the symbol tables are unchanged.
    """
    if max_stage < 1:
        raise ProlongError("max_stage must be at least 1")
    chart = system.chart
    m = system.n_unknowns
    points = [GenericPoint.sample(chart, s) for s in seeds]
    elims = [_GradedElimination() for _ in points]

    def admit(eqs: Sequence[Equation]) -> List[Equation]:
        """Add rows for all points; keep the equations independent at
        the first point (dependent ones add nothing to any symbol table:
        derivatives of a dependent equation stay in the prolonged span
        of the retained ones)."""
        kept = []
        for eq in eqs:
            try:
                if elims[0].add(eq.evaluate_sparse(points[0].values)) is None:
                    continue
                for p, el in zip(points[1:], elims[1:]):
                    el.add(eq.evaluate_sparse(p.values))
            except PoleError:
                raise ProlongError("coefficient pole at a sampled point; resample")
            kept.append(eq)
        return kept

    tables: List[SymbolTable] = []
    point_independent = True
    active = admit([_clear_denominators(chart, e) for e in system.equations])
    frontier = list(active)
    for stage in range(1, max_stage + 1):
        max_order = max(e.order for e in active)
        stage_tables = [
            SymbolTable(stage=stage,
                        dims=_dims_from_pivots(el.pivots_per_order(), chart.dim,
                                               m, max_order))
            for el in elims]
        best = min(stage_tables, key=lambda t: t.total())  # min dims = max rank
        if any(t.dims != best.dims for t in stage_tables):
            point_independent = False
        tables.append(best)
        if _finite_type(best):
            return BoundResult(best.total(), True, tables,
                               [p.seed for p in points], point_independent)
        if stage == max_stage:
            break
        # prolong the frontier only, deduplicated by provenance
        seen = {(e.base, e.deriv) for e in active}
        new_eqs = []
        for eq in frontier:
            for i in range(chart.dim):
                d = list(eq.deriv)
                d[i] += 1
                key = (eq.base, tuple(d))
                if key in seen:
                    continue
                seen.add(key)
                new_eqs.append(_clear_denominators(chart, _total_derivative(chart, eq, i)))
        if not new_eqs:
            break
        kept = admit(new_eqs)
        active = active + kept
        frontier = kept
    return BoundResult(None, False, tables, [p.seed for p in points],
                       point_independent)


def verify_solution(system: LinearPDESystem, components: Sequence[Expr],
                    cross_check: bool = True) -> Tuple[bool, List[Expr]]:
    """Substitute a concrete field into every equation; returns
    (all zero, residuals)."""
    chart = system.chart
    if len(components) != system.n_unknowns:
        raise ProlongError("component count does not match the system unknowns")
    cache: Dict[JetKey, Expr] = {}

    def jet_value(a: int, alpha: Tuple[int, ...]) -> Expr:
        key = (a, alpha)
        if key in cache:
            return cache[key]
        if sum(alpha) == 0:
            val = chart.expr(components[a])
        else:
            i = next(j for j, e in enumerate(alpha) if e)
            down = list(alpha)
            down[i] -= 1
            val = jet_value(a, tuple(down)).differentiate(chart.coordinates[i])
        cache[key] = val
        return val

    residuals = []
    ok = True
    for eq in system.equations:
        r = chart.zero()
        for (a, alpha), c in eq.coeffs.items():
            r = r + c * jet_value(a, alpha)
        residuals.append(r)
        if not r.is_zero(cross_check=cross_check):
            ok = False
    return ok, residuals
