"""Tensor calculus over a chart.

Components are kernel expressions stored sparsely by index tuple; the
corpus charts have at most 4 coordinates and 4 slots, so dense loops
over ``itertools.product`` are used without further ado.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from . import _linalg
from .exprfield import Chart, Expr, ExprError, exact_sqrt

Index = Tuple[int, ...]


class GeometryError(ExprError):
    pass


class TensorField:
    """Dense-logic, sparsely stored tensor field.

    ``variance`` is a tuple of 'u'/'d' flags, one per slot.  Missing
    component entries are zero.  Instances are treated as immutable.
    """

    __slots__ = ("chart", "variance", "_comps")

    def __init__(self, chart: Chart, variance: Sequence[str],
                 comps: Mapping[Index, Expr]):
        variance = tuple(variance)
        if any(v not in ("u", "d") for v in variance):
            raise GeometryError(f"bad variance {variance!r}")
        n = chart.dim
        clean: Dict[Index, Expr] = {}
        for idx, e in comps.items():
            idx = tuple(idx)
            if len(idx) != len(variance) or any(not 0 <= i < n for i in idx):
                raise GeometryError(f"index {idx} out of range for rank {len(variance)}")
            e = chart.expr(e)
            if e._num:
                clean[idx] = e
        self.chart = chart
        self.variance = variance
        self._comps = clean

    @property
    def rank(self) -> int:
        return len(self.variance)

    def comp(self, *idx: int) -> Expr:
        return self._comps.get(tuple(idx), self.chart.zero())

    def __getitem__(self, idx) -> Expr:
        if isinstance(idx, int):
            idx = (idx,)
        return self.comp(*idx)

    def items(self):
        return self._comps.items()

    def indices(self) -> Iterable[Index]:
        return itertools.product(range(self.chart.dim), repeat=self.rank)

    def map(self, f) -> "TensorField":
        return TensorField(self.chart, self.variance,
                           {i: f(e) for i, e in self._comps.items()})

    def __add__(self, other: "TensorField") -> "TensorField":
        self._compat(other)
        out = dict(self._comps)
        for i, e in other._comps.items():
            out[i] = out[i] + e if i in out else e
        return TensorField(self.chart, self.variance, out)

    def __sub__(self, other: "TensorField") -> "TensorField":
        return self + other.map(lambda e: -e)

    def __neg__(self) -> "TensorField":
        return self.map(lambda e: -e)

    def scale(self, s) -> "TensorField":
        s = self.chart.expr(s)
        return self.map(lambda e: e * s)

    def is_zero(self) -> bool:
        return all(e.is_zero() for e in self._comps.values())

    def equals(self, other: "TensorField") -> bool:
        return (self - other).is_zero()

    def _compat(self, other: "TensorField"):
        if other.chart is not self.chart or other.variance != self.variance:
            raise GeometryError("tensor shapes/charts incompatible")

    def __repr__(self):
        sig = "".join(self.variance)
        return f"TensorField({sig}, {len(self._comps)} nonzero comps)"

    def check_symmetric(self, slot_a: int, slot_b: int) -> bool:
        for idx in list(self._comps):
            j = list(idx)
            j[slot_a], j[slot_b] = j[slot_b], j[slot_a]
            if not (self.comp(*idx) - self.comp(*j)).is_zero():
                return False
        return True


def vector(chart: Chart, comps: Sequence) -> TensorField:
    return TensorField(chart, ("u",), {(i,): chart.expr(c) for i, c in enumerate(comps)})


def one_form(chart: Chart, comps: Sequence) -> TensorField:
    return TensorField(chart, ("d",), {(i,): chart.expr(c) for i, c in enumerate(comps)})


def endomorphism(chart: Chart, matrix: Sequence[Sequence]) -> TensorField:
    """(1,1) tensor from a row-major matrix A[a][b] = A^a_b."""
    comps = {}
    for a, row in enumerate(matrix):
        for b, e in enumerate(row):
            comps[(a, b)] = chart.expr(e)
    return TensorField(chart, ("u", "d"), comps)


def identity_endo(chart: Chart) -> TensorField:
    return TensorField(chart, ("u", "d"),
                       {(i, i): chart.one() for i in range(chart.dim)})


def endo_mul(A: TensorField, B: TensorField) -> TensorField:
    n = A.chart.dim
    comps = {}
    for a in range(n):
        for b in range(n):
            s = A.chart.zero()
            for m in range(n):
                s = s + A.comp(a, m) * B.comp(m, b)
            comps[(a, b)] = s
    return TensorField(A.chart, ("u", "d"), comps)


def endo_trace(A: TensorField) -> Expr:
    s = A.chart.zero()
    for i in range(A.chart.dim):
        s = s + A.comp(i, i)
    return s


@dataclass
class Connection:
    """Christoffel symbols Gamma^k_{ij} of an affine connection."""

    chart: Chart
    gamma: Dict[Index, Expr]

    def __post_init__(self):
        self.gamma = {tuple(i): self.chart.expr(e) for i, e in self.gamma.items()
                      if self.chart.expr(e)._num}

    def comp(self, k: int, i: int, j: int) -> Expr:
        return self.gamma.get((k, i, j), self.chart.zero())

    def torsion(self) -> TensorField:
        n = self.chart.dim
        comps = {}
        for k, i, j in itertools.product(range(n), repeat=3):
            comps[(k, i, j)] = self.comp(k, i, j) - self.comp(k, j, i)
        return TensorField(self.chart, ("u", "d", "d"), comps)

    def is_torsion_free(self) -> bool:
        return all((self.comp(k, i, j) - self.comp(k, j, i)).is_zero()
                   for k, i, j in itertools.product(range(self.chart.dim), repeat=3)
                   if i < j)


def metric_det(g: TensorField) -> Expr:
    n = g.chart.dim
    return _det([[g.comp(i, j) for j in range(n)] for i in range(n)], g.chart)


def _det(m: List[List[Expr]], chart: Chart) -> Expr:
    n = len(m)
    if n == 1:
        return m[0][0]
    total = chart.zero()
    for j in range(n):
        if m[0][j].is_zero(cross_check=False):
            continue
        minor = [row[:j] + row[j + 1:] for row in m[1:]]
        term = m[0][j] * _det(minor, chart)
        total = total + term if j % 2 == 0 else total - term
    return total


def metric_inverse(g: TensorField) -> TensorField:
    n = g.chart.dim
    det = metric_det(g)
    if det.is_zero():
        raise GeometryError("metric degenerate: determinant reduces to zero")
    comps = {}
    m = [[g.comp(i, j) for j in range(n)] for i in range(n)]
    for i in range(n):
        for j in range(n):
            minor = [[m[r][c] for c in range(n) if c != j] for r in range(n) if r != i]
            cof = _det(minor, g.chart) if n > 1 else g.chart.one()
            sign = 1 if (i + j) % 2 == 0 else -1
            comps[(j, i)] = cof * g.chart.const(sign) / det
    return TensorField(g.chart, ("u", "u"), comps)


def levi_civita(g: TensorField, check: bool = False) -> Connection:
    """Unique torsion-free metric connection of ``g``."""
    if g.variance != ("d", "d"):
        raise GeometryError("levi_civita expects a (0,2) tensor")
    n = g.chart.dim
    ginv = metric_inverse(g)
    gamma: Dict[Index, Expr] = {}
    dg = {}
    for i, j in itertools.product(range(n), repeat=2):
        for l in range(n):
            dg[(i, j, l)] = g.comp(i, j).differentiate(g.chart.coordinates[l])
    for k in range(n):
        for i in range(n):
            for j in range(i, n):
                s = g.chart.zero()
                for l in range(n):
                    if ginv.comp(k, l).is_zero(cross_check=False):
                        continue
                    s = s + ginv.comp(k, l) * (dg[(l, j, i)] + dg[(l, i, j)] - dg[(i, j, l)])
                s = s / 2
                gamma[(k, i, j)] = s
                gamma[(k, j, i)] = s
    D = Connection(g.chart, gamma)
    if check:
        if not covariant_derivative(D, g).is_zero():
            raise GeometryError("internal error: Levi-Civita connection not metric")
    return D


def covariant_derivative(D: Connection, T: TensorField) -> TensorField:
    """nabla T with the derivative index appended as a new last 'd' slot."""
    n = T.chart.dim
    coords = T.chart.coordinates
    comps: Dict[Index, Expr] = {}
    for idx in T.indices():
        base = T.comp(*idx)
        for i in range(n):
            s = base.differentiate(coords[i])
            for p, v in enumerate(T.variance):
                for m in range(n):
                    jdx = list(idx)
                    jdx[p] = m
                    t = T.comp(*jdx)
                    if t.is_zero(cross_check=False):
                        continue
                    if v == "u":
                        s = s + D.comp(idx[p], i, m) * t
                    else:
                        s = s - D.comp(m, i, idx[p]) * t
            comps[idx + (i,)] = s
    return TensorField(T.chart, T.variance + ("d",), comps)


def curvature(D: Connection) -> TensorField:
    """R^a_{b i j}: value index a, argument Z = partial_b, form slots (i, j).

    R(X, Y)Z = nabla_X nabla_Y Z - nabla_Y nabla_X Z - nabla_[X,Y] Z.
    """
    n = D.chart.dim
    coords = D.chart.coordinates
    dG: Dict[Index, Expr] = {}
    for (k, i, j), e in D.gamma.items():
        for l in range(n):
            dG[(k, i, j, l)] = e.differentiate(coords[l])
    zero = D.chart.zero()
    comps: Dict[Index, Expr] = {}
    for a, b, i, j in itertools.product(range(n), repeat=4):
        if i >= j:
            continue
        s = dG.get((a, j, b, i), zero) - dG.get((a, i, b, j), zero)
        for m in range(n):
            s = s + D.comp(a, i, m) * D.comp(m, j, b) - D.comp(a, j, m) * D.comp(m, i, b)
        comps[(a, b, i, j)] = s
        comps[(a, b, j, i)] = -s
    return TensorField(D.chart, ("u", "d", "d", "d"), comps)


def ricci(R: TensorField) -> TensorField:
    n = R.chart.dim
    comps = {}
    for b, j in itertools.product(range(n), repeat=2):
        s = R.chart.zero()
        for a in range(n):
            s = s + R.comp(a, b, a, j)
        comps[(b, j)] = s
    return TensorField(R.chart, ("d", "d"), comps)


def lie_derivative(T: TensorField, X: TensorField) -> TensorField:
    """L_X T for any variance of T; X must be a vector field."""
    if X.variance != ("u",):
        raise GeometryError("second argument must be a vector field")
    n = T.chart.dim
    coords = T.chart.coordinates
    dX = [[X.comp(m).differentiate(coords[i]) for i in range(n)] for m in range(n)]
    comps: Dict[Index, Expr] = {}
    for idx in T.indices():
        s = T.chart.zero()
        for m in range(n):
            xm = X.comp(m)
            if not xm.is_zero(cross_check=False):
                s = s + xm * T.comp(*idx).differentiate(coords[m])
        for p, v in enumerate(T.variance):
            for m in range(n):
                jdx = list(idx)
                jdx[p] = m
                t = T.comp(*jdx)
                if t.is_zero(cross_check=False):
                    continue
                if v == "d":
                    s = s + dX[m][idx[p]] * t
                else:
                    s = s - dX[idx[p]][m] * t
        comps[idx] = s
    return TensorField(T.chart, T.variance, comps)


def bracket(X: TensorField, Y: TensorField) -> TensorField:
    """Lie bracket of vector fields."""
    n = X.chart.dim
    coords = X.chart.coordinates
    comps = {}
    for a in range(n):
        s = X.chart.zero()
        for m in range(n):
            s = s + X.comp(m) * Y.comp(a).differentiate(coords[m]) \
                  - Y.comp(m) * X.comp(a).differentiate(coords[m])
        comps[(a,)] = s
    return TensorField(X.chart, ("u",), comps)


def nijenhuis(J: TensorField) -> TensorField:
    """Nijenhuis tensor N_J as a (1,2) tensor field."""
    n = J.chart.dim
    coords = J.chart.coordinates
    dJ = {}
    for (a, b), e in J.items():
        for m in range(n):
            dJ[(a, b, m)] = e.differentiate(coords[m])
    zero = J.chart.zero()
    comps = {}
    for a, i, j in itertools.product(range(n), repeat=3):
        if i >= j:
            continue
        s = J.chart.zero()
        for m in range(n):
            s = s + J.comp(m, i) * dJ.get((a, j, m), zero) \
                  - J.comp(m, j) * dJ.get((a, i, m), zero) \
                  - J.comp(a, m) * dJ.get((m, j, i), zero) \
                  + J.comp(a, m) * dJ.get((m, i, j), zero)
        comps[(a, i, j)] = s
        comps[(a, j, i)] = -s
    return TensorField(J.chart, ("u", "d", "d"), comps)


@dataclass
class FrameReport:
    squares: bool
    anticommute: bool
    quaternion_relation: bool
    nijenhuis_vanishes: Tuple[bool, bool, bool]

    @property
    def is_quaternionic_frame(self) -> bool:
        return self.squares and self.anticommute and self.quaternion_relation

    @property
    def is_hypercomplex(self) -> bool:
        return self.is_quaternionic_frame and all(self.nijenhuis_vanishes)


def check_hypercomplex_frame(I: TensorField, J: TensorField, K: TensorField) -> FrameReport:
    """Verify squares, anticommutation, IJ=K, and integrability."""
    chart = I.chart
    minus_id = identity_endo(chart).map(lambda e: -e)
    squares = all(endo_mul(A, A).equals(minus_id) for A in (I, J, K))
    anticommute = all(
        (endo_mul(A, B) + endo_mul(B, A)).is_zero()
        for A, B in ((I, J), (J, K), (K, I)))
    quat = endo_mul(I, J).equals(K)
    nij = tuple(nijenhuis(A).is_zero() for A in (I, J, K))
    return FrameReport(squares, anticommute, quat, nij)


def connection_shift(D: Connection, gamma_form: TensorField, kind: str,
                     J: Optional[TensorField] = None,
                     frame: Optional[Sequence[TensorField]] = None) -> Connection:
    """Change of connection within a projective-type class.

    kind 'projective':   D' = D + gm(Y)Z + gm(Z)Y
    kind 'cprojective':  D' = D + (gm(Y)Z + gm(Z)Y - gm(JY)JZ - gm(JZ)JY)/2
    kind 'quaternionic': D' = D + (gm(Y)Z + gm(Z)Y
                              - sum_i gm(I_iY)I_iZ + gm(I_iZ)I_iY)/2
    """
    chart = D.chart
    n = chart.dim
    if kind == "cprojective":
        if J is None:
            raise GeometryError("cprojective shift needs the complex structure")
        structures: List[TensorField] = [J]
    elif kind == "quaternionic":
        if frame is None:
            raise GeometryError("quaternionic shift needs a frame")
        structures = list(frame)
    elif kind == "projective":
        structures = []
    else:
        raise GeometryError(f"unknown shift kind {kind!r}")

    new = dict(D.gamma)

    def add(k, i, j, e):
        key = (k, i, j)
        cur = new.get(key, chart.zero())
        new[key] = cur + e

    gm = [gamma_form.comp(i) for i in range(n)]
    for k, i, j in itertools.product(range(n), repeat=3):
        # gm(Y)Z + gm(Z)Y with Y = e_i, Z = e_j, output slot k
        term = chart.zero()
        if k == j:
            term = term + gm[i]
        if k == i:
            term = term + gm[j]
        for S in structures:
            # - gm(SY) SZ - gm(SZ) SY
            gSY = chart.zero()
            for m in range(n):
                gSY = gSY + gm[m] * S.comp(m, i)
            gSZ = chart.zero()
            for m in range(n):
                gSZ = gSZ + gm[m] * S.comp(m, j)
            term = term - gSY * S.comp(k, j) - gSZ * S.comp(k, i)
        if kind != "projective":
            term = term / 2
        add(k, i, j, term)
    return Connection(chart, new)


@dataclass
class CurvatureSplit:
    """J-type decomposition of a curvature tensor in its 2-form slots."""

    r20: TensorField
    r11: TensorField
    r02: TensorField

    def total(self) -> TensorField:
        return self.r20 + self.r11 + self.r02


def curvature_type_split(R: TensorField, J: TensorField) -> CurvatureSplit:
    """Split R by J-type: the (1,1) part is invariant under (X,Y) -> (JX,JY);
    the remainder is split by J-commutation through the value slot."""
    chart = R.chart
    n = chart.dim
    if not endo_mul(J, J).equals(identity_endo(chart).map(lambda e: -e)):
        raise GeometryError("J is not an almost complex structure")

    def pull_forms(T: TensorField) -> TensorField:
        comps = {}
        for a, b, i, j in itertools.product(range(n), repeat=4):
            s = chart.zero()
            for k, l in itertools.product(range(n), repeat=2):
                t = T.comp(a, b, k, l)
                if t.is_zero(cross_check=False):
                    continue
                s = s + J.comp(k, i) * J.comp(l, j) * t
            comps[(a, b, i, j)] = s
        return TensorField(chart, T.variance, comps)

    r11 = (R + pull_forms(R)).map(lambda e: e / 2)
    rm = R - r11

    def value_twist(T: TensorField) -> TensorField:
        # X -> JX in the first form slot, then J in the value slot
        comps = {}
        for a, b, i, j in itertools.product(range(n), repeat=4):
            s = chart.zero()
            for c, k in itertools.product(range(n), repeat=2):
                t = T.comp(c, b, k, j)
                if t.is_zero(cross_check=False):
                    continue
                s = s + J.comp(a, c) * J.comp(k, i) * t
            comps[(a, b, i, j)] = s
        return TensorField(chart, T.variance, comps)

    tw = value_twist(rm)
    r20 = (rm - tw).map(lambda e: e / 2)
    r02 = (rm + tw).map(lambda e: e / 2)
    return CurvatureSplit(r20, r11, r02)


# -- two-form machinery for the quaternionic bundle ------------------------


def _two_form_basis(n: int) -> List[Tuple[int, int]]:
    return [(a, b) for a in range(n) for b in range(a + 1, n)]


def volume_root(g: TensorField) -> Expr:
    """sqrt(det g) within the field; positive at the chart's sample points.

    The determinant must be a perfect square (possibly via a declared
    root generator whose relation matches it)."""
    det = metric_det(g)
    W = exact_sqrt(det)
    if W is None:
        raise GeometryError(
            "det(g) is not a perfect square in the field; "
            "declare a volume-root generator with relation W^2 = det(g)")
    pt = g.chart._check_pool(1)[0]
    if W.evaluate(pt) < 0:
        W = -W
    return W


def hodge_star_matrix(g: TensorField) -> List[List[Expr]]:
    """Matrix of the Hodge star on 2-forms in the basis dx^a ^ dx^b, a<b."""
    chart = g.chart
    n = chart.dim
    if n != 4:
        raise GeometryError("Hodge-star machinery implemented for dimension 4")
    W = volume_root(g)
    ginv = metric_inverse(g)
    basis = _two_form_basis(n)
    eps = {}
    for perm in itertools.permutations(range(4)):
        sign = _perm_sign(perm)
        eps[perm] = sign
    cols = []
    for (a, b) in basis:
        # omega = dx^a ^ dx^b: omega_{ab}=1, omega_{ba}=-1
        # (*omega)_{ij} = 1/2 W eps_{ijkl} omega^{kl}
        comp = {}
        for (i, j) in basis:
            s = chart.zero()
            for k, l in itertools.product(range(4), repeat=2):
                e = eps.get((i, j, k, l))
                if not e:
                    continue
                # omega^{kl} = g^{ka} g^{lb} - g^{kb} g^{la}
                up = ginv.comp(k, a) * ginv.comp(l, b) - ginv.comp(k, b) * ginv.comp(l, a)
                s = s + chart.const(e) * up
            comp[(i, j)] = s * W / 2
        cols.append([comp[(i, j)] for (i, j) in basis])
    # columns were computed; return matrix rows
    return [[cols[c][r] for c in range(6)] for r in range(6)]


def _perm_sign(perm: Sequence[int]) -> int:
    sign = 1
    perm = list(perm)
    for i in range(len(perm)):
        for j in range(i + 1, len(perm)):
            if perm[i] > perm[j]:
                sign = -sign
    return sign


def _form_to_endo(g_inv: TensorField, comps2: Mapping[Tuple[int, int], Expr],
                  chart: Chart) -> TensorField:
    """Raise the first index of an antisymmetric 2-form."""
    n = chart.dim
    full: Dict[Tuple[int, int], Expr] = {}
    for (a, b), e in comps2.items():
        full[(a, b)] = e
        full[(b, a)] = -e
    out = {}
    for i, j in itertools.product(range(n), repeat=2):
        s = chart.zero()
        for k in range(n):
            t = full.get((k, j))
            if t is None:
                continue
            s = s + g_inv.comp(i, k) * t
        out[(i, j)] = s
    return TensorField(chart, ("u", "d"), out)


def _asd_orthogonal(g: TensorField, orientation: int):
    """Trace-orthogonal (unnormalized) basis of the (anti-)self-dual
    2-forms, as (form dict, squared norm) pairs, plus the inverse metric."""
    chart = g.chart
    if chart.dim != 4:
        raise GeometryError("ASD machinery requires a 4-dimensional chart")
    if orientation not in (1, -1):
        raise GeometryError("orientation must be +1 or -1")
    star = hodge_star_matrix(g)
    basis = _two_form_basis(4)
    # projector (Id - orientation * star)/2 maps onto the ASD forms
    proj = [[(chart.const(1 if r == c else 0) - chart.const(orientation) * star[r][c]) / 2
             for c in range(6)] for r in range(6)]
    cols = [[proj[r][c] for r in range(6)] for c in range(6)]
    keep = _linalg.independent_rows(cols, is_zero=lambda e: e.is_zero(cross_check=False))
    if len(keep) != 3:
        raise GeometryError("ASD projector rank is not 3; metric degenerate?")
    forms = [{basis[r]: cols[c][r] for r in range(6)} for c in keep[:3]]
    ginv = metric_inverse(g)

    def inner(f1, f2) -> Expr:
        # <w, e> = 1/2 w_{ij} e^{ij}
        s = chart.zero()
        for (a, b), e1 in f1.items():
            for (c, d), e2 in f2.items():
                if e1.is_zero(cross_check=False) or e2.is_zero(cross_check=False):
                    continue
                up = ginv.comp(a, c) * ginv.comp(b, d) - ginv.comp(a, d) * ginv.comp(b, c)
                s = s + e1 * e2 * up
        return s

    # Gram-Schmidt without normalization keeps everything rational
    ortho = []
    for f in forms:
        cur = dict(f)
        for prev, nrm in ortho:
            c = inner(cur, prev) / nrm
            if c.is_zero(cross_check=False):
                continue
            for key in set(cur) | set(prev):
                cur[key] = cur.get(key, chart.zero()) - c * prev.get(key, chart.zero())
        nrm = inner(cur, cur)
        if nrm.is_zero():
            raise GeometryError("degenerate inner product on ASD forms")
        ortho.append((cur, nrm))
    return ortho, ginv


def asd_span(g: TensorField, orientation: int = 1) -> List[TensorField]:
    """Trace-orthogonal unnormalized triple spanning the (anti-)self-dual
    skew endomorphisms; stays inside the chart's field (no adjoined
    roots), which makes it the right input for PDE generation."""
    ortho, ginv = _asd_orthogonal(g, orientation)
    return [_form_to_endo(ginv, f, g.chart) for f, _ in ortho]


def asd_frame(g: TensorField, orientation: int = 1) -> List[TensorField]:
    """Quaternionic triple spanning the (anti-)self-dual skew endomorphisms.

    Returns A1, A2, A3 with A_i skew with respect to g, pairwise
    anticommuting, A_i^2 = -Id and A1 A2 = A3.  Entries stay in the
    chart's field whenever the norm normalizations are perfect squares
    there; otherwise root generators are adjoined to the chart.
    """
    chart = g.chart
    ortho, ginv = _asd_orthogonal(g, orientation)
    # Normalize the first two elements; the third is their product,
    # which is automatically unit and completes the quaternion triple.
    # This needs at most two adjoined square roots instead of three.
    frame = []
    for k, (f, nrm) in enumerate(ortho[:2]):
        lam = nrm / 2  # A^2 = -(|w|^2/2) Id for (anti-)self-dual w
        mu = exact_sqrt(lam)
        if mu is None:
            # adjoin sqrt(num*den)/den as a generator
            num, den = chart._current(lam)
            from .exprfield import Expr as _E
            rad = _E(chart, chart._reduce_poly(num * den), chart._ring.one)
            name = f"asdnorm{k}"
            suffix = 0
            while name in chart._index:
                suffix += 1
                name = f"asdnorm{k}_{suffix}"
            root = chart.add_square_root(name, rad)
            mu = root / _E(chart, den, chart._ring.one)
        A = _form_to_endo(ginv, f, chart).map(lambda e: e / mu)
        frame.append(A)
    frame.append(endo_mul(frame[0], frame[1]))
    return frame


def skew_endo_basis(g: TensorField) -> List[TensorField]:
    """The endomorphisms obtained by raising dx^a ^ dx^b, a<b."""
    ginv = metric_inverse(g)
    chart = g.chart
    out = []
    for (a, b) in _two_form_basis(chart.dim):
        out.append(_form_to_endo(ginv, {(a, b): chart.one()}, chart))
    return out


def annihilator_forms(frame: Sequence[TensorField], g: TensorField) -> List[TensorField]:
    """Basis of the annihilator of span(frame) inside skew endomorphisms.

    Functionals are realized as skew endomorphism fields omega with
    pairing <omega, A> = tr(omega A)."""
    chart = g.chart
    basis = skew_endo_basis(g)
    rows = []
    for A in frame:
        rows.append([endo_trace(endo_mul(A, E)) for E in basis])
    isz = lambda e: e.is_zero(cross_check=False)
    null = _linalg.nullspace(rows, len(basis), is_zero=isz, one=chart.one())
    out = []
    for coeffs in null:
        omega = TensorField(chart, ("u", "d"), {})
        for c, E in zip(coeffs, basis):
            if isinstance(c, Expr) and c.is_zero(cross_check=False):
                continue
            omega = omega + E.scale(c)
        out.append(omega)
    return out
