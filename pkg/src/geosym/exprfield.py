"""Exact symbolic kernel.

Scalars are elements of the fraction field of a polynomial ring
QQ[coordinates, generators] reduced modulo a triangular ideal of
generator relations.  Generators come in two flavours used throughout
the corpus: sine/cosine pairs (relation s^2 + c^2 - 1, derivations
ds = c, dc = -s on the pair's own angle) and square roots
(relation W^2 - q, derivation dW = dq / (2W)).  Arbitrary quadratic
generators with explicit derivative rules are supported as well.

All arithmetic is exact rational; no floating point anywhere.
"""

from __future__ import annotations

import ast
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

from sympy import QQ
from sympy.polys.rings import PolyRing, ring as _make_ring

Rational = Union[int, Fraction]


class ExprError(Exception):
    """Base class for kernel errors."""


class DivisionByZero(ExprError):
    """Division by an expression that reduces to zero."""


class PoleError(ExprError):
    """Evaluation at a point where a denominator vanishes."""


class RelationViolation(ExprError):
    """A point assignment does not satisfy the generator relations."""


class KernelInconsistency(ExprError):
    """Ideal reduction and point evaluation disagree; signals a kernel bug."""


class ExprParseError(ExprError):
    """Malformed expression source string."""

    def __init__(self, message: str, line: int = 1, col: int = 0):
        super().__init__(f"{message} (line {line}, column {col})")
        self.line = line
        self.col = col


def _fr(x) -> Fraction:
    """Domain element (mpq / PythonRational) to Fraction."""
    return Fraction(int(x.numerator), int(x.denominator))


def _qq(x: Rational):
    return QQ.convert(Fraction(x))


@dataclass
class GeneratorSpec:
    """One adjoined algebraic generator.

    ``square_rhs`` is the reduced polynomial r with relation g^2 = r;
    it may only involve coordinates and earlier generators.
    ``derivatives`` maps coordinate names to derivative rules; the rule
    for a root generator is synthesized from the radicand on demand.
    """

    name: str
    kind: str  # "sin" | "cos" | "root" | "custom"
    partner: Optional[str] = None  # for trig pairs: the other generator
    square_rhs: Optional["Expr"] = None  # None => no rewrite rule (cos)
    derivatives: Dict[str, "Expr"] = field(default_factory=dict)


class Chart:
    """Ordered coordinates plus adjoined generators over QQ.

    The generator relations form a triangular system: each relation and
    each derivative rule involves only coordinates and generators
    declared before it.
    """

    def __init__(self, coordinates: Sequence[str]):
        names = list(coordinates)
        if len(set(names)) != len(names):
            raise ExprError(f"coordinate names not distinct: {names}")
        for n in names:
            if not n.isidentifier():
                raise ExprError(f"bad coordinate name: {n!r}")
        self.coordinates: List[str] = names
        self.generators: List[GeneratorSpec] = []
        self._ring: Optional[PolyRing] = None
        self._gens_by_name: Dict[str, GeneratorSpec] = {}
        self._trig_pairs: Dict[str, Tuple[str, str]] = {}  # angle -> (sin, cos)
        self._sample_pool: List[Dict[str, Fraction]] = []
        self._rebuild_ring()

    # -- ring bookkeeping -------------------------------------------------

    @property
    def var_names(self) -> List[str]:
        return self.coordinates + [g.name for g in self.generators]

    @property
    def dim(self) -> int:
        return len(self.coordinates)

    def _rebuild_ring(self):
        self._ring = _make_ring(",".join(self.var_names), QQ)[0]
        self._index = {n: i for i, n in enumerate(self.var_names)}
        self._sample_pool = []

    def _lift(self, poly, old_nvars: int):
        """Re-embed a polynomial from a ring with fewer variables."""
        pad = len(self.var_names) - old_nvars
        if pad == 0 and poly.ring is self._ring:
            return poly
        return self._ring.from_dict(
            {m + (0,) * pad: c for m, c in poly.to_dict().items()}
        )

    def _current(self, e: "Expr") -> Tuple:
        """Return (num, den) of e lifted into the current ring."""
        n = len(e._num.ring.gens)
        return self._lift(e._num, n), self._lift(e._den, n)

    # -- generator declaration -------------------------------------------

    def add_trig_pair(self, angle: str) -> Tuple["Expr", "Expr"]:
        """Adjoin sin/cos generators for a coordinate ``angle``."""
        if angle not in self.coordinates:
            raise ExprError(f"{angle!r} is not a coordinate of this chart")
        if angle in self._trig_pairs:
            s, c = self._trig_pairs[angle]
            return self.var(s), self.var(c)
        s_name, c_name = f"sin_{angle}", f"cos_{angle}"
        s = GeneratorSpec(s_name, "sin", partner=c_name)
        c = GeneratorSpec(c_name, "cos", partner=s_name)
        self._declare(s)
        self._declare(c)
        # relation sin^2 -> 1 - cos^2, stored after both vars exist
        s.square_rhs = 1 - self.var(c_name) ** 2
        self._trig_pairs[angle] = (s_name, c_name)
        return self.var(s_name), self.var(c_name)

    def add_square_root(self, name: str, radicand: "Expr") -> "Expr":
        """Adjoin a generator W with W^2 = radicand.

        The radicand must be a polynomial (denominator-free) expression in
        previously declared variables; pull denominators out beforehand.
        """
        radicand = self.expr(radicand)
        if not radicand._den.is_one:
            raise ExprError("radicand must be denominator-free")
        if radicand.is_zero():
            raise ExprError("radicand reduces to zero")
        if exact_sqrt(radicand) is not None:
            raise ExprError(
                f"radicand of {name!r} is a perfect square; use the field element"
            )
        g = GeneratorSpec(name, "root")
        self._declare(g)
        g.square_rhs = self.expr(radicand)  # lift into the enlarged ring
        return self.var(name)

    def add_generator(
        self,
        name: str,
        square_rhs: "Expr",
        derivatives: Mapping[str, "Expr"],
    ) -> "Expr":
        """Adjoin a generic quadratic generator g with g^2 = square_rhs."""
        square_rhs = self.expr(square_rhs)
        if not square_rhs._den.is_one:
            raise ExprError("relation right-hand side must be denominator-free")
        g = GeneratorSpec(name, "custom")
        self._declare(g)
        g.square_rhs = self.expr(square_rhs)
        g.derivatives = {x: self.expr(d) for x, d in derivatives.items()}
        missing = set(self.coordinates) - set(g.derivatives)
        if missing:
            raise ExprError(f"generator {name!r} missing derivative rules for {sorted(missing)}")
        return self.var(name)

    def _declare(self, g: GeneratorSpec):
        if g.name in self._index:
            raise ExprError(f"duplicate variable name: {g.name!r}")
        if not g.name.isidentifier():
            raise ExprError(f"bad generator name: {g.name!r}")
        self.generators.append(g)
        self._gens_by_name[g.name] = g
        self._rebuild_ring()

    def trig_pair(self, angle: str) -> Tuple["Expr", "Expr"]:
        if angle not in self._trig_pairs:
            raise ExprError(f"no trig pair declared for {angle!r}")
        s, c = self._trig_pairs[angle]
        return self.var(s), self.var(c)

    # -- expression construction -----------------------------------------

    def zero(self) -> "Expr":
        return Expr(self, self._ring.zero, self._ring.one)

    def one(self) -> "Expr":
        return Expr(self, self._ring.one, self._ring.one)

    def const(self, x: Rational) -> "Expr":
        return Expr(self, self._ring.ground_new(_qq(x)), self._ring.one)

    def var(self, name: str) -> "Expr":
        if name not in self._index:
            raise ExprError(f"unknown variable {name!r}")
        return Expr(self, self._ring.gens[self._index[name]], self._ring.one)

    def expr(self, source) -> "Expr":
        """Coerce strings, numbers, or Exprs into this chart's field."""
        if isinstance(source, Expr):
            if source.chart is not self:
                raise ExprError("expression belongs to a different chart")
            if source._num.ring is self._ring:
                return source
            num, den = self._current(source)
            return Expr(self, num, den)
        if isinstance(source, (int, Fraction)):
            return self.const(source)
        if isinstance(source, str):
            return parse_expr(self, source)
        raise ExprError(f"cannot coerce {type(source).__name__} to Expr")

    # -- reduction modulo the relation ideal ------------------------------

    def _reduce_poly(self, p):
        """Rewrite g^k -> g^(k mod 2) * rhs^(k//2) to fixpoint.

        The rules' leading monomials are pairwise coprime, so this is
        reduction by a Groebner basis and the normal form is canonical.
        """
        rules = []
        for g in self.generators:
            if g.square_rhs is not None:
                rules.append((self._index[g.name], self._current(g.square_rhs)[0]))
        changed = True
        while changed:
            changed = False
            for idx, rhs in rules:
                if p.degree(p.ring.gens[idx]) < 2:
                    continue
                out = p.ring.zero
                for monom, coeff in p.terms():
                    e = monom[idx]
                    if e >= 2:
                        m = list(monom)
                        m[idx] = e % 2
                        term = p.ring.from_dict({tuple(m): coeff})
                        out += term * rhs ** (e // 2)
                        changed = True
                    else:
                        out += p.ring.from_dict({monom: coeff})
                p = out
        return p

    def _derationalize(self, num, den):
        """Multiply by conjugates until den is free of quadratic generators.

        Processed in reverse declaration order so that replacement
        polynomials (which only involve earlier generators) cannot
        reintroduce a generator already cleared.
        """
        for g in reversed(self.generators):
            if g.square_rhs is None:
                continue
            idx = self._index[g.name]
            gv = self._ring.gens[idx]
            if den.degree(gv) < 1:
                continue
            # den = a + b*g with a, b free of g
            b = den.diff(gv)  # degree <= 1, so this is the coefficient of g
            a = den - b * gv
            conj = a - b * gv
            den = self._reduce_poly(den * conj)
            num = self._reduce_poly(num * conj)
            if not den:
                raise ExprError(
                    f"zero divisor met while clearing {g.name!r} from a denominator; "
                    "the relation ideal is not prime"
                )
        return num, den

    # -- admissible point sampling ----------------------------------------

    def sample_point(self, rng: random.Random, max_tries: int = 200) -> Dict[str, Fraction]:
        """Random rational point satisfying all generator relations exactly.

        Trig pairs are sampled from rational circle points.  A root or
        custom generator whose relation right-hand side is a rational
        square gets the rational root; otherwise its value is adjoined
        formally in a quadratic extension of QQ (a :class:`_PointAlgebra`
        element), which keeps evaluation exact.
        """
        for _ in range(max_tries):
            point: Dict[str, object] = {}
            alg: Optional[_PointAlgebra] = None
            for x in self.coordinates:
                point[x] = Fraction(rng.randint(2, 19), rng.randint(1, 7))
            ok = True
            for g in self.generators:
                if g.kind == "sin":
                    t = Fraction(rng.randint(1, 9), rng.randint(1, 9))
                    point[g.name] = 2 * t / (1 + t * t)
                    point[g.partner] = (1 - t * t) / (1 + t * t)
                elif g.kind == "cos":
                    continue  # set together with its sine
                else:
                    partial = {v: Fraction(0) for v in self.var_names}
                    partial.update(point)
                    try:
                        q = _eval_pair(self, (g.square_rhs._num, g.square_rhs._den), partial)
                    except PoleError:
                        ok = False
                        break
                    r = _rational_sqrt(q) if isinstance(q, Fraction) else None
                    if r is not None:
                        point[g.name] = r
                    else:
                        if alg is None:
                            alg = _PointAlgebra()
                        point[g.name] = alg.adjoin(q)
            if ok:
                return point
        raise ExprError("failed to sample an admissible point")

    def _check_pool(self, k: int, rng: Optional[random.Random] = None) -> List[Dict[str, Fraction]]:
        if rng is None:
            rng = random.Random(0x5EED)
        while len(self._sample_pool) < k:
            self._sample_pool.append(self.sample_point(rng))
        return self._sample_pool[:k]


class _PointAlgebra:
    """Quotient algebra QQ[t_1..t_k]/(t_i^2 - a_i) for one sample point.

    Root generators whose radicand is not a rational square at the
    point take values here; zero-checking by evaluation stays sound in
    any commutative QQ-algebra satisfying the relations.  ``squares[i]``
    is a Fraction or an element over the earlier generators.
    """

    def __init__(self):
        self.squares: List = []

    def adjoin(self, square) -> "_AlgNum":
        self.squares.append(square)
        return _AlgNum(self, {1 << (len(self.squares) - 1): Fraction(1)})

    def const(self, q: Fraction) -> "_AlgNum":
        return _AlgNum(self, {0: Fraction(q)} if q else {})


class _AlgNum:
    """Element of a :class:`_PointAlgebra`, sparse over square-free monomials."""

    __slots__ = ("alg", "coeffs")

    def __init__(self, alg: _PointAlgebra, coeffs: Dict[int, Fraction]):
        self.alg = alg
        self.coeffs = {m: c for m, c in coeffs.items() if c}

    def _coerce(self, other) -> "_AlgNum":
        if isinstance(other, _AlgNum):
            return other
        if isinstance(other, (int, Fraction)):
            return self.alg.const(Fraction(other))
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        out = dict(self.coeffs)
        for m, c in o.coeffs.items():
            out[m] = out.get(m, Fraction(0)) + c
        return _AlgNum(self.alg, out)

    __radd__ = __add__

    def __neg__(self):
        return _AlgNum(self.alg, {m: -c for m, c in self.coeffs.items()})

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return -(self - other)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        total = self.alg.const(Fraction(0))
        for m1, c1 in self.coeffs.items():
            for m2, c2 in o.coeffs.items():
                term = _AlgNum(self.alg, {m1 ^ m2: c1 * c2})
                common = m1 & m2
                i = 0
                while common >> i:
                    if (common >> i) & 1:
                        sq = self.alg.squares[i]
                        term = term * sq if isinstance(sq, _AlgNum) \
                            else _AlgNum(self.alg, {m: c * sq for m, c in term.coeffs.items()})
                    i += 1
                total = total + term
        return total

    __rmul__ = __mul__

    def __pow__(self, k: int):
        out = self.alg.const(Fraction(1))
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self.coeffs == o.coeffs

    def __bool__(self):
        return bool(self.coeffs)

    def as_fraction(self) -> Optional[Fraction]:
        if not self.coeffs:
            return Fraction(0)
        if set(self.coeffs) == {0}:
            return self.coeffs[0]
        return None

    def inverse(self) -> "_AlgNum":
        """Inverse by solving the multiplication operator; raises
        ZeroDivisionError on zero divisors."""
        from . import _linalg

        k = len(self.alg.squares)
        masks = list(range(1 << k))
        cols = []
        for m in masks:
            prod = self * _AlgNum(self.alg, {m: Fraction(1)})
            cols.append([prod.coeffs.get(r, Fraction(0)) for r in masks])
        rows = [[cols[c][r] for c in range(len(masks))] for r in range(len(masks))]
        rhs = [Fraction(1 if m == 0 else 0) for m in masks]
        sol = _linalg.solve(rows, rhs)
        if sol is None:
            raise ZeroDivisionError("element is a zero divisor in the point algebra")
        return _AlgNum(self.alg, dict(zip(masks, sol)))

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        return self._coerce(other) * self.inverse()

    def __repr__(self):
        return f"_AlgNum({self.coeffs})"


def _rational_sqrt(q: Fraction) -> Optional[Fraction]:
    if q < 0:
        return None
    rn, rd = _isqrt(q.numerator), _isqrt(q.denominator)
    if rn is None or rd is None:
        return None
    return Fraction(rn, rd)


def _isqrt(n: int) -> Optional[int]:
    import math

    r = math.isqrt(n)
    return r if r * r == n else None


class Expr:
    """Normal-form element of the chart's differential field.

    Immutable.  Construction always normalizes: both polynomials are
    reduced modulo the relation ideal, the denominator is cleared of
    quadratic generators, the gcd is cancelled and the denominator made
    monic.  Field-equal expressions therefore share a representation.
    """

    __slots__ = ("chart", "_num", "_den", "_raw")

    def __init__(self, chart: Chart, num, den, raw=None):
        if num.ring is not chart._ring:
            num = chart._lift(num, len(num.ring.gens))
        if den.ring is not chart._ring:
            den = chart._lift(den, len(den.ring.gens))
        self.chart = chart
        # keep the pre-normalization pair for the evaluation cross-check
        self._raw = raw if raw is not None else (num, den)
        num = chart._reduce_poly(num)
        den = chart._reduce_poly(den)
        if not den:
            raise DivisionByZero("division by an expression that reduces to zero")
        if num:
            num, den = chart._derationalize(num, den)
            g = num.gcd(den)
            if not g.is_one:
                num = num.exquo(g)
                den = den.exquo(g)
        else:
            den = chart._ring.one
        lc = den.LC
        if lc != 1:
            inv = _qq(Fraction(1) / _fr(lc))
            num = num.mul_ground(inv)
            den = den.mul_ground(inv)
        self._num = num
        self._den = den

    # -- basics -----------------------------------------------------------

    def normalize(self) -> "Expr":
        """Idempotent by construction; returns self."""
        return self

    def is_zero(self, cross_check: bool = True) -> bool:
        """True iff the reduced numerator is the zero polynomial.

        The verdict is cross-checked by evaluating the pre-normalization
        representation at admissible rational points; disagreement
        raises :class:`KernelInconsistency`.
        """
        verdict = not self._num
        if cross_check and verdict:
            checked = 0
            for point in self.chart._check_pool(6):
                try:
                    v = _eval_pair(self.chart, self._raw, point)
                except PoleError:
                    continue
                if v != 0:
                    raise KernelInconsistency(
                        "reduction reports zero but evaluation is nonzero; kernel bug"
                    )
                checked += 1
                if checked >= 2:
                    break
        return verdict

    def is_one(self) -> bool:
        return self._num == self._den

    def is_constant(self) -> bool:
        return self._den.is_one and (not self._num or self._num.is_ground)

    def as_fraction(self) -> Fraction:
        if not self.is_constant():
            raise ExprError("expression is not a rational constant")
        if not self._num:
            return Fraction(0)
        return _fr(self._num.LC)

    def equals(self, other) -> bool:
        other = self.chart.expr(other)
        return (self - other).is_zero()

    # -- arithmetic -------------------------------------------------------

    def _coerce(self, other) -> "Expr":
        if isinstance(other, Expr):
            return self.chart.expr(other)
        if isinstance(other, (int, Fraction)):
            return self.chart.const(other)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        n1, d1 = self.chart._current(self)
        n2, d2 = self.chart._current(o)
        return Expr(self.chart, n1 * d2 + n2 * d1, d1 * d2)

    __radd__ = __add__

    def __neg__(self):
        n, d = self.chart._current(self)
        return Expr(self.chart, -n, d)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return -(self - other)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        n1, d1 = self.chart._current(self)
        n2, d2 = self.chart._current(o)
        return Expr(self.chart, n1 * n2, d1 * d2)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        if o.is_zero(cross_check=False):
            raise DivisionByZero("division by an expression that reduces to zero")
        n1, d1 = self.chart._current(self)
        n2, d2 = self.chart._current(o)
        return Expr(self.chart, n1 * d2, d1 * n2)

    def __rtruediv__(self, other):
        return self._coerce(other) / self

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.chart.one() / self ** (-k)
        n, d = self.chart._current(self)
        return Expr(self.chart, n ** k, d ** k)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self.chart.const(other)
        if not isinstance(other, Expr):
            return NotImplemented
        return self._num == other._num and self._den == other._den

    def __hash__(self):
        return hash((id(self.chart), tuple(sorted(self._num.to_dict().items())),
                     tuple(sorted(self._den.to_dict().items()))))

    # -- calculus ---------------------------------------------------------

    def differentiate(self, coordinate: str) -> "Expr":
        """Formal partial derivative using the generator derivative rules."""
        ch = self.chart
        if coordinate not in ch.coordinates:
            raise ExprError(f"{coordinate!r} is not a coordinate of this chart")
        n, d = ch._current(self)
        dn = _poly_total_derivative(ch, n, coordinate)
        if d.is_one:
            return dn
        dd = _poly_total_derivative(ch, d, coordinate)
        num_part = Expr(ch, n, ch._ring.one)
        den_expr = Expr(ch, d, ch._ring.one)
        return (dn * den_expr - num_part * dd) / (den_expr * den_expr)

    def evaluate(self, point: Mapping[str, Rational]) -> Fraction:
        """Exact value at a rational point satisfying all relations."""
        pt = {k: v if isinstance(v, _AlgNum) else Fraction(v) for k, v in point.items()}
        _check_relations(self.chart, pt)
        return _eval_pair(self.chart, (self._num, self._den), pt)

    # -- display ----------------------------------------------------------

    def __repr__(self):
        if self._den.is_one:
            return str(self._num)
        return f"({self._num})/({self._den})"


def _check_relations(chart: Chart, point: Mapping[str, Fraction]):
    missing = [v for v in chart.var_names if v not in point]
    if missing:
        raise ExprError(f"point missing values for {missing}")
    for g in chart.generators:
        if g.square_rhs is None:
            continue
        rhs = _eval_pair(chart, (g.square_rhs._num, g.square_rhs._den), point)
        if point[g.name] ** 2 != rhs:
            raise RelationViolation(f"relation of generator {g.name!r} violated at the point")


def _eval_pair(chart: Chart, pair, point: Mapping[str, object]):
    """Value of num/den at the point; Fraction, or _AlgNum for points
    carrying formal square roots."""
    num, den = pair
    names = [str(g) for g in num.ring.symbols]
    vals = [point[n] for n in names]
    if all(isinstance(v, Fraction) for v in vals):
        subs = [(num.ring.gens[i], _qq(v)) for i, v in enumerate(vals)]
        dv = den.evaluate(subs) if not den.is_one else 1
        if dv == 0:
            raise PoleError("denominator vanishes at the point")
        nv = num.evaluate(subs) if num else 0
        if nv == 0:
            return Fraction(0)
        return _fr(nv) / (_fr(dv) if dv != 1 else Fraction(1))
    dv = _eval_poly(den, vals)
    nv = _eval_poly(num, vals)
    try:
        res = nv / dv if dv != 1 else nv
    except ZeroDivisionError:
        raise PoleError("denominator vanishes at the point")
    if isinstance(dv, Fraction) and dv == 0:
        raise PoleError("denominator vanishes at the point")
    if isinstance(res, _AlgNum):
        fr = res.as_fraction()
        if fr is not None:
            return fr
    return res


def _eval_poly(p, vals):
    total = Fraction(0)
    for monom, coeff in p.to_dict().items():
        term = _fr(coeff)
        for i, e in enumerate(monom):
            if e:
                term = term * vals[i] ** e
        total = total + term
    return total


def _poly_total_derivative(chart: Chart, p, coordinate: str) -> Expr:
    """d/dx of a polynomial, chaining through generator rules."""
    result = chart.zero()
    ring = chart._ring
    for i, name in enumerate(chart.var_names):
        gv = ring.gens[i]
        partial = p.diff(gv)
        if not partial:
            continue
        rule = _var_derivative(chart, name, coordinate)
        if rule is None or rule.is_zero(cross_check=False):
            continue
        result = result + Expr(chart, partial, ring.one) * rule
    return result


def _var_derivative(chart: Chart, var: str, coordinate: str) -> Optional[Expr]:
    if var in chart.coordinates:
        return chart.one() if var == coordinate else None
    g = chart._gens_by_name[var]
    if g.kind == "sin":
        angle = var[len("sin_"):]
        return chart.var(g.partner) if angle == coordinate else None
    if g.kind == "cos":
        angle = var[len("cos_"):]
        return -chart.var(g.partner) if angle == coordinate else None
    if g.kind == "root":
        dq = g.square_rhs.differentiate(coordinate)
        if dq.is_zero(cross_check=False):
            return None
        return dq / (2 * chart.var(var))
    return g.derivatives.get(coordinate)


# -- exact square roots ----------------------------------------------------


def exact_sqrt(e: Expr) -> Optional[Expr]:
    """Square root within the field, or None if not expressible.

    Handles rational-square content, even-multiplicity polynomial
    factors, and odd factors matching a quadratic generator's relation
    right-hand side (e.g. 1 - cos^2 = sin^2).
    """
    ch = e.chart
    if e.is_zero(cross_check=False):
        return ch.zero()
    # sqrt(n/d) = sqrt(n*d)/d
    n, d = ch._current(e)
    target = ch._reduce_poly(n * d)
    root = _poly_sqrt(ch, target)
    if root is None:
        return None
    return root / Expr(ch, d, ch._ring.one)


def _poly_sqrt(ch: Chart, p) -> Optional[Expr]:
    from sympy import factor_list, Rational as SymRational
    from sympy import symbols as _symbols

    if not p:
        return ch.zero()
    syms = _symbols(" ".join(ch.var_names)) if len(ch.var_names) > 1 else (_symbols(ch.var_names[0]),)
    sp_expr = p.as_expr(*syms)
    const, factors = factor_list(sp_expr)
    root = ch.one()
    odd = []
    c = Fraction(const.p, const.q)
    for f, mult in factors:
        fe = parse_expr(ch, str(f))
        mult = int(mult)
        if mult // 2:
            root = root * fe ** (mult // 2)
        if mult % 2:
            odd.append(fe)
    # try to divide the odd product by generator relation right-hand sides
    rem = ch.one()
    for fe in odd:
        rem = rem * fe
    progress = True
    while progress and not rem.is_constant():
        progress = False
        for g in ch.generators:
            if g.square_rhs is None or g.square_rhs.is_constant():
                continue
            q = rem / g.square_rhs
            if q._den.is_one and (q * g.square_rhs - rem).is_zero(cross_check=False):
                rem = q
                root = root * ch.var(g.name)
                progress = True
                break
    if not rem.is_constant():
        return None
    c = c * rem.as_fraction()
    if c < 0:
        return None
    rc = _rational_sqrt(c)
    if rc is None:
        return None
    return root * ch.const(rc)


# -- parsing ---------------------------------------------------------------

_ALLOWED_CALLS = ("sin", "cos", "sqrt")


def parse_expr(chart: Chart, source: str) -> Expr:
    """Parse ordinary infix notation into an Expr.

    Supports integers, rationals via '/', the chart's variable names,
    ``sin(angle)``/``cos(angle)`` for declared trig pairs, ``sqrt`` of
    perfect squares, '^' or '**' for integer powers.
    """
    text = source.replace("^", "**")
    try:
        tree = ast.parse(text, mode="eval")
    except SyntaxError as exc:
        raise ExprParseError(f"syntax error: {exc.msg}", exc.lineno or 1, exc.offset or 0)

    def conv(node) -> Expr:
        if isinstance(node, ast.Expression):
            return conv(node.body)
        if isinstance(node, ast.Constant):
            if isinstance(node.value, int):
                return chart.const(node.value)
            raise ExprParseError(
                f"only integer literals allowed, got {node.value!r}",
                node.lineno, node.col_offset)
        if isinstance(node, ast.Name):
            if node.id in chart._index:
                return chart.var(node.id)
            raise ExprParseError(f"unknown variable {node.id!r}", node.lineno, node.col_offset)
        if isinstance(node, ast.UnaryOp):
            if isinstance(node.op, ast.USub):
                return -conv(node.operand)
            if isinstance(node.op, ast.UAdd):
                return conv(node.operand)
            raise ExprParseError("unsupported unary operator", node.lineno, node.col_offset)
        if isinstance(node, ast.BinOp):
            if isinstance(node.op, ast.Pow):
                if not (isinstance(node.right, ast.Constant) and isinstance(node.right.value, int)) \
                        and not (isinstance(node.right, ast.UnaryOp)
                                 and isinstance(node.right.operand, ast.Constant)):
                    raise ExprParseError("exponent must be an integer literal",
                                         node.lineno, node.col_offset)
                exp_node = node.right
                if isinstance(exp_node, ast.UnaryOp):
                    k = -exp_node.operand.value
                else:
                    k = exp_node.value
                return conv(node.left) ** k
            left, right = conv(node.left), conv(node.right)
            if isinstance(node.op, ast.Add):
                return left + right
            if isinstance(node.op, ast.Sub):
                return left - right
            if isinstance(node.op, ast.Mult):
                return left * right
            if isinstance(node.op, ast.Div):
                try:
                    return left / right
                except DivisionByZero:
                    raise ExprParseError("division by zero", node.lineno, node.col_offset)
            raise ExprParseError("unsupported operator", node.lineno, node.col_offset)
        if isinstance(node, ast.Call):
            if not isinstance(node.func, ast.Name) or node.func.id not in _ALLOWED_CALLS:
                raise ExprParseError("unsupported function call", node.lineno, node.col_offset)
            fname = node.func.id
            if len(node.args) != 1 or node.keywords:
                raise ExprParseError(f"{fname} takes one argument", node.lineno, node.col_offset)
            if fname in ("sin", "cos"):
                arg = node.args[0]
                if not isinstance(arg, ast.Name):
                    raise ExprParseError(f"{fname} argument must be a coordinate",
                                         node.lineno, node.col_offset)
                try:
                    s, c = chart.trig_pair(arg.id)
                except ExprError as exc:
                    raise ExprParseError(str(exc), node.lineno, node.col_offset)
                return s if fname == "sin" else c
            root = exact_sqrt(conv(node.args[0]))
            if root is None:
                raise ExprParseError(
                    "sqrt argument is not a perfect square in the field; "
                    "declare a root generator instead", node.lineno, node.col_offset)
            return root
        raise ExprParseError(f"unsupported syntax node {type(node).__name__}",
                             getattr(node, "lineno", 1), getattr(node, "col_offset", 0))

    return conv(tree)
