"""
Exact multivariate polynomials and rational functions over the rationals.

All values live in one shared sparse ring (sympy's ``PolyRing`` over QQ with
graded lexicographic order) whose generators are the variables the toolkit
knows about: the parameters lambda and gamma, x1..xD, z1..zD and
mu1..mu(D+1), where D is the configured maximal dimension.
"""
from __future__ import annotations

import logging
import random
from dataclasses import dataclass
from enum import IntEnum
from fractions import Fraction
from functools import lru_cache
from math import gcd as _igcd
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

from sympy import symbols as sympy_symbols
from sympy.polys.domains import QQ
from sympy.polys.euclidtools import dmp_ff_prs_gcd
from sympy.polys.fields import FracField
from sympy.polys.matrices import DomainMatrix
from sympy.polys.orderings import grlex
from sympy.polys.polyerrors import ExactQuotientFailed, HeuristicGCDFailed

from config import get_settings
from errors import DimensionExceeded, DimensionMismatch, MalformedIdeal, ZeroDivisor

logger = logging.getLogger(__name__)

Rational = Fraction
Scalar = Union[int, Fraction]


class VarClass(IntEnum):
    PARAM = 0
    X = 1
    Z = 2
    MU = 3


PARAM_NAMES = {1: "lambda", 2: "gamma"}
CLASS_PREFIX = {VarClass.X: "x", VarClass.Z: "z", VarClass.MU: "mu"}


@dataclass(frozen=True, order=True)
class VarId:
    cls: VarClass
    index: int

    def __post_init__(self):
        if self.index < 1:
            raise DimensionExceeded(f"Variable index must be positive, got {self.index}")
        if self.cls == VarClass.PARAM and self.index not in PARAM_NAMES:
            raise DimensionExceeded(f"Unknown parameter index {self.index}")

    @property
    def name(self) -> str:
        if self.cls == VarClass.PARAM:
            return PARAM_NAMES[self.index]
        return f"{CLASS_PREFIX[self.cls]}{self.index}"

    def __str__(self) -> str:
        return self.name


LAMBDA = VarId(VarClass.PARAM, 1)
GAMMA = VarId(VarClass.PARAM, 2)


def x_var(i: int) -> VarId:
    return VarId(VarClass.X, i)


def z_var(i: int) -> VarId:
    return VarId(VarClass.Z, i)


def mu_var(i: int) -> VarId:
    return VarId(VarClass.MU, i)


def var_from_name(name: str) -> VarId:
    """Inverse of VarId.name"""
    for index, pname in PARAM_NAMES.items():
        if name == pname:
            return VarId(VarClass.PARAM, index)
    for cls, prefix in sorted(CLASS_PREFIX.items(), key=lambda item: -len(item[1])):
        if name.startswith(prefix) and name[len(prefix):].isdigit():
            return VarId(cls, int(name[len(prefix):]))
    raise DimensionExceeded(f"Unknown variable name {name!r}")


class _Universe:
    """The shared ring and field plus the VarId <-> generator bookkeeping"""

    def __init__(self, max_dim: int):
        self.max_dim = max_dim
        variables = [LAMBDA, GAMMA]
        variables += [x_var(i) for i in range(1, max_dim + 1)]
        variables += [z_var(i) for i in range(1, max_dim + 1)]
        variables += [mu_var(i) for i in range(1, max_dim + 2)]
        # Generators are listed from the largest variable down so that sympy's
        # grlex tie-break (first generator most significant) matches VarId order
        self.ordered: Tuple[VarId, ...] = tuple(sorted(variables, reverse=True))
        self.position: Dict[VarId, int] = {v: i for i, v in enumerate(self.ordered)}
        syms = sympy_symbols([v.name for v in self.ordered])
        self.field = FracField(syms, QQ, grlex)
        self.ring = self.field.ring
        self.ngens = len(self.ordered)
        self.positions_by_class: Dict[VarClass, FrozenSet[int]] = {
            cls: frozenset(i for i, v in enumerate(self.ordered) if v.cls == cls)
            for cls in VarClass
        }

    def pos(self, v: VarId) -> int:
        try:
            return self.position[v]
        except KeyError:
            raise DimensionExceeded(
                f"Variable {v.name} is outside the configured ring (PDO_MAX_DIM={self.max_dim})"
            ) from None


@lru_cache(maxsize=1)
def universe() -> _Universe:
    return _Universe(get_settings().max_dim)


def _qq(value: Scalar):
    if isinstance(value, Fraction):
        return QQ(value.numerator, value.denominator)
    if isinstance(value, int):
        return QQ(value)
    raise TypeError(f"Expected an exact rational, got {type(value).__name__}")


def to_fraction(c) -> Fraction:
    return Fraction(int(c.numerator), int(c.denominator))


class InexactDivision(ArithmeticError):
    pass


class MultiPoly:
    """Sparse multivariate polynomial with rational coefficients (immutable)"""

    __slots__ = ("rep",)

    def __init__(self, rep):
        self.rep = rep

    # --- construction ---

    @classmethod
    def zero(cls) -> MultiPoly:
        return cls(universe().ring.zero)

    @classmethod
    def one(cls) -> MultiPoly:
        return cls(universe().ring.one)

    @classmethod
    def const(cls, value: Scalar) -> MultiPoly:
        return cls(universe().ring.ground_new(_qq(value)))

    @classmethod
    def var(cls, v: VarId) -> MultiPoly:
        u = universe()
        return cls(u.ring.gens[u.pos(v)])

    @classmethod
    def from_terms(cls, terms: Iterable[Tuple[Mapping[VarId, int], Scalar]]) -> MultiPoly:
        u = universe()
        data: Dict[Tuple[int, ...], object] = {}
        for exps, coeff in terms:
            monom = [0] * u.ngens
            for v, e in exps.items():
                if e < 0:
                    raise ValueError("Negative exponent in polynomial term")
                monom[u.pos(v)] += e
            key = tuple(monom)
            data[key] = data.get(key, QQ.zero) + _qq(coeff)
        return cls(u.ring.from_dict({m: c for m, c in data.items() if c}))

    # --- inspection ---

    def terms(self) -> List[Tuple[Dict[VarId, int], Fraction]]:
        """Terms in descending grlex order"""
        ordered = universe().ordered
        out = []
        for monom, coeff in self.rep.terms():
            exps = {ordered[i]: e for i, e in enumerate(monom) if e}
            out.append((exps, to_fraction(coeff)))
        return out

    def variables(self) -> FrozenSet[VarId]:
        ordered = universe().ordered
        used = set()
        for monom in self.rep.itermonoms():
            used.update(i for i, e in enumerate(monom) if e)
        return frozenset(ordered[i] for i in used)

    def involves(self, *classes: VarClass) -> bool:
        u = universe()
        wanted = set()
        for cls in classes:
            wanted |= u.positions_by_class[cls]
        return any(monom[i] for monom in self.rep.itermonoms() for i in wanted)

    def involves_var(self, v: VarId) -> bool:
        i = universe().pos(v)
        return any(monom[i] for monom in self.rep.itermonoms())

    def degree(self, v: Optional[VarId] = None) -> int:
        """Degree in v, or total degree; the zero polynomial has degree -1"""
        if self.is_zero:
            return -1
        if v is None:
            return max(sum(monom) for monom in self.rep.itermonoms())
        i = universe().pos(v)
        return max(monom[i] for monom in self.rep.itermonoms())

    @property
    def is_zero(self) -> bool:
        return not self.rep

    @property
    def is_constant(self) -> bool:
        return self.rep.is_ground

    def constant_value(self) -> Fraction:
        if not self.is_constant:
            raise ValueError(f"{self} is not a constant")
        return to_fraction(self.rep.LC) if self.rep else Fraction(0)

    def leading_coefficient(self) -> Fraction:
        return to_fraction(self.rep.LC) if self.rep else Fraction(0)

    def __len__(self) -> int:
        return len(self.rep)

    # --- arithmetic ---

    def _coerce(self, other):
        if isinstance(other, MultiPoly):
            return other.rep
        if isinstance(other, (int, Fraction)):
            return universe().ring.ground_new(_qq(other))
        return None

    def __add__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is None else MultiPoly(self.rep + o)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is None else MultiPoly(self.rep - o)

    def __rsub__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is None else MultiPoly(o - self.rep)

    def __mul__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is None else MultiPoly(self.rep * o)

    __rmul__ = __mul__

    def __neg__(self) -> MultiPoly:
        return MultiPoly(-self.rep)

    def __pow__(self, exponent: int) -> MultiPoly:
        if exponent < 0:
            raise ValueError("Negative powers are not polynomials")
        return MultiPoly(self.rep ** exponent)

    def __eq__(self, other) -> bool:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self.rep == o

    def __hash__(self) -> int:
        return hash(self.rep)

    def __bool__(self) -> bool:
        return bool(self.rep)

    def exquo(self, other: MultiPoly) -> MultiPoly:
        """Exact quotient; raises InexactDivision when other does not divide self"""
        o = self._coerce(other)
        if not o:
            raise ZeroDivisor("Division by the zero polynomial")
        try:
            return MultiPoly(self.rep.exquo(o))
        except ExactQuotientFailed:
            raise InexactDivision(f"{other} does not divide {self}") from None

    def divides(self, other: MultiPoly) -> bool:
        """True iff self divides other"""
        if self.is_zero:
            return other.is_zero
        return not other.rep.rem(self.rep)

    def diff(self, v: VarId) -> MultiPoly:
        u = universe()
        return MultiPoly(self.rep.diff(u.ring.gens[u.pos(v)]))

    def subs(self, mapping: Mapping[VarId, Union[MultiPoly, Scalar]]) -> MultiPoly:
        """Simultaneous substitution of polynomials (or rationals) for variables"""
        if not mapping:
            return self
        u = universe()
        pairs = []
        for v, value in mapping.items():
            value = value if isinstance(value, MultiPoly) else MultiPoly.const(value)
            pairs.append((u.ring.gens[u.pos(v)], value.rep))
        return MultiPoly(self.rep.compose(pairs))

    def evaluate(self, point: Mapping[VarId, Scalar]) -> Fraction:
        """Value at a point; every variable of self must be assigned"""
        u = universe()
        values = {u.pos(v): _qq(a) for v, a in point.items()}
        return to_fraction(evaluate_rep(self.rep, values))

    def collect(self, classes: Sequence[VarClass]) -> Dict[Tuple[Tuple[VarId, int], ...], MultiPoly]:
        """
        Group the terms by their monomial in the variables of the given classes.

        Returns a map from that monomial (as sorted (VarId, exponent) pairs) to
        the polynomial cofactor, which is free of those classes.
        """
        u = universe()
        chosen = set()
        for cls in classes:
            chosen |= u.positions_by_class[cls]
        groups: Dict[Tuple[Tuple[VarId, int], ...], Dict[Tuple[int, ...], object]] = {}
        for monom, coeff in self.rep.iterterms():
            key = tuple(sorted((u.ordered[i], monom[i]) for i in chosen if monom[i]))
            rest = tuple(0 if i in chosen else e for i, e in enumerate(monom))
            groups.setdefault(key, {})[rest] = coeff
        return {key: MultiPoly(u.ring.from_dict(data)) for key, data in groups.items()}

    # --- normal forms ---

    def content(self) -> Fraction:
        """Positive rational c such that self / c has coprime integer coefficients"""
        if self.is_zero:
            return Fraction(0)
        num_gcd = 0
        den_lcm = 1
        for c in self.rep.itercoeffs():
            f = to_fraction(c)
            num_gcd = _igcd(num_gcd, abs(f.numerator))
            den_lcm = den_lcm * f.denominator // _igcd(den_lcm, f.denominator)
        return Fraction(num_gcd, den_lcm)

    def normalized(self) -> MultiPoly:
        """Primitive integer-coefficient associate with positive leading coefficient"""
        if self.is_zero:
            return self
        c = self.content()
        if self.leading_coefficient() < 0:
            c = -c
        return MultiPoly(self.rep.mul_ground(_qq(1 / c)))

    def __reduce__(self):
        return (_poly_from_items, (_poly_items(self),))

    # --- text ---

    def __str__(self) -> str:
        return format_poly(self)

    def __repr__(self) -> str:
        return f"MultiPoly({format_poly(self)})"


def _poly_items(p: MultiPoly):
    return tuple(
        (tuple((v.cls.value, v.index, e) for v, e in sorted(exps.items())), c.numerator, c.denominator)
        for exps, c in p.terms()
    )


def _poly_from_items(items) -> MultiPoly:
    return MultiPoly.from_terms(
        ({VarId(VarClass(cls), index): e for cls, index, e in exps}, Fraction(num, den))
        for exps, num, den in items
    )


def evaluate_rep(rep, values: Mapping[int, object]):
    """Evaluate a raw ring element at ground values keyed by generator position"""
    total = QQ.zero
    for monom, coeff in rep.iterterms():
        term = coeff
        for i, e in enumerate(monom):
            if e:
                term *= values.get(i, QQ.zero) ** e
        total += term
    return total


def format_monomial(exps: Mapping[VarId, int]) -> str:
    factors = []
    for v in sorted(exps):
        e = exps[v]
        factors.append(v.name if e == 1 else f"{v.name}^{e}")
    return "*".join(factors)


def format_rational(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def format_poly(p: MultiPoly) -> str:
    """Canonical text: descending grlex terms, reduced rational coefficients"""
    if p.is_zero:
        return "0"
    pieces = []
    for exps, coeff in p.terms():
        sign = "-" if coeff < 0 else "+"
        mag = abs(coeff)
        mono = format_monomial(exps)
        if not mono:
            body = format_rational(mag)
        elif mag == 1:
            body = mono
        else:
            body = f"{format_rational(mag)}*{mono}"
        pieces.append((sign, body))
    first_sign, first_body = pieces[0]
    text = ("-" if first_sign == "-" else "") + first_body
    for sign, body in pieces[1:]:
        text += f" {sign} {body}"
    return text


class RatFun:
    """Quotient of two polynomials in lowest terms (immutable)"""

    __slots__ = ("rep",)

    def __init__(self, rep):
        self.rep = rep

    @classmethod
    def from_poly(cls, p: MultiPoly) -> RatFun:
        return cls(universe().field.new(p.rep))

    @classmethod
    def from_parts(cls, num: MultiPoly, den: MultiPoly) -> RatFun:
        if den.is_zero:
            raise ZeroDivisor("Rational function with zero denominator")
        return cls(universe().field.new(num.rep, den.rep))

    @classmethod
    def const(cls, value: Scalar) -> RatFun:
        return cls(universe().field.ground_new(_qq(value)))

    @classmethod
    def zero(cls) -> RatFun:
        return cls(universe().field.zero)

    @classmethod
    def one(cls) -> RatFun:
        return cls(universe().field.one)

    @classmethod
    def var(cls, v: VarId) -> RatFun:
        u = universe()
        return cls(u.field.gens[u.pos(v)])

    @property
    def num(self) -> MultiPoly:
        den = MultiPoly(self.rep.denom)
        return MultiPoly(self.rep.numer).exquo(MultiPoly.const(_den_unit(den)))

    @property
    def den(self) -> MultiPoly:
        den = MultiPoly(self.rep.denom)
        return den.normalized()

    @property
    def is_zero(self) -> bool:
        return not self.rep

    @property
    def is_one(self) -> bool:
        return self.rep == universe().field.one

    @property
    def is_polynomial(self) -> bool:
        return self.rep.denom.is_ground

    def as_poly(self) -> MultiPoly:
        if not self.is_polynomial:
            raise ValueError(f"{self} is not a polynomial")
        return self.num

    def involves(self, *classes: VarClass) -> bool:
        return MultiPoly(self.rep.numer).involves(*classes) or MultiPoly(self.rep.denom).involves(*classes)

    def variables(self) -> FrozenSet[VarId]:
        return MultiPoly(self.rep.numer).variables() | MultiPoly(self.rep.denom).variables()

    def _coerce(self, other):
        field = universe().field
        if isinstance(other, RatFun):
            return other.rep
        if isinstance(other, MultiPoly):
            return field.new(other.rep)
        if isinstance(other, (int, Fraction)):
            return field.ground_new(_qq(other))
        return None

    def __add__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is None else RatFun(self.rep + o)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is None else RatFun(self.rep - o)

    def __rsub__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is None else RatFun(o - self.rep)

    def __mul__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is None else RatFun(self.rep * o)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if not o:
            raise ZeroDivisor("Division by the zero rational function")
        return RatFun(self.rep / o)

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if not self.rep:
            raise ZeroDivisor("Division by the zero rational function")
        return RatFun(o / self.rep)

    def __neg__(self) -> RatFun:
        return RatFun(-self.rep)

    def __pow__(self, exponent: int) -> RatFun:
        if exponent < 0 and not self.rep:
            raise ZeroDivisor("Negative power of zero")
        return RatFun(self.rep ** exponent)

    def __eq__(self, other) -> bool:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self.rep == o

    def __hash__(self) -> int:
        return hash((self.rep.numer, self.rep.denom))

    def __bool__(self) -> bool:
        return bool(self.rep)

    def diff(self, v: VarId) -> RatFun:
        u = universe()
        numer, denom = self.rep.numer, self.rep.denom
        gen = u.ring.gens[u.pos(v)]
        d_numer = numer.diff(gen)
        d_denom = denom.diff(gen)
        if not d_denom:
            return RatFun(u.field.new(d_numer, denom))
        return RatFun(u.field.new(d_numer * denom - numer * d_denom, denom ** 2))

    def subs(self, mapping: Mapping[VarId, Union[MultiPoly, Scalar]]) -> RatFun:
        num = MultiPoly(self.rep.numer).subs(mapping)
        den = MultiPoly(self.rep.denom).subs(mapping)
        return RatFun.from_parts(num, den)

    def __reduce__(self):
        return (_ratfun_from_items, (_poly_items(self.num), _poly_items(self.den)))

    def __str__(self) -> str:
        num, den = self.num, self.den
        if den == 1:
            return format_poly(num)
        return f"({format_poly(num)})/({format_poly(den)})"

    def __repr__(self) -> str:
        return f"RatFun({self})"


def _den_unit(den: MultiPoly) -> Fraction:
    c = den.content()
    return -c if den.leading_coefficient() < 0 else c


def _ratfun_from_items(num_items, den_items) -> RatFun:
    return RatFun.from_parts(_poly_from_items(num_items), _poly_from_items(den_items))


Coefficient = Union[RatFun, MultiPoly, int, Fraction]


def as_ratfun(value: Coefficient) -> RatFun:
    if isinstance(value, RatFun):
        return value
    if isinstance(value, MultiPoly):
        return RatFun.from_poly(value)
    return RatFun.const(value)


# --- operations ---

def poly_arith(a: MultiPoly, b: MultiPoly, op: str) -> MultiPoly:
    """Exact ring arithmetic selected by name ('add', 'sub', 'mul')"""
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    raise ValueError(f"Unknown polynomial operation {op!r}")


def poly_gcd(a: MultiPoly, b: MultiPoly) -> MultiPoly:
    """Greatest common divisor, normalized primitive with positive leading coefficient"""
    if a.is_zero and b.is_zero:
        return MultiPoly.zero()
    if a.is_zero:
        return b.normalized()
    if b.is_zero:
        return a.normalized()
    try:
        g = MultiPoly(a.rep.gcd(b.rep))
    except HeuristicGCDFailed:
        logger.debug("heuristic gcd failed, using the PRS gcd")
        return prs_gcd(a, b)
    return g.normalized()


def prs_gcd(a: MultiPoly, b: MultiPoly) -> MultiPoly:
    """gcd by primitive remainder sequences on the dense form; slower than the heuristic, never gives up"""
    if a.is_zero and b.is_zero:
        return MultiPoly.zero()
    ring = a.rep.ring
    h, _, _ = dmp_ff_prs_gcd(a.rep.to_dense(), b.rep.to_dense(), ring.ngens - 1, ring.domain)
    return MultiPoly(ring.from_dense(h)).normalized()


def poly_lcm(a: MultiPoly, b: MultiPoly) -> MultiPoly:
    if a.is_zero or b.is_zero:
        return MultiPoly.zero()
    return (a * b).exquo(poly_gcd(a, b)).normalized()


def reduce_mod_binomial(p: MultiPoly, i: VarId, j: VarId, c: MultiPoly) -> MultiPoly:
    """
    Normal form of p modulo the ideal (v_i*v_j - c).

    Every monomial v_i^a v_j^b m is rewritten to c^min(a,b) v_i^(a-k) v_j^(b-k) m,
    so the result is zero exactly when v_i*v_j - c divides p.
    """
    if c.involves_var(i) or c.involves_var(j):
        raise MalformedIdeal(f"Right-hand side {c} involves {i.name} or {j.name}")
    u = universe()
    pi, pj = u.pos(i), u.pos(j)
    powers: Dict[int, object] = {0: u.ring.one}
    out = u.ring.zero
    for monom, coeff in p.rep.iterterms():
        k = min(monom[pi], monom[pj])
        if k not in powers:
            powers[k] = c.rep ** k
        rest = list(monom)
        rest[pi] -= k
        rest[pj] -= k
        out += u.ring.from_dict({tuple(rest): coeff}) * powers[k]
    return MultiPoly(out)


def specialize(p: MultiPoly, values: Mapping[VarId, Scalar]) -> MultiPoly:
    """Substitute rational values for some variables"""
    return p.subs({v: Fraction(a) for v, a in values.items()})


# --- matrices ---

Matrix = Sequence[Sequence[MultiPoly]]


def _pivot_cost(e) -> Tuple[int, int]:
    return (0 if e.is_ground else 1, len(e))


def _permutation_sign(order: Sequence[int]) -> int:
    sign = 1
    seen = list(order)
    for a in range(len(seen)):
        for b in range(a + 1, len(seen)):
            if seen[a] > seen[b]:
                sign = -sign
    return sign


def _bareiss(rows: List[List[object]]):
    """
    Full-pivoting fraction-free elimination on raw ring elements (in place).

    Returns (rank, last_pivot, pivot_rows, pivot_cols). Every entry after step k
    is a (k+1)x(k+1) minor of the permuted matrix, so each division by the
    previous pivot is exact.
    """
    ring = universe().ring
    m = len(rows)
    n = len(rows[0]) if m else 0
    active_rows = list(range(m))
    active_cols = list(range(n))
    pivot_rows: List[int] = []
    pivot_cols: List[int] = []
    prev = ring.one
    last = ring.one
    limit = min(m, n)
    while len(pivot_rows) < limit:
        best = None
        for r in active_rows:
            row = rows[r]
            for c in active_cols:
                e = row[c]
                if e:
                    cost = _pivot_cost(e)
                    if best is None or cost < best[0]:
                        best = (cost, r, c)
                        if cost == (0, 1):
                            break
            if best is not None and best[0] == (0, 1):
                break
        if best is None:
            break
        _, pr, pc = best
        piv = rows[pr][pc]
        active_rows.remove(pr)
        active_cols.remove(pc)
        pivot_rows.append(pr)
        pivot_cols.append(pc)
        prow = rows[pr]
        for r in active_rows:
            row = rows[r]
            factor = row[pc]
            for c in active_cols:
                val = piv * row[c]
                if factor:
                    val -= factor * prow[c]
                if prev != ring.one:
                    val = val.exquo(prev)
                row[c] = val
            row[pc] = ring.zero
        prev = piv
        last = piv
    return len(pivot_rows), last, pivot_rows, pivot_cols


def bareiss_det(m: Matrix) -> MultiPoly:
    """Exact determinant by fraction-free elimination"""
    size = len(m)
    if size == 0:
        return MultiPoly.one()
    if any(len(row) != size for row in m):
        raise DimensionMismatch("Determinant of a non-square matrix")
    rows = [[entry.rep for entry in row] for row in m]
    rank, last, pivot_rows, pivot_cols = _bareiss(rows)
    if rank < size:
        return MultiPoly.zero()
    sign = _permutation_sign(pivot_rows) * _permutation_sign(pivot_cols)
    return MultiPoly(last if sign > 0 else -last)


def clear_row_denominators(row: Sequence[Coefficient]) -> Tuple[List[MultiPoly], MultiPoly]:
    """Scale a row of rational functions to polynomials; returns (row, factor)"""
    entries = [as_ratfun(e) for e in row]
    factor = MultiPoly.one()
    for e in entries:
        if not e.is_zero:
            factor = poly_lcm(factor, e.den)
    cleared = []
    for e in entries:
        if e.is_zero:
            cleared.append(MultiPoly.zero())
        else:
            cleared.append(e.num * factor.exquo(e.den))
    return cleared, factor


def _polynomial_rows(m: Sequence[Sequence[Coefficient]]) -> List[List[MultiPoly]]:
    out = []
    for row in m:
        if all(isinstance(e, MultiPoly) for e in row):
            out.append(list(row))
        else:
            out.append(clear_row_denominators(row)[0])
    return out


def random_point(variables: Iterable[VarId], rng: random.Random, bound: int = 10 ** 6) -> Dict[VarId, Fraction]:
    point = {}
    for v in sorted(variables):
        value = 0
        while value == 0:
            value = rng.randint(-bound, bound)
        point[v] = Fraction(value)
    return point


def evaluate_rows(m: Matrix, point: Mapping[VarId, Fraction]) -> List[List[object]]:
    """Entries of m at a point, as elements of QQ"""
    u = universe()
    values = {u.pos(v): _qq(a) for v, a in point.items()}
    return [[evaluate_rep(e.rep, values) for e in row] for row in m]


def evaluate_matrix(m: Matrix, point: Mapping[VarId, Fraction]) -> DomainMatrix:
    data = evaluate_rows(m, point)
    ncols = len(m[0]) if m else 0
    return DomainMatrix(data, (len(m), ncols), QQ)


def matrix_variables(m: Matrix) -> FrozenSet[VarId]:
    used = set()
    for row in m:
        for e in row:
            used |= e.variables()
    return frozenset(used)


def matrix_rank_over_fraction_field(m: Sequence[Sequence[Coefficient]], seed: Optional[int] = None) -> int:
    """
    Rank over the field of fractions of the polynomial ring.

    The exact rank at a random rational point is a lower bound; when it is
    already min(rows, cols) it is the answer. Otherwise the rank is settled by
    exact fraction-free elimination.
    """
    rows = _polynomial_rows(m)
    if not rows or not rows[0]:
        return 0
    full = min(len(rows), len(rows[0]))
    rng = random.Random(get_settings().seed if seed is None else seed)
    point = random_point(matrix_variables(rows), rng)
    lower = evaluate_matrix(rows, point).rank()
    if lower == full:
        return lower
    logger.debug("rank %d < %d at a random point, running exact elimination", lower, full)
    raw = [[e.rep for e in row] for row in rows]
    rank, _, _, _ = _bareiss(raw)
    return rank


def independence_rank(polys: Sequence[MultiPoly], classes: Sequence[VarClass]) -> int:
    """Rank of the coefficient vectors of polys in the monomials of the given classes"""
    grouped = [p.collect(classes) for p in polys]
    keys = sorted({key for g in grouped for key in g})
    matrix = [[g.get(key, MultiPoly.zero()) for key in keys] for g in grouped]
    return matrix_rank_over_fraction_field(matrix)


def sylvester_matrix(f: MultiPoly, g: MultiPoly, v: VarId) -> List[List[MultiPoly]]:
    df, dg = f.degree(v), g.degree(v)
    fc = [_coefficient_of_power(f, v, k) for k in range(df, -1, -1)]
    gc = [_coefficient_of_power(g, v, k) for k in range(dg, -1, -1)]
    size = df + dg
    rows = []
    for shift in range(dg):
        rows.append([MultiPoly.zero()] * shift + fc + [MultiPoly.zero()] * (size - shift - len(fc)))
    for shift in range(df):
        rows.append([MultiPoly.zero()] * shift + gc + [MultiPoly.zero()] * (size - shift - len(gc)))
    return rows


def sylvester_resultant(f: MultiPoly, g: MultiPoly, v: VarId) -> MultiPoly:
    """Classical resultant of f and g with respect to v"""
    return bareiss_det(sylvester_matrix(f, g, v))


def _coefficient_of_power(p: MultiPoly, v: VarId, k: int) -> MultiPoly:
    out = []
    for exps, coeff in p.terms():
        if exps.get(v, 0) == k:
            rest = dict(exps)
            rest.pop(v, None)
            out.append((rest, coeff))
    return MultiPoly.from_terms(out)
