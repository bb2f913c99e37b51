"""
The algebra of partial differential operators with rational coefficients.

An operator is a finite sum of coefficient * monomial in D1..Dn with the
coefficients written on the left. Composition follows the Leibniz rule
Di o f = f Di + f_xi. Functions of the form r(x, z) exp(x1 z1 + ... + xn zn)
are carried by ExpFunction so operators can be applied to eigenfunctions.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from math import comb
from types import MappingProxyType
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

from errors import (
    DimensionExceeded,
    DimensionMismatch,
    IndexOutOfRange,
    NonCommutingOperators,
    NonConstantInput,
    NotDifferential,
    OrderTooHigh,
    ZeroDivisor,
)
from poly_core import (
    Coefficient,
    MultiPoly,
    RatFun,
    VarClass,
    as_ratfun,
    format_poly,
    mu_var,
    universe,
    x_var,
    z_var,
)

logger = logging.getLogger(__name__)

DMono = Tuple[int, ...]
NEG_INF = float("-inf")


def grlex_key(mono: DMono) -> Tuple[int, DMono]:
    """Sort key for D-monomials; larger key means larger in grlex with D1 > D2 > ..."""
    return (sum(mono), mono)


def unit_mono(dim: int, i: int) -> DMono:
    return tuple(1 if k == i - 1 else 0 for k in range(dim))


class DiffOp:
    """Immutable differential operator in dim variables"""

    __slots__ = ("dim", "terms")

    def __init__(self, dim: int, terms: Optional[Mapping[DMono, Coefficient]] = None):
        if dim < 1:
            raise DimensionMismatch(f"Operator dimension must be positive, got {dim}")
        if dim > universe().max_dim:
            raise DimensionExceeded(f"Dimension {dim} exceeds PDO_MAX_DIM={universe().max_dim}")
        clean: Dict[DMono, RatFun] = {}
        for mono, coeff in (terms or {}).items():
            if len(mono) != dim or any(e < 0 for e in mono):
                raise DimensionMismatch(f"Monomial {mono} does not fit dimension {dim}")
            c = as_ratfun(coeff)
            if not c.is_zero:
                clean[tuple(mono)] = c
        object.__setattr__(self, "dim", dim)
        object.__setattr__(self, "terms", MappingProxyType(clean))

    def __setattr__(self, name, value):
        raise AttributeError(f"DiffOp is immutable; cannot set {name!r}")

    def __reduce__(self):
        return DiffOp, (self.dim, dict(self.terms))

    # --- constructors ---

    @classmethod
    def zero(cls, dim: int) -> DiffOp:
        return cls(dim)

    @classmethod
    def one(cls, dim: int) -> DiffOp:
        return cls(dim, {(0,) * dim: RatFun.one()})

    @classmethod
    def function(cls, dim: int, coeff: Coefficient) -> DiffOp:
        """Multiplication by a function (an order zero operator)"""
        return cls(dim, {(0,) * dim: coeff})

    @classmethod
    def d(cls, dim: int, i: int) -> DiffOp:
        if not 1 <= i <= dim:
            raise IndexOutOfRange(f"D{i} is outside dimension {dim}")
        return cls(dim, {unit_mono(dim, i): RatFun.one()})

    @classmethod
    def x(cls, dim: int, i: int) -> DiffOp:
        if not 1 <= i <= dim:
            raise IndexOutOfRange(f"x{i} is outside dimension {dim}")
        return cls.function(dim, RatFun.var(x_var(i)))

    # --- inspection ---

    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def order(self) -> Union[int, float]:
        if not self.terms:
            return NEG_INF
        return max(sum(mono) for mono in self.terms)

    def sorted_terms(self) -> List[Tuple[DMono, RatFun]]:
        """Terms in descending grlex order of their D-monomials"""
        return sorted(self.terms.items(), key=lambda item: grlex_key(item[0]), reverse=True)

    def leading_term(self) -> Tuple[DMono, RatFun]:
        if not self.terms:
            raise ZeroDivisor("The zero operator has no leading term")
        mono = max(self.terms, key=grlex_key)
        return mono, self.terms[mono]

    def coefficient(self, mono: DMono) -> RatFun:
        return self.terms.get(tuple(mono), RatFun.zero())

    def involves(self, *classes: VarClass) -> bool:
        return any(c.involves(*classes) for c in self.terms.values())

    def map_coefficients(self, fn) -> DiffOp:
        return DiffOp(self.dim, {mono: fn(c) for mono, c in self.terms.items()})

    # --- arithmetic ---

    def _coerce(self, other) -> Optional[DiffOp]:
        if isinstance(other, DiffOp):
            _check_dims(self, other)
            return other
        if isinstance(other, (RatFun, MultiPoly, int, Fraction)):
            return DiffOp.function(self.dim, other)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        terms = dict(self.terms)
        for mono, c in o.terms.items():
            terms[mono] = terms[mono] + c if mono in terms else c
        return DiffOp(self.dim, terms)

    __radd__ = __add__

    def __neg__(self) -> DiffOp:
        return DiffOp(self.dim, {mono: -c for mono, c in self.terms.items()})

    def __sub__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is None else self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is None else o + (-self)

    def __mul__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is None else compose(self, o)

    def __rmul__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is None else compose(o, self)

    def __pow__(self, exponent: int) -> DiffOp:
        return power(self, exponent)

    def __eq__(self, other) -> bool:
        if isinstance(other, (RatFun, MultiPoly, int, Fraction)):
            other = DiffOp.function(self.dim, other)
        if not isinstance(other, DiffOp):
            return NotImplemented
        return self.dim == other.dim and dict(self.terms) == dict(other.terms)

    def __hash__(self) -> int:
        return hash((self.dim, frozenset(self.terms.items())))

    def __str__(self) -> str:
        return format_diffop(self)

    def __repr__(self) -> str:
        return f"DiffOp(dim={self.dim}, {format_diffop(self)})"


def _check_dims(a: DiffOp, b: DiffOp) -> None:
    if a.dim != b.dim:
        raise DimensionMismatch(f"Operators of dimension {a.dim} and {b.dim} do not compose")


# --- printing ---

def format_dmono(mono: DMono) -> str:
    factors = []
    for i, e in enumerate(mono, start=1):
        if e == 1:
            factors.append(f"D{i}")
        elif e > 1:
            factors.append(f"D{i}^{e}")
    return "*".join(factors)


def _is_negative(c: RatFun) -> bool:
    return c.num.leading_coefficient() < 0


def format_ratfun(c: RatFun) -> str:
    """Printed form that the expression grammar reads back"""
    num, den = c.num, c.den
    num_text = format_poly(num)
    if den == 1:
        return num_text
    den_text = format_poly(den)
    if len(num) > 1:
        num_text = f"({num_text})"
    if len(den) > 1 or "*" in den_text or "/" in den_text:
        den_text = f"({den_text})"
    return f"{num_text}/{den_text}"


def format_diffop(op: DiffOp) -> str:
    """Canonical text: '(coefficient) D-monomial' terms in descending grlex order"""
    if op.is_zero:
        return "0"
    pieces = []
    for mono, c in op.sorted_terms():
        negative = _is_negative(c)
        mag = -c if negative else c
        mono_text = format_dmono(mono)
        if not mono_text:
            body = format_ratfun(mag)
            if negative and mag.den == 1 and len(mag.num) > 1:
                body = f"({body})"
        elif mag.is_one:
            body = mono_text
        else:
            body = f"({format_ratfun(mag)}) {mono_text}"
        pieces.append((negative, body))
    negative, body = pieces[0]
    text = ("-" if negative else "") + body
    for negative, body in pieces[1:]:
        text += f" {'-' if negative else '+'} {body}"
    return text


# --- composition ---

def _multinomial(alpha: DMono, gamma: DMono) -> int:
    out = 1
    for a, g in zip(alpha, gamma):
        out *= comb(a, g)
    return out


class _DerivativeCache:
    """x-derivatives of one coefficient, memoized by multi-index"""

    def __init__(self, base: RatFun):
        self.cache: Dict[DMono, RatFun] = {}
        self.base = base

    def get(self, gamma: DMono) -> RatFun:
        if gamma in self.cache:
            return self.cache[gamma]
        if not any(gamma):
            value = self.base
        else:
            i = next(k for k, e in enumerate(gamma) if e)
            lower = gamma[:i] + (gamma[i] - 1,) + gamma[i + 1:]
            prev = self.get(lower)
            value = prev if prev.is_zero else prev.diff(x_var(i + 1))
        self.cache[gamma] = value
        return value


def compose(a: DiffOp, b: DiffOp) -> DiffOp:
    """a o b by the Leibniz rule"""
    _check_dims(a, b)
    if a.is_zero or b.is_zero:
        return DiffOp.zero(a.dim)
    caches = {beta: _DerivativeCache(c) for beta, c in b.terms.items()}
    out: Dict[DMono, RatFun] = {}
    for alpha, ca in a.terms.items():
        for gamma in product(*(range(e + 1) for e in alpha)):
            weight = _multinomial(alpha, gamma)
            for beta, cache in caches.items():
                db = cache.get(gamma)
                if db.is_zero:
                    continue
                mono = tuple(al - g + be for al, g, be in zip(alpha, gamma, beta))
                term = ca * db * weight
                out[mono] = out[mono] + term if mono in out else term
    return DiffOp(a.dim, out)


def commutator(a: DiffOp, b: DiffOp) -> DiffOp:
    return compose(a, b) - compose(b, a)


def power(a: DiffOp, exponent: int) -> DiffOp:
    if exponent < 0:
        raise ValueError("Operator powers must be nonnegative")
    result = DiffOp.one(a.dim)
    base = a
    while exponent:
        if exponent & 1:
            result = compose(result, base)
        exponent >>= 1
        if exponent:
            base = compose(base, base)
    return result


def order(a: DiffOp) -> Union[int, float]:
    return a.order


def is_constant_coefficient(a: DiffOp) -> bool:
    return not a.involves(VarClass.X)


def coefficient_derivative(a: DiffOp, i: int) -> DiffOp:
    """Differentiate every coefficient by xi"""
    if not 1 <= i <= a.dim:
        raise IndexOutOfRange(f"x{i} is outside dimension {a.dim}")
    v = x_var(i)
    return a.map_coefficients(lambda c: c.diff(v))


# --- exponential functions ---

@dataclass(frozen=True)
class ExpFunction:
    """coeff(x, z) * exp(x1*z1 + ... + xn*zn)"""
    dim: int
    coeff: RatFun

    @classmethod
    def plane_wave(cls, dim: int) -> ExpFunction:
        return cls(dim, RatFun.one())

    def scale(self, c: Coefficient) -> ExpFunction:
        return ExpFunction(self.dim, self.coeff * as_ratfun(c))

    def __str__(self) -> str:
        phase = " + ".join(f"x{i}*z{i}" for i in range(1, self.dim + 1))
        return f"({format_ratfun(self.coeff)})*exp({phase})"


def _d_exp(r: RatFun, i: int) -> RatFun:
    return r.diff(x_var(i)) + RatFun.var(z_var(i)) * r


def apply(a: DiffOp, f: ExpFunction) -> ExpFunction:
    """a[f]; Di acts on the coefficient r as r_xi + zi*r"""
    if a.dim != f.dim:
        raise DimensionMismatch(f"Operator of dimension {a.dim} applied to function of dimension {f.dim}")
    actions: Dict[DMono, RatFun] = {(0,) * a.dim: f.coeff}

    def act(mono: DMono) -> RatFun:
        if mono in actions:
            return actions[mono]
        i = next(k for k, e in enumerate(mono) if e)
        lower = mono[:i] + (mono[i] - 1,) + mono[i + 1:]
        actions[mono] = _d_exp(act(lower), i + 1)
        return actions[mono]

    total = RatFun.zero()
    for mono, c in a.terms.items():
        total = total + c * act(mono)
    return ExpFunction(a.dim, total)


def z_derivative(f: ExpFunction, i: int) -> ExpFunction:
    if not 1 <= i <= f.dim:
        raise IndexOutOfRange(f"z{i} is outside dimension {f.dim}")
    r = f.coeff
    return ExpFunction(f.dim, r.diff(z_var(i)) + RatFun.var(x_var(i)) * r)


# --- division and conjugation ---

def _divides(small: DMono, big: DMono) -> bool:
    return all(s <= b for s, b in zip(small, big))


def right_divide(a: DiffOp, k: DiffOp) -> Tuple[DiffOp, DiffOp]:
    """
    Right division with remainder: a = q o k + r.

    Leading terms of the residual are cancelled from the top of the grlex
    order down; a leading monomial that is not a multiple of the leading
    monomial of k moves to the remainder.
    """
    _check_dims(a, k)
    if k.is_zero:
        raise ZeroDivisor("Right division by the zero operator")
    k_mono, k_coeff = k.leading_term()
    quotient: Dict[DMono, RatFun] = {}
    remainder: Dict[DMono, RatFun] = {}
    residual = a
    while not residual.is_zero:
        mono, c = residual.leading_term()
        if _divides(k_mono, mono):
            shift = tuple(m - s for m, s in zip(mono, k_mono))
            q = c / k_coeff
            quotient[shift] = quotient[shift] + q if shift in quotient else q
            residual = residual - compose(DiffOp(a.dim, {shift: q}), k)
        else:
            remainder[mono] = c
            residual = DiffOp(a.dim, {m: v for m, v in residual.terms.items() if m != mono})
    return DiffOp(a.dim, quotient), DiffOp(a.dim, remainder)


def conjugate_through(p: DiffOp, k: DiffOp, ansatz_order: int) -> DiffOp:
    """
    The operator L with L o k = k o p, when it is differential.

    Raises NotDifferential when k o p is not right divisible by k or the
    quotient has order above ansatz_order.
    """
    _check_dims(p, k)
    if k.is_zero:
        raise ZeroDivisor("Conjugation by the zero operator")
    if not p.is_zero and ansatz_order < p.order:
        raise OrderTooHigh(f"Ansatz order {ansatz_order} is below the order {p.order} of the operator")
    quotient, remainder = right_divide(compose(k, p), k)
    if not remainder.is_zero:
        logger.debug("conjugation leaves remainder %s", remainder)
        raise NotDifferential(f"{k} o ({p}) o ({k})^-1 is not a differential operator")
    if not quotient.is_zero and quotient.order > ansatz_order:
        raise NotDifferential(f"Conjugate has order {quotient.order} above the ansatz order {ansatz_order}")
    return quotient


# --- polynomials in commuting operators ---

def check_commuting(ops: Sequence[DiffOp]) -> None:
    for i in range(len(ops)):
        for j in range(i + 1, len(ops)):
            if not commutator(ops[i], ops[j]).is_zero:
                raise NonCommutingOperators(f"Operators {i + 1} and {j + 1} do not commute")


def eval_poly_at_operators(p: MultiPoly, ops: Sequence[DiffOp]) -> DiffOp:
    """
    Substitute ops[i-1] for mu_i in p.

    Monomials become L1^a1 o L2^a2 o ... with the remaining coefficient (which
    may involve x and parameters) multiplied on the left.
    """
    if not ops:
        raise DimensionMismatch("No operators to substitute")
    dim = ops[0].dim
    for op in ops:
        _check_dims(ops[0], op)
    used = [v.index for v in p.variables() if v.cls == VarClass.MU]
    if used and max(used) > len(ops):
        raise DimensionMismatch(f"Polynomial uses mu{max(used)} but only {len(ops)} operators were given")
    check_commuting(ops)
    powers: Dict[Tuple[int, int], DiffOp] = {}

    def op_power(i: int, e: int) -> DiffOp:
        if (i, e) not in powers:
            powers[(i, e)] = power(ops[i - 1], e)
        return powers[(i, e)]

    total = DiffOp.zero(dim)
    for key, coeff in sorted(p.collect([VarClass.MU]).items()):
        term = DiffOp.function(dim, coeff)
        for v, e in key:
            term = compose(term, op_power(v.index, e))
        total = total + term
    return total


def mu_shift(op: DiffOp, i: int) -> DiffOp:
    """op - mu_i"""
    return op - MultiPoly.var(mu_var(i))


# --- symbols ---

def symbol(a: DiffOp) -> MultiPoly:
    """Di -> zi for a constant-coefficient operator"""
    if not is_constant_coefficient(a):
        raise NonConstantInput(f"{a} does not have constant coefficients")
    terms = []
    for mono, c in a.terms.items():
        if not c.is_polynomial:
            raise NonConstantInput(f"Coefficient {c} is not polynomial in the parameters")
        exps = {z_var(i): e for i, e in enumerate(mono, start=1) if e}
        for cexps, cc in c.as_poly().terms():
            merged = dict(exps)
            merged.update(cexps)
            terms.append((merged, cc))
    return MultiPoly.from_terms(terms)


def from_symbol(q: MultiPoly, dim: int) -> DiffOp:
    """zi -> Di; the inverse of symbol"""
    out: Dict[DMono, RatFun] = {}
    for key, coeff in q.collect([VarClass.Z]).items():
        mono = [0] * dim
        for v, e in key:
            if v.index > dim:
                raise IndexOutOfRange(f"{v.name} is outside dimension {dim}")
            mono[v.index - 1] = e
        out[tuple(mono)] = RatFun.from_poly(coeff)
    return DiffOp(dim, out)


def top_degree_form(q: MultiPoly, variables: Iterable) -> MultiPoly:
    """Sum of the terms of q of maximal total degree in the given variables"""
    variables = set(variables)
    degrees = [(sum(e for v, e in exps.items() if v in variables), exps, c) for exps, c in q.terms()]
    if not degrees:
        return q
    top = max(d for d, _, _ in degrees)
    return MultiPoly.from_terms((exps, c) for d, exps, c in degrees if d == top)
