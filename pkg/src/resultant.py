"""
The mu-shifted differential resultant of n+1 operators in n variables.

Each operator Li of order li contributes the rows v_N(w o (Li - mu_i)) for
every monic D-monomial w of degree at most N - li, where N = -n + sum(li).
The resultant is the gcd of the maximal minors of that matrix; it vanishes
identically when the matrix is rank deficient.
"""
from __future__ import annotations

import logging
import random
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from itertools import product
from math import comb, gcd as igcd
from typing import Callable, Iterator, List, Optional, Sequence, Tuple

from sympy.polys.domains import QQ
from sympy.polys.matrices import DomainMatrix

from config import get_settings
from errors import (
    DimensionMismatch,
    InvariantViolation,
    NegativeN,
    NonConstantInput,
    OrderTooHigh,
    SingularMinor,
    TooWide,
    UsageError,
    ZeroOperator,
)
from minor_pool import Selection, minor_determinants
from operators import (
    DiffOp,
    DMono,
    compose,
    eval_poly_at_operators,
    grlex_key,
    is_constant_coefficient,
    mu_shift,
    symbol,
    top_degree_form,
)
from poly_core import (
    MultiPoly,
    RatFun,
    VarClass,
    bareiss_det,
    clear_row_denominators,
    evaluate_rows,
    matrix_rank_over_fraction_field,
    matrix_variables,
    poly_gcd,
    poly_lcm,
    random_point,
    z_var,
)

logger = logging.getLogger(__name__)

ProgressCallback = Callable[[int, int, int], None]


# --- bases and coefficient vectors ---

@dataclass(frozen=True)
class MonomialBasis:
    n: int
    d: int
    entries: Tuple[DMono, ...]

    def __len__(self) -> int:
        return len(self.entries)

    def index(self, mono: DMono) -> int:
        return self.entries.index(mono)


def omega_basis(n: int, d: int) -> MonomialBasis:
    """All D-monomials of degree <= d in descending grlex order"""
    if n < 1:
        raise DimensionMismatch(f"Dimension must be positive, got {n}")
    if d < 0:
        return MonomialBasis(n, d, ())
    monos = [m for m in product(range(d + 1), repeat=n) if sum(m) <= d]
    monos.sort(key=grlex_key, reverse=True)
    return MonomialBasis(n, d, tuple(monos))


def coeff_vector(l: DiffOp, d: int) -> List[RatFun]:
    if not l.is_zero and l.order > d:
        raise OrderTooHigh(f"Operator of order {l.order} does not fit degree {d}")
    basis = omega_basis(l.dim, d)
    return [l.coefficient(mono) for mono in basis.entries]


def from_coeff_vector(vector: Sequence[RatFun], basis: MonomialBasis) -> DiffOp:
    return DiffOp(basis.n, dict(zip(basis.entries, vector)))


# --- the matrix ---

@dataclass
class ResultantMatrix:
    n: int
    operators: List[DiffOp]
    N: int
    columns: MonomialBasis
    rows: List[List[MultiPoly]]
    row_factors: List[MultiPoly]
    row_provenance: List[Tuple[int, int]]

    @property
    def shape(self) -> Tuple[int, int]:
        return len(self.rows), len(self.columns)

    def row_operator(self, r: int) -> DiffOp:
        """The operator w_j o (L_i - mu_i) that row r was built from"""
        factor = self.row_factors[r]
        vector = [RatFun.from_parts(e, factor) for e in self.rows[r]]
        return from_coeff_vector(vector, self.columns)

    def generator(self, r: int) -> DiffOp:
        i, j = self.row_provenance[r]
        shift = omega_basis(self.n, self.N - self.operators[i - 1].order).entries[j - 1]
        return compose(DiffOp(self.n, {shift: 1}), mu_shift(self.operators[i - 1], i))


def build_resultant_matrix(ops: Sequence[DiffOp], n: int) -> ResultantMatrix:
    if len(ops) != n + 1:
        raise DimensionMismatch(f"Expected {n + 1} operators in dimension {n}, got {len(ops)}")
    for i, op in enumerate(ops, start=1):
        if op.dim != n:
            raise DimensionMismatch(f"Operator {i} has dimension {op.dim}, expected {n}")
        if op.is_zero:
            raise ZeroOperator(f"Operator {i} is zero")
    N = -n + sum(op.order for op in ops)
    if N < 0:
        raise NegativeN(f"N = {N} is negative for operators of orders {[op.order for op in ops]}")
    columns = omega_basis(n, N)
    rows, factors, provenance = [], [], []
    for i, op in enumerate(ops, start=1):
        shifted = mu_shift(op, i)
        for j, mono in enumerate(omega_basis(n, N - op.order).entries, start=1):
            generator = compose(DiffOp(n, {mono: 1}), shifted)
            cleared, factor = clear_row_denominators(coeff_vector(generator, N))
            rows.append(cleared)
            factors.append(factor)
            provenance.append((i, j))
    logger.info("resultant matrix %dx%d with N=%d", len(rows), len(columns), N)
    return ResultantMatrix(n, list(ops), N, columns, rows, factors, provenance)


def zero_columns(m: ResultantMatrix) -> List[DMono]:
    """Basis monomials whose column is identically zero"""
    return [
        mono for c, mono in enumerate(m.columns.entries)
        if all(row[c].is_zero for row in m.rows)
    ]


# --- minor selections ---

def minor_count(rows: int, cols: int) -> int:
    return comb(rows, cols) if rows >= cols else 0


def _young_rows(rows: int, cols: int, shape: Sequence[int]) -> Selection:
    return tuple(rows - cols + i - part for i, part in enumerate(shape))


def young_row_selections(rows: int, cols: int) -> Iterator[Selection]:
    """
    Every cols-subset of range(rows), listed by Young diagrams.

    A diagram is a nonincreasing sequence (l1, ..., l_cols) with l1 = k for
    k = 0..rows-cols; it selects rows rows-cols+i-l_i.
    """
    if rows < cols:
        raise TooWide(f"Matrix with {rows} rows and {cols} columns has no maximal minors")

    def extend(shape: List[int]) -> Iterator[List[int]]:
        if len(shape) == cols:
            yield shape
            return
        for part in range(shape[-1] + 1):
            yield from extend(shape + [part])

    if cols == 0:
        yield ()
        return
    for k in range(rows - cols + 1):
        for shape in extend([k]):
            yield _young_rows(rows, cols, shape)


def random_young_selection(rows: int, cols: int, rng: random.Random) -> Selection:
    shape = sorted((rng.randrange(rows - cols + 1) for _ in range(cols)), reverse=True)
    return _young_rows(rows, cols, shape)


class ModeKind(str, Enum):
    EXHAUSTIVE = "exhaustive"
    SAMPLED = "sampled"
    RANK_ONLY = "rank-only"


@dataclass(frozen=True)
class ResultantMode:
    kind: ModeKind = ModeKind.EXHAUSTIVE
    k: int = 0
    seed: Optional[int] = None

    @classmethod
    def parse(cls, text: str, seed: Optional[int] = None) -> ResultantMode:
        """'exhaustive' or 'sampled:k'"""
        if text == ModeKind.EXHAUSTIVE.value:
            return cls(ModeKind.EXHAUSTIVE, seed=seed)
        if text.startswith("sampled:"):
            try:
                k = int(text.split(":", 1)[1])
            except ValueError:
                k = 0
            if k < 1:
                raise UsageError(f"Sampled mode needs a positive count, got {text!r}")
            return cls(ModeKind.SAMPLED, k, seed)
        raise UsageError(f"Unknown resultant mode {text!r}")

    def __str__(self) -> str:
        return f"sampled:{self.k}" if self.kind == ModeKind.SAMPLED else self.kind.value


def _numeric_rows(m: ResultantMatrix, rng: random.Random):
    point = random_point(matrix_variables(m.rows), rng)
    return evaluate_rows(m.rows, point)


def sampled_selections(m: ResultantMatrix, k: int, seed: Optional[int] = None) -> List[Selection]:
    """
    Up to k distinct random Young selections whose minor is nonzero at a
    random rational point, hence a nonzero polynomial.
    """
    rows, cols = m.shape
    if rows < cols:
        raise TooWide(f"Matrix with {rows} rows and {cols} columns has no maximal minors")
    settings = get_settings()
    rng = random.Random(settings.seed if seed is None else seed)
    numeric = _numeric_rows(m, rng)
    chosen: List[Selection] = []
    seen = set()
    for _ in range(k * settings.sample_attempts):
        if len(chosen) == k:
            break
        selection = random_young_selection(rows, cols, rng)
        if selection in seen:
            continue
        seen.add(selection)
        sub = DomainMatrix([[numeric[r][c] for c in range(cols)] for r in selection], (cols, cols), QQ)
        if sub.det():
            chosen.append(selection)
    if len(chosen) < k:
        logger.warning("found %d of %d nonzero minors after %d draws", len(chosen), k, k * settings.sample_attempts)
    return chosen


def _true_minor(det: MultiPoly, selection: Selection, m: ResultantMatrix) -> Tuple[MultiPoly, MultiPoly]:
    """
    The minor of the uncleared matrix as a reduced fraction (numerator,
    denominator): det divided by the product of the row clearing factors.
    """
    factor = MultiPoly.one()
    for r in selection:
        factor = factor * m.row_factors[r]
    if det.is_zero or factor == 1:
        return det, MultiPoly.one()
    minor = RatFun.from_parts(det, factor)
    return minor.num, minor.den


def _true_minors(
    m: ResultantMatrix,
    mode: ResultantMode,
    workers: Optional[int] = None,
) -> Iterator[Tuple[Selection, MultiPoly, MultiPoly]]:
    rows, cols = m.shape
    if rows < cols:
        raise TooWide(f"Matrix with {rows} rows and {cols} columns has no maximal minors")
    if mode.kind == ModeKind.SAMPLED:
        selections = sampled_selections(m, mode.k, mode.seed)
    else:
        selections = list(young_row_selections(rows, cols))
    workers = get_settings().workers if workers is None else workers
    for selection, det in zip(selections, minor_determinants(m.rows, selections, workers)):
        num, den = _true_minor(det, selection, m)
        yield selection, num, den


def partial_resultants(
    m: ResultantMatrix,
    mode: ResultantMode = ResultantMode(),
    workers: Optional[int] = None,
) -> Iterator[Tuple[Selection, MultiPoly]]:
    """
    Stream (selection, minor) pairs; sampled mode only yields nonzero minors.

    Each minor is the numerator of the reduced fraction; the x-denominators
    are collected by differential_resultant into content_den.
    """
    for selection, num, _ in _true_minors(m, mode, workers):
        yield selection, num


# --- the resultant ---

class OutcomeKind(str, Enum):
    ZERO = "zero"
    POLY = "poly"
    NONZERO = "nonzero"


@dataclass
class ResultantOutcome:
    kind: OutcomeKind
    value: MultiPoly
    minors_examined: int
    mode: str
    rank: int
    shape: Tuple[int, int]
    content: MultiPoly = field(default_factory=MultiPoly.one)
    # lcm of the x-denominators left in the minors; the removed unit is content / content_den
    content_den: MultiPoly = field(default_factory=MultiPoly.one)
    x_dependent: bool = False
    zero_columns: List[DMono] = field(default_factory=list)


def mu_primitive_part(p: MultiPoly) -> Tuple[MultiPoly, MultiPoly]:
    """Split p into (content, primitive part) as a polynomial in mu"""
    if p.is_zero:
        return MultiPoly.one(), p
    content = MultiPoly.zero()
    for coeff in p.collect([VarClass.MU]).values():
        content = poly_gcd(content, coeff)
    return content, p.exquo(content).normalized()


def differential_resultant(
    ops: Sequence[DiffOp],
    mode: ResultantMode = ResultantMode(),
    workers: Optional[int] = None,
    on_progress: Optional[ProgressCallback] = None,
) -> ResultantOutcome:
    """
    gcd of the maximal minors, after a rank test for the zero resultant.

    In sampled mode the value is the gcd of a subset of the minors, so it is
    a multiple of the true resultant.
    """
    if not ops:
        raise DimensionMismatch("No operators given")
    n = ops[0].dim
    m = build_resultant_matrix(ops, n)
    rows, cols = m.shape
    if rows < cols:
        raise TooWide(f"Matrix with {rows} rows and {cols} columns has no maximal minors")
    seed = get_settings().seed if mode.seed is None else mode.seed
    rank = matrix_rank_over_fraction_field(m.rows, seed=seed)
    zeros = zero_columns(m)
    if rank < cols:
        logger.info("rank %d < %d columns: the resultant is zero", rank, cols)
        return ResultantOutcome(OutcomeKind.ZERO, MultiPoly.zero(), 0, str(mode), rank, (rows, cols),
                                zero_columns=zeros)
    if mode.kind == ModeKind.RANK_ONLY:
        return ResultantOutcome(OutcomeKind.NONZERO, MultiPoly.zero(), 0, str(mode), rank, (rows, cols))

    total = mode.k if mode.kind == ModeKind.SAMPLED else minor_count(rows, cols)
    g = MultiPoly.zero()
    den = MultiPoly.one()
    examined = 0
    for _, minor, minor_den in _true_minors(m, mode, workers):
        examined += 1
        if not minor.is_zero and minor_den != 1:
            den = poly_lcm(den, minor_den)
        # g only shrinks, so a minor it already divides changes nothing
        if not minor.is_zero and (g.is_zero or not g.divides(minor)):
            g = poly_gcd(g, minor)
        if on_progress is not None:
            on_progress(examined, total, g.degree())
        if examined % 100 == 0:
            logger.debug("%d/%d minors, gcd degree %d", examined, total, g.degree())
    if g.is_zero:
        # Full rank guarantees a nonzero minor; only sampling can miss them all
        if mode.kind == ModeKind.EXHAUSTIVE:
            raise InvariantViolation("Full-rank matrix produced only zero minors")
        return ResultantOutcome(OutcomeKind.NONZERO, g, examined, str(mode), rank, (rows, cols))
    content, value = mu_primitive_part(g)
    return ResultantOutcome(
        OutcomeKind.POLY, value, examined, str(mode), rank, (rows, cols),
        content=content, content_den=den,
        x_dependent=content.involves(VarClass.X) or den.involves(VarClass.X),
    )


# --- consequences of a nonzero minor ---

def dform_decomposition(m: ResultantMatrix, row_selection: Sequence[int]) -> Tuple[List[DiffOp], MultiPoly]:
    """
    Operators D1..D(n+1) with sum Di o (Li - mu_i) = det of the selected
    (row-cleared) minor.

    Cofactors are taken down the order-zero column; row r contributes its
    cofactor times its clearing factor times its shift monomial to D_i.
    """
    rows, cols = m.shape
    selection = tuple(row_selection)
    if len(selection) != cols or len(set(selection)) != cols or not all(0 <= r < rows for r in selection):
        raise DimensionMismatch(f"A maximal minor needs {cols} distinct rows out of {rows}")
    minor = [m.rows[r] for r in selection]
    det = bareiss_det(minor)
    if det.is_zero:
        raise SingularMinor(f"Rows {list(selection)} give a zero minor")
    last = cols - 1
    ds = [DiffOp.zero(m.n) for _ in m.operators]
    for pos, r in enumerate(selection):
        sub = [row[:last] for k, row in enumerate(minor) if k != pos]
        cofactor = bareiss_det(sub)
        if (pos + last) % 2:
            cofactor = -cofactor
        if cofactor.is_zero:
            continue
        i, j = m.row_provenance[r]
        shift = omega_basis(m.n, m.N - m.operators[i - 1].order).entries[j - 1]
        ds[i - 1] = ds[i - 1] + DiffOp(m.n, {shift: RatFun.from_poly(cofactor * m.row_factors[r])})
    check = DiffOp.zero(m.n)
    for i, (d, op) in enumerate(zip(ds, m.operators), start=1):
        check = check + compose(d, mu_shift(op, i))
    if check != DiffOp.function(m.n, det):
        raise InvariantViolation("Cofactor decomposition does not reproduce the minor")
    return ds, det


def verify_annihilation(p: MultiPoly, ops: Sequence[DiffOp]) -> bool:
    """True iff p(L1, ..., L(n+1)) = 0"""
    if p.is_zero:
        return True
    return eval_poly_at_operators(p, ops).is_zero


def homogenized_symbols(ops: Sequence[DiffOp]) -> List[MultiPoly]:
    """Top-degree forms of the symbols: the homogenized symbols on the hyperplane at infinity"""
    forms = []
    for i, op in enumerate(ops, start=1):
        if not is_constant_coefficient(op):
            raise NonConstantInput(f"Operator {i} does not have constant coefficients")
        s = symbol(op)
        zvars = [z_var(k) for k in range(1, op.dim + 1)]
        forms.append(top_degree_form(s, zvars))
    return forms


def homogenized_symbol_zero_check(ops: Sequence[DiffOp], height: Optional[int] = None) -> List[Tuple[int, ...]]:
    """
    Primitive integer points (a1, ..., an, 0) with |ai| <= height that are
    common zeros of the homogenized symbols of the shifted operators, for
    every value of mu.
    """
    forms = homogenized_symbols(ops)
    if not ops:
        return []
    n = ops[0].dim
    height = get_settings().search_height if height is None else height
    # An order zero operator's shifted symbol keeps mu on the hyperplane at infinity
    if any(op.order == 0 for op in ops):
        return []
    zeros = []
    for point in product(range(-height, height + 1), repeat=n):
        nonzero = [a for a in point if a]
        if not nonzero or nonzero[0] < 0:
            continue
        g = 0
        for a in nonzero:
            g = igcd(g, abs(a))
        if g != 1:
            continue
        values = {z_var(k): Fraction(a) for k, a in enumerate(point, start=1)}
        if all(form.subs(values).is_zero for form in forms):
            zeros.append(tuple(point) + (0,))
    zeros.sort(reverse=True)
    return zeros


@dataclass
class SearchHit:
    trial: int
    q: MultiPoly
    outcome: ResultantOutcome


def x_content_search(trials: int, seed: Optional[int] = None, k: int = 2,
                     degree: int = 2) -> List[SearchHit]:
    """
    Sampled resultants of commuting triples (A, B, q(A, B)) built from the
    commuting pair, with the x-content of each reported. Asserts nothing.
    """
    from generators import commuting_triple

    rng = random.Random(get_settings().seed if seed is None else seed)
    hits = []
    for trial in range(1, trials + 1):
        ops, q = commuting_triple(rng, degree)
        outcome = differential_resultant(ops, ResultantMode(ModeKind.SAMPLED, k, rng.randrange(2 ** 32)))
        if outcome.x_dependent:
            logger.warning("trial %d: resultant content %s depends on x", trial, outcome.content)
        hits.append(SearchHit(trial, q, outcome))
    return hits
