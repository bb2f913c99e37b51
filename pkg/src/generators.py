"""Seeded random polynomials, operators and commuting families"""
import random
from fractions import Fraction
from typing import List, Sequence, Tuple

from operators import DiffOp, eval_poly_at_operators, from_symbol
from poly_core import MultiPoly, RatFun, VarId, mu_var, x_var, z_var


def random_rational(rng: random.Random, bound: int = 5) -> Fraction:
    value = 0
    while value == 0:
        value = rng.randint(-bound, bound)
    return Fraction(value, rng.choice([1, 1, 1, 2, 3]))


def random_poly(rng: random.Random, variables: Sequence[VarId], degree: int, terms: int = 3) -> MultiPoly:
    out = []
    for _ in range(terms):
        exps = {}
        budget = rng.randint(0, degree)
        for _ in range(budget):
            v = rng.choice(list(variables))
            exps[v] = exps.get(v, 0) + 1
        out.append((exps, random_rational(rng)))
    return MultiPoly.from_terms(out)


def random_diffop(rng: random.Random, dim: int, max_order: int, x_degree: int = 1,
                  terms: int = 3, rational: bool = False) -> DiffOp:
    """Operator with polynomial (optionally rational) coefficients in x"""
    xs = [x_var(i) for i in range(1, dim + 1)]
    out = {}
    for _ in range(terms):
        order = rng.randint(0, max_order)
        mono = [0] * dim
        for _ in range(order):
            mono[rng.randrange(dim)] += 1
        coeff = RatFun.from_poly(random_poly(rng, xs, x_degree, 2))
        if rational and rng.random() < 0.3:
            coeff = coeff / (MultiPoly.var(rng.choice(xs)) + rng.randint(1, 3))
        out[tuple(mono)] = coeff
    return DiffOp(dim, out)


def random_constant_op(rng: random.Random, dim: int, degree: int, terms: int = 4) -> DiffOp:
    zs = [z_var(i) for i in range(1, dim + 1)]
    q = random_poly(rng, zs, degree, terms)
    return from_symbol(q, dim)


def random_mu_poly(rng: random.Random, count: int, degree: int, terms: int = 3) -> MultiPoly:
    return random_poly(rng, [mu_var(i) for i in range(1, count + 1)], degree, terms)


def commuting_pair() -> Tuple[DiffOp, DiffOp]:
    """D1^2 - D2^2 and x2 D1 + x1 D2"""
    a = DiffOp(2, {(2, 0): 1, (0, 2): -1})
    b = DiffOp(2, {(1, 0): RatFun.var(x_var(2)), (0, 1): RatFun.var(x_var(1))})
    return a, b


def commuting_triple(rng: random.Random, degree: int = 2) -> Tuple[List[DiffOp], MultiPoly]:
    """
    (A, B, q(A, B)) for the commuting pair and a random q in mu1, mu2 of
    positive order; returns the triple and q.
    """
    a, b = commuting_pair()
    while True:
        q = random_mu_poly(rng, 2, degree)
        c = eval_poly_at_operators(q, [a, b])
        if not c.is_zero and c.order > 0:
            return [a, b, c], q


def random_matrix(rng: random.Random, size: int, variables: Sequence[VarId], degree: int = 1) -> List[List[MultiPoly]]:
    return [[random_poly(rng, variables, degree, 2) for _ in range(size)] for _ in range(size)]


def rank_deficient_matrix(rng: random.Random, rows: int, cols: int, rank: int,
                          variables: Sequence[VarId]) -> List[List[MultiPoly]]:
    """rows x cols product of random rows x rank and rank x cols factors"""
    left = [[random_poly(rng, variables, 1, 2) for _ in range(rank)] for _ in range(rows)]
    right = [[random_poly(rng, variables, 1, 2) for _ in range(cols)] for _ in range(rank)]
    out = []
    for r in range(rows):
        row = []
        for c in range(cols):
            entry = MultiPoly.zero()
            for k in range(rank):
                entry = entry + left[r][k] * right[k][c]
            row.append(entry)
        out.append(row)
    return out

