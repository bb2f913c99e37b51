import pickle
import random
from fractions import Fraction

import pytest

from errors import DimensionMismatch, MalformedIdeal, ZeroDivisor
from generators import random_matrix, random_poly, rank_deficient_matrix
from poly_core import (
    GAMMA,
    LAMBDA,
    InexactDivision,
    MultiPoly,
    RatFun,
    VarClass,
    bareiss_det,
    clear_row_denominators,
    independence_rank,
    matrix_rank_over_fraction_field,
    mu_var,
    poly_gcd,
    poly_lcm,
    reduce_mod_binomial,
    specialize,
    sylvester_resultant,
    var_from_name,
    x_var,
    z_var,
)

x1, x2 = MultiPoly.var(x_var(1)), MultiPoly.var(x_var(2))
z1, z2 = MultiPoly.var(z_var(1)), MultiPoly.var(z_var(2))
mu1, mu2 = MultiPoly.var(mu_var(1)), MultiPoly.var(mu_var(2))
lam = MultiPoly.var(LAMBDA)


def test_variable_names():
    assert x_var(1).name == "x1"
    assert mu_var(3).name == "mu3"
    assert LAMBDA.name == "lambda"
    assert GAMMA.name == "gamma"
    assert var_from_name("mu2") == mu_var(2)
    assert var_from_name("gamma") == GAMMA


def test_variable_order_by_class_then_index():
    assert LAMBDA < GAMMA < x_var(1) < x_var(2) < z_var(1) < mu_var(1)


def test_canonical_text():
    assert str((x1 + 1) ** 2) == "x1^2 + 2*x1 + 1"
    assert str(MultiPoly.const(Fraction(1, 2)) * x1 - 3) == "1/2*x1 - 3"
    assert str(MultiPoly.zero()) == "0"
    assert str(-x1 * x2) == "-x1*x2"


def test_arithmetic_with_scalars():
    p = 2 * x1 + Fraction(1, 3)
    assert p - Fraction(1, 3) == 2 * x1
    assert 1 - x1 == -(x1 - 1)
    assert (x1 * x2).degree() == 2
    assert (x1 ** 3 * x2).degree(x_var(1)) == 3
    assert MultiPoly.zero().degree() == -1


def test_exact_quotient():
    p = (x1 + 1) * (x2 - 2)
    assert p.exquo(x1 + 1) == x2 - 2
    assert (x1 + 1).divides(p)
    assert not (x1 + 2).divides(p)
    with pytest.raises(InexactDivision):
        p.exquo(x1 + 2)
    with pytest.raises(ZeroDivisor):
        p.exquo(MultiPoly.zero())


def test_gcd_is_primitive_with_positive_leading_coefficient():
    a = 6 * (x1 + 1) * (x2 - 1)
    b = -4 * (x1 + 1) * (x2 + 3)
    assert poly_gcd(a, b) == x1 + 1
    assert poly_gcd(MultiPoly.zero(), -2 * x1) == x1
    assert poly_gcd(MultiPoly.zero(), MultiPoly.zero()).is_zero
    assert poly_gcd(x1, x2) == 1


def test_lcm():
    assert poly_lcm(x1 * (x2 + 1), x1 ** 2) == x1 ** 2 * (x2 + 1)


def test_normalized_clears_denominators():
    p = MultiPoly.const(Fraction(-2, 3)) * x1 + Fraction(4, 9)
    assert p.normalized() == 3 * x1 - 2
    assert p.content() == Fraction(2, 9)


def test_collect_by_class():
    p = x1 * z1 + 2 * z1 + x2
    groups = p.collect([VarClass.Z])
    assert groups[((z_var(1), 1),)] == x1 + 2
    assert groups[()] == x2


def test_involves():
    p = x1 * mu1 + lam
    assert p.involves(VarClass.X)
    assert p.involves(VarClass.MU)
    assert not p.involves(VarClass.Z)
    assert p.involves_var(LAMBDA)


def test_evaluate_and_specialize():
    assert (x1 + 2 * x2).evaluate({x_var(1): 1, x_var(2): Fraction(1, 2)}) == 2
    assert specialize(lam * z1 + lam, {LAMBDA: 2}) == 2 * z1 + 2
    assert (x1 * x2).subs({x_var(2): x1 + 1}) == x1 ** 2 + x1


def test_reduce_mod_binomial():
    u, v = z_var(1), z_var(2)
    assert reduce_mod_binomial(z1 ** 2 * z2, u, v, lam) == lam * z1
    assert reduce_mod_binomial(z1 * (z1 * z2 - lam), u, v, lam).is_zero
    assert not reduce_mod_binomial((z1 * z2 - 1) * z1 + 1, u, v, MultiPoly.one()).is_zero
    with pytest.raises(MalformedIdeal):
        reduce_mod_binomial(z1, u, v, z1 + 1)


def test_ratfun_lowest_terms():
    r = RatFun.from_parts(x1 ** 2 - 1, x1 - 1)
    assert r.is_polynomial
    assert r.as_poly() == x1 + 1
    s = RatFun.from_parts(x1, -2 * x2)
    assert s.den == x2
    assert s.num == MultiPoly.const(Fraction(-1, 2)) * x1
    with pytest.raises(ZeroDivisor):
        RatFun.from_parts(x1, MultiPoly.zero())


def test_ratfun_arithmetic_and_derivative():
    r = 1 / RatFun.from_poly(x1)
    assert r.diff(x_var(1)) == -1 / RatFun.from_poly(x1 ** 2)
    assert r * x1 == 1
    assert (r + r).num == 2
    assert RatFun.var(x_var(2)).diff(x_var(1)).is_zero


def test_values_survive_pickling():
    p = MultiPoly.const(Fraction(3, 7)) * x1 ** 2 * mu1 - lam
    r = RatFun.from_parts(p, x2 + 1)
    assert pickle.loads(pickle.dumps(p)) == p
    assert pickle.loads(pickle.dumps(r)) == r


def test_bareiss_small_determinants():
    assert bareiss_det([[x1, MultiPoly.one()], [MultiPoly.one(), x2]]) == x1 * x2 - 1
    one, zero = MultiPoly.one(), MultiPoly.zero()
    assert bareiss_det([[zero, one, zero], [one, zero, zero], [zero, zero, x1]]) == -x1
    assert bareiss_det([[x1, x2], [2 * x1, 2 * x2]]).is_zero
    assert bareiss_det([]) == 1
    with pytest.raises(DimensionMismatch):
        bareiss_det([[x1, x2]])


def test_bareiss_matches_cofactor_expansion():
    rng = random.Random(7)
    variables = [x_var(1), x_var(2), mu_var(1)]
    m = [[random_poly(rng, variables, 2, 2) for _ in range(3)] for _ in range(3)]
    expected = (
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    )
    assert bareiss_det(m) == expected


def test_rank_over_fraction_field():
    assert matrix_rank_over_fraction_field([[x1, x2], [x1 ** 2, x1 * x2]], seed=1) == 1
    assert matrix_rank_over_fraction_field([[x1, MultiPoly.one()], [MultiPoly.one(), x1]], seed=1) == 2
    zero = MultiPoly.zero()
    assert matrix_rank_over_fraction_field([[zero, zero], [zero, zero]], seed=1) == 0


def test_rank_of_product_is_bounded_by_inner_size():
    rng = random.Random(6)
    m = rank_deficient_matrix(rng, 4, 5, 2, [x_var(1), x_var(2), mu_var(1)])
    rank = matrix_rank_over_fraction_field(m, seed=1)
    assert rank <= 2
    assert rank == matrix_rank_over_fraction_field(m, seed=2)
    assert bareiss_det([row[:3] for row in m[:3]]).is_zero


def test_rank_of_rational_rows():
    r = RatFun.from_parts(MultiPoly.one(), x1)
    assert matrix_rank_over_fraction_field([[r, RatFun.one()], [RatFun.one(), RatFun.from_poly(x1)]], seed=3) == 1


def test_clear_row_denominators():
    row = [RatFun.from_parts(MultiPoly.one(), x1), RatFun.from_parts(MultiPoly.one(), x2), RatFun.zero()]
    cleared, factor = clear_row_denominators(row)
    assert factor == x1 * x2
    assert cleared == [x2, x1, MultiPoly.zero()]


def test_independence_rank():
    cube = (z1 * z2 - lam) ** 3
    assert independence_rank([z1 ** i * cube for i in range(4)], [VarClass.Z]) == 4
    assert independence_rank([cube, 2 * cube], [VarClass.Z]) == 1


def test_sylvester_resultant_of_the_ordinary_pair():
    res = sylvester_resultant(z1 ** 2 - mu1, z1 ** 3 - mu2, z_var(1))
    assert res.normalized() == mu1 ** 3 - mu2 ** 2


VARIABLES = [x_var(1), x_var(2), z_var(1), mu_var(1), LAMBDA]


def test_ring_axioms_on_random_polynomials():
    rng = random.Random(101)
    for _ in range(20):
        a, b, c = (random_poly(rng, VARIABLES, 3, 4) for _ in range(3))
        assert a + b == b + a
        assert a * b == b * a
        assert (a + b) + c == a + (b + c)
        assert (a * b) * c == a * (b * c)
        assert a * (b + c) == a * b + a * c
        assert a + MultiPoly.zero() == a
        assert a * MultiPoly.one() == a
        assert (a - a).is_zero


def _laplace_det(m):
    if len(m) == 1:
        return m[0][0]
    total = MultiPoly.zero()
    for j, entry in enumerate(m[0]):
        minor = [row[:j] + row[j + 1:] for row in m[1:]]
        term = entry * _laplace_det(minor)
        total = total + term if j % 2 == 0 else total - term
    return total


@pytest.mark.parametrize("size", [1, 2, 3, 4, 5])
def test_bareiss_matches_laplace_expansion(size):
    rng = random.Random(200 + size)
    m = random_matrix(rng, size, [x_var(1), x_var(2), mu_var(1)])
    assert bareiss_det(m) == _laplace_det(m)


def test_gcd_pulls_out_a_common_factor():
    rng = random.Random(303)
    for _ in range(15):
        a, b, c = (random_poly(rng, VARIABLES, 2, 3) for _ in range(3))
        if a.is_zero or (b.is_zero and c.is_zero):
            continue
        assert poly_gcd(a * b, a * c) == (a * poly_gcd(b, c)).normalized()


def test_reduce_mod_binomial_agrees_with_exact_division():
    rng = random.Random(404)
    u, v = z_var(1), z_var(2)
    binomial = z1 * z2 - lam
    variables = [z_var(1), z_var(2), x_var(1), LAMBDA]
    for _ in range(15):
        p, h = random_poly(rng, variables, 3, 4), random_poly(rng, variables, 2, 3)
        r = reduce_mod_binomial(p, u, v, lam)
        assert binomial.divides(p - r)
        assert reduce_mod_binomial(p + h * binomial, u, v, lam) == r
        assert reduce_mod_binomial(h * binomial, u, v, lam).is_zero
        assert r.is_zero == binomial.divides(p)
