import random

from generators import random_poly
from poly_core import LAMBDA, MultiPoly, mu_var, poly_gcd, prs_gcd, x_var, z_var

x1, x2 = MultiPoly.var(x_var(1)), MultiPoly.var(x_var(2))
mu1 = MultiPoly.var(mu_var(1))
lam = MultiPoly.var(LAMBDA)


def test_common_factor():
    a = (x1 + 1) ** 2 * (x2 - x1)
    b = 3 * (x1 + 1) * (x2 + x1) * mu1
    assert prs_gcd(a, b) == x1 + 1


def test_coprime_inputs():
    assert prs_gcd(x1 ** 2 + x2, x1 - x2) == 1
    assert prs_gcd(x1, MultiPoly.const(5)) == 1


def test_zero_operand():
    assert prs_gcd(MultiPoly.zero(), -2 * x1 * x2) == x1 * x2
    assert prs_gcd(MultiPoly.zero(), MultiPoly.zero()).is_zero


def test_content_in_other_variables():
    # part of the gcd sits in the content with respect to the main variable
    a = (lam + 1) * (mu1 * x1 + lam)
    b = (lam + 1) * (lam - 2) * mu1
    assert prs_gcd(a, b) == lam + 1


def test_agrees_with_ring_gcd():
    rng = random.Random(11)
    variables = [x_var(1), x_var(2), z_var(1), LAMBDA]
    for _ in range(8):
        a, b, c = (random_poly(rng, variables, 2, 3) for _ in range(3))
        if c.is_zero:
            continue
        g = prs_gcd(a * c, b * c)
        assert g == poly_gcd(a * c, b * c)
        assert c.divides(g)
