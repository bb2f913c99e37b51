import random

import pytest

from darboux import (
    FactorizationWitness,
    SpectralConstraint,
    build_example_K,
    darboux_transform,
    default_constraint,
    isom_check,
    kernel_membership,
    normalized_eigenfunction,
    ring_element,
    rlambda_decompose,
    rlambda_membership,
    verify_factorization,
)
from errors import DegenerateLambda, DimensionMismatch, MalformedIdeal, NonConstantQ, NotInRing
from generators import random_constant_op
from operators import DiffOp, ExpFunction, apply, compose, conjugate_through, from_symbol, right_divide, symbol
from poly_core import LAMBDA, MultiPoly, RatFun, VarClass, independence_rank, x_var, z_var

u, v = MultiPoly.var(z_var(1)), MultiPoly.var(z_var(2))
lam = MultiPoly.var(LAMBDA)
cube = (u * v - lam) ** 3


def test_example_factorization():
    k, left, p = build_example_K()
    assert compose(left, k) == p
    assert verify_factorization(FactorizationWitness(p, left, k))
    assert not verify_factorization(FactorizationWitness(p, k, left))


def test_example_only_in_two_variables():
    with pytest.raises(DimensionMismatch):
        build_example_K(3)


def test_left_factor_is_the_right_quotient():
    k, left, p = build_example_K()
    quotient, remainder = right_divide(p, k)
    assert remainder.is_zero
    assert quotient == left


def test_conjugation_gives_the_darboux_transform():
    k, left, p = build_example_K()
    w = FactorizationWitness(p, left, k)
    transform = conjugate_through(p, k, 6)
    assert transform == darboux_transform(w)
    assert compose(transform, k) == compose(k, p)


def test_eigenfunction_of_example():
    k, _, _ = build_example_K()
    data = normalized_eigenfunction(k)
    x1, x2 = MultiPoly.var(x_var(1)), MultiPoly.var(x_var(2))
    assert data.sigma0 == x1 * x2
    assert data.reassemble() == apply(k, ExpFunction.plane_wave(2)).coeff
    assert data.g == 1
    assert data.psi.coeff == data.reassemble()


def test_eigenfunction_splits_off_common_factor():
    # The image of (D1 - 1) o D1 on the plane wave is (z1 - 1) z1, all in one x-monomial
    op = compose(DiffOp.d(1, 1) - 1, DiffOp.d(1, 1))
    data = normalized_eigenfunction(op)
    z = MultiPoly.var(z_var(1))
    assert data.g == z ** 2 - z
    assert data.psi.coeff == 1


def test_spectral_constraint_validation():
    assert str(default_constraint()) == "z1*z2 = lambda"
    with pytest.raises(MalformedIdeal):
        SpectralConstraint(1, 1, lam)
    with pytest.raises(MalformedIdeal):
        SpectralConstraint(1, 2, u + 1)


def test_kernel_membership_examples():
    k, _, p = build_example_K()
    assert kernel_membership(k, p)
    assert kernel_membership(k, DiffOp.one(2))
    assert not kernel_membership(k, DiffOp.d(2, 1))
    with pytest.raises(NonConstantQ):
        kernel_membership(k, DiffOp.x(2, 1))


def test_ring_element_of_member():
    k, _, p = build_example_K()
    q = from_symbol(u * cube, 2)
    assert kernel_membership(k, q)
    element = ring_element(k, q)
    assert compose(element, k) == compose(k, q)


def test_rlambda_members():
    for i in range(4):
        assert rlambda_membership(u ** i * cube)
    assert rlambda_membership(MultiPoly.const(7))
    assert not rlambda_membership(u)
    assert not rlambda_membership((u * v - 1) ** 2, 1)


def test_rlambda_is_closed_under_ring_operations():
    rng = random.Random(3)
    members = [u ** rng.randint(0, 3) * v ** rng.randint(0, 3) * cube + rng.randint(-5, 5) for _ in range(6)]
    for a in members:
        for b in members:
            assert rlambda_membership(a + b)
            assert rlambda_membership(a * b)


def test_rlambda_decompose_roundtrip():
    rng = random.Random(9)
    for _ in range(25):
        g = MultiPoly.from_terms([({z_var(1): rng.randint(0, 2), z_var(2): rng.randint(0, 2)}, rng.randint(1, 9))])
        c = MultiPoly.const(rng.randint(-9, 9))
        got_g, got_c = rlambda_decompose(g * cube + c)
        assert got_g * cube + got_c == g * cube + c
        assert got_g == g and got_c == c


def test_rlambda_decompose_at_numeric_lambda():
    q = (u * v - 2) ** 3 * v + 5
    g, c = rlambda_decompose(q, 2)
    assert g == v and c == 5


def test_rlambda_decompose_rejects_non_members():
    with pytest.raises(NotInRing):
        rlambda_decompose(u * v)


def test_degenerate_lambda():
    x2y2 = u ** 2 * v ** 2
    assert rlambda_membership(x2y2, 0)
    with pytest.raises(DegenerateLambda):
        rlambda_decompose(x2y2, 0)


def test_infinitely_many_independent_members():
    assert independence_rank([u ** i * cube for i in range(4)], [VarClass.Z]) == 4


def test_kernel_test_agrees_with_rlambda():
    rng = random.Random(21)
    for _ in range(10):
        assert isom_check(random_constant_op(rng, 2, 4))
    _, _, p = build_example_K()
    assert isom_check(p)
    assert isom_check(from_symbol(v ** 2 * cube + 1, 2))


def test_kernel_test_at_numeric_lambda():
    q = from_symbol((u * v - 1) ** 3, 2)
    assert isom_check(q, 1)
    assert isom_check(DiffOp.d(2, 2), 1)


def test_ring_closure_of_kernel_members():
    k, _, _ = build_example_K()
    a = from_symbol(u * cube, 2)
    b = from_symbol(cube + 2, 2)
    assert kernel_membership(k, a) and kernel_membership(k, b)
    assert kernel_membership(k, a + b)
    assert kernel_membership(k, compose(a, b))


@pytest.mark.parametrize("seed", [41, 42, 43, 44, 45])
def test_plane_wave_eigenvalue_is_the_symbol(seed):
    rng = random.Random(seed)
    q = random_constant_op(rng, 2, 3)
    image = apply(q, ExpFunction.plane_wave(2))
    assert image.coeff == RatFun.from_poly(symbol(q))
    assert from_symbol(symbol(q), 2) == q
