import random
from itertools import combinations

import pytest

from errors import DimensionMismatch, NegativeN, NonConstantInput, OrderTooHigh, SingularMinor, UsageError
from generators import commuting_triple, random_diffop, random_poly
from operators import DiffOp, compose, mu_shift
from poly_core import MultiPoly, RatFun, VarClass, mu_var, x_var
from resultant import (
    ModeKind,
    OutcomeKind,
    ResultantMode,
    build_resultant_matrix,
    coeff_vector,
    differential_resultant,
    dform_decomposition,
    homogenized_symbol_zero_check,
    minor_count,
    mu_primitive_part,
    omega_basis,
    partial_resultants,
    sampled_selections,
    verify_annihilation,
    x_content_search,
    young_row_selections,
    zero_columns,
)
from worked_examples import (
    ordinary_oracle,
    ordinary_pair,
    positive_relation,
    positive_quoted_resultant,
    positive_resultant,
    positive_triple,
    zero_triple,
    zero_triple_printed_relation,
    zero_triple_relation,
)

mu1, mu2 = MultiPoly.var(mu_var(1)), MultiPoly.var(mu_var(2))


def test_omega_basis_order():
    assert omega_basis(2, 2).entries == ((2, 0), (1, 1), (0, 2), (1, 0), (0, 1), (0, 0))
    assert len(omega_basis(2, 6)) == 28
    assert len(omega_basis(3, -1)) == 0


def test_coeff_vector():
    op = DiffOp(2, {(1, 0): 3, (0, 0): RatFun.var(x_var(1))})
    assert coeff_vector(op, 1) == [RatFun.const(3), RatFun.zero(), RatFun.var(x_var(1))]
    with pytest.raises(OrderTooHigh):
        coeff_vector(op, 0)


def test_matrix_shapes():
    assert build_resultant_matrix(ordinary_pair(), 1).shape == (5, 5)
    assert build_resultant_matrix(positive_triple(), 2).shape == (19, 15)
    assert build_resultant_matrix(zero_triple(), 2).shape == (35, 28)


def test_matrix_rows_are_shifted_operators():
    m = build_resultant_matrix(positive_triple(), 2)
    for r in (0, 7, 18):
        assert m.row_operator(r) == m.generator(r)
    i, j = m.row_provenance[0]
    assert (i, j) == (1, 1)
    assert m.generator(0) == compose(DiffOp(2, {(2, 0): 1}), mu_shift(positive_triple()[0], 1))


def test_matrix_preconditions():
    d = DiffOp.d(1, 1)
    with pytest.raises(DimensionMismatch):
        build_resultant_matrix([d], 1)
    with pytest.raises(NegativeN):
        build_resultant_matrix([DiffOp.x(1, 1), DiffOp.one(1)], 1)


def test_minor_enumeration():
    assert minor_count(19, 15) == 3876
    selections = list(young_row_selections(6, 3))
    assert len(selections) == 20
    assert set(selections) == set(combinations(range(6), 3))
    assert selections[0] == (3, 4, 5)


def test_mode_parsing():
    mode = ResultantMode.parse("sampled:40", seed=5)
    assert mode.kind == ModeKind.SAMPLED and mode.k == 40 and mode.seed == 5
    assert str(mode) == "sampled:40"
    assert ResultantMode.parse("exhaustive").kind == ModeKind.EXHAUSTIVE
    for bad in ("sampled:0", "sampled:x", "everything"):
        with pytest.raises(UsageError):
            ResultantMode.parse(bad)


def test_ordinary_resultant_matches_sylvester():
    outcome = differential_resultant(ordinary_pair())
    assert outcome.kind == OutcomeKind.POLY
    assert outcome.value == mu1 ** 3 - mu2 ** 2
    assert outcome.value == ordinary_oracle().normalized()
    assert outcome.minors_examined == 1
    assert not outcome.x_dependent


def test_resultant_annihilates_ordinary_pair():
    outcome = differential_resultant(ordinary_pair())
    assert verify_annihilation(outcome.value, ordinary_pair())


def test_sampled_positive_resultant_is_a_multiple_of_the_square():
    outcome = differential_resultant(positive_triple(), ResultantMode(ModeKind.SAMPLED, 2, 20240601))
    assert outcome.kind == OutcomeKind.POLY
    assert outcome.minors_examined == 2
    assert outcome.value == (mu1 * mu2 * positive_relation() ** 2).normalized()
    assert positive_resultant().divides(outcome.value)
    assert not positive_quoted_resultant().divides(outcome.value)
    x1, x2 = MultiPoly.var(x_var(1)), MultiPoly.var(x_var(2))
    assert outcome.content.normalized() == ((x1 ** 2 - x2 ** 2) ** 3).normalized()
    assert outcome.x_dependent


@pytest.mark.slow
def test_exhaustive_positive_resultant_is_the_square():
    outcome = differential_resultant(positive_triple(), ResultantMode(ModeKind.EXHAUSTIVE))
    assert outcome.minors_examined == 3876
    assert outcome.value == positive_resultant()
    assert outcome.value != positive_quoted_resultant().normalized()


def test_minor_denominators_are_kept():
    x1 = MultiPoly.var(x_var(1))
    ops = [DiffOp.d(1, 1), DiffOp(1, {(1,): RatFun.from_parts(MultiPoly.one(), x1)})]
    outcome = differential_resultant(ops)
    assert outcome.kind == OutcomeKind.POLY
    assert outcome.value == (mu1 - x1 * mu2).normalized()
    assert outcome.content == 1
    assert outcome.content_den == x1
    assert outcome.x_dependent


def test_polynomial_rows_leave_no_denominator():
    outcome = differential_resultant(ordinary_pair())
    assert outcome.content_den == 1


def test_exhaustive_gcd_divides_sampled_gcd():
    rng = random.Random(31)
    xs = [x_var(1), x_var(2)]
    d1, d2 = DiffOp.d(2, 1), DiffOp.d(2, 2)
    for _ in range(3):
        a = d1 + DiffOp.function(2, random_poly(rng, xs, 1, 2))
        b = d2 + DiffOp.function(2, random_poly(rng, xs, 1, 2))
        c = d1 ** 2 + random_diffop(rng, 2, 1)
        full = differential_resultant([a, b, c], ResultantMode(ModeKind.EXHAUSTIVE))
        sampled = differential_resultant([a, b, c], ResultantMode(ModeKind.SAMPLED, 3, rng.randrange(2 ** 32)))
        assert full.shape == (7, 6)
        if full.kind == OutcomeKind.ZERO:
            assert sampled.kind == OutcomeKind.ZERO
        elif sampled.kind == OutcomeKind.POLY:
            assert full.value.divides(sampled.value)


def test_positive_relation_annihilates():
    assert verify_annihilation(positive_relation(), positive_triple())
    assert not verify_annihilation(mu1 - mu2, positive_triple())


def test_zero_resultant_from_repeated_operator():
    d = DiffOp.d(2, 1)
    outcome = differential_resultant([d, d, d])
    assert outcome.kind == OutcomeKind.ZERO
    assert outcome.rank == 2
    assert outcome.zero_columns == [(0, 1)]


@pytest.mark.slow
def test_zero_triple_is_rank_deficient():
    outcome = differential_resultant(zero_triple(), ResultantMode(ModeKind.RANK_ONLY))
    assert outcome.kind == OutcomeKind.ZERO
    assert outcome.rank < 28


def test_rank_only_on_full_rank_matrix():
    outcome = differential_resultant(ordinary_pair(), ResultantMode(ModeKind.RANK_ONLY))
    assert outcome.kind == OutcomeKind.NONZERO
    assert outcome.minors_examined == 0


def test_zero_triple_identity():
    ops = zero_triple()
    assert verify_annihilation(zero_triple_relation(), ops)
    assert not verify_annihilation(zero_triple_printed_relation(), ops)


def test_zeros_at_infinity():
    assert homogenized_symbol_zero_check(zero_triple()) == [(1, 1, 0), (1, -1, 0)]
    d1, d2 = DiffOp.d(2, 1), DiffOp.d(2, 2)
    assert homogenized_symbol_zero_check([d1, d2, d1 + d2]) == []
    assert homogenized_symbol_zero_check([d1, d2, DiffOp.one(2)]) == []
    with pytest.raises(NonConstantInput):
        homogenized_symbol_zero_check([d1, d2, DiffOp.x(2, 1)])


def test_zero_columns():
    assert zero_columns(build_resultant_matrix(positive_triple(), 2)) == []


def test_mu_primitive_part():
    x1 = MultiPoly.var(x_var(1))
    content, value = mu_primitive_part(x1 * (mu1 - mu2))
    assert content.normalized() == x1
    assert value == (mu1 - mu2).normalized()
    assert content.involves(VarClass.X)


def test_partial_resultants_are_ordered_and_sampled_minors_nonzero():
    m = build_resultant_matrix(positive_triple(), 2)
    chosen = sampled_selections(m, 3, seed=4)
    assert len(chosen) == 3
    assert len(set(chosen)) == 3
    assert sampled_selections(m, 3, seed=4) == chosen
    for selection, minor in partial_resultants(m, ResultantMode(ModeKind.SAMPLED, 1, 4)):
        assert selection == chosen[0]
        assert not minor.is_zero


def test_dform_reproduces_the_minor():
    m = build_resultant_matrix(ordinary_pair(), 1)
    ds, det = dform_decomposition(m, tuple(range(5)))
    assert det.normalized() == mu1 ** 3 - mu2 ** 2
    assert len(ds) == 2


def test_dform_small_two_variable_case():
    d1, d2 = DiffOp.d(2, 1), DiffOp.d(2, 2)
    ops = [d1, d2, d1 + d2]
    m = build_resultant_matrix(ops, 2)
    ds, det = dform_decomposition(m, (0, 1, 2))
    total = DiffOp.zero(2)
    for i, (d, op) in enumerate(zip(ds, ops), start=1):
        total = total + compose(d, mu_shift(op, i))
    assert total == DiffOp.function(2, det)


def test_dform_rejects_bad_selections():
    d = DiffOp.d(2, 1)
    m = build_resultant_matrix([d, d, d], 2)
    with pytest.raises(SingularMinor):
        dform_decomposition(m, (0, 1, 2))
    with pytest.raises(DimensionMismatch):
        dform_decomposition(m, (0, 0, 1))


@pytest.mark.slow
def test_sampled_minors_annihilate_commuting_triples():
    rng = random.Random(20240601)
    for _ in range(25):
        ops, _ = commuting_triple(rng)
        m = build_resultant_matrix(ops, 2)
        for _, minor in partial_resultants(m, ResultantMode(ModeKind.SAMPLED, 1, rng.randrange(2 ** 32))):
            assert verify_annihilation(minor, ops)


@pytest.mark.slow
def test_dform_on_sampled_positive_minors():
    m = build_resultant_matrix(positive_triple(), 2)
    for selection, minor in partial_resultants(m, ResultantMode(ModeKind.SAMPLED, 5, 8)):
        _, det = dform_decomposition(m, selection)
        assert det == minor


@pytest.mark.slow
def test_x_content_search_reports_every_trial():
    hits = x_content_search(2, seed=3, k=1)
    assert [hit.trial for hit in hits] == [1, 2]
    for hit in hits:
        assert hit.outcome.kind in (OutcomeKind.POLY, OutcomeKind.NONZERO, OutcomeKind.ZERO)
