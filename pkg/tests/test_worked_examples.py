import pytest

from poly_core import MultiPoly, mu_var
from worked_examples import (
    WorkedExamples,
    ordinary_oracle,
    positive_quoted_resultant,
    positive_relation,
    positive_resultant,
    same_up_to_unit,
)

FAST = [
    "check_leibniz",
    "check_out7",
    "check_factorization",
    "check_commuting_pair",
    "check_ordinary",
    "check_zero_triple_identity",
    "check_rlambda",
    "check_derivation_law",
]


@pytest.mark.parametrize("name", FAST)
def test_fast_checks_pass(name):
    expected, observed, passed = getattr(WorkedExamples(), name)()
    assert passed, f"expected {expected}, observed {observed}"


def test_isom_check_passes():
    _, observed, passed = WorkedExamples().check_isom()
    assert passed, observed


def test_every_check_is_registered():
    checks = WorkedExamples().checks()
    assert len(checks) == 13
    assert all(callable(check) for check in checks.values())


def test_oracle_is_the_sylvester_resultant():
    mu1, mu2 = MultiPoly.var(mu_var(1)), MultiPoly.var(mu_var(2))
    assert same_up_to_unit(ordinary_oracle(), mu2 ** 2 - mu1 ** 3)
    assert not same_up_to_unit(ordinary_oracle(), mu1 ** 3 + mu2 ** 2)


def test_positive_resultant_is_the_square_not_the_quoted_cube():
    p = positive_relation()
    assert same_up_to_unit(positive_resultant(), p * p)
    assert positive_resultant().divides(positive_quoted_resultant())
    assert not same_up_to_unit(positive_resultant(), positive_quoted_resultant())


@pytest.mark.slow
def test_sampled_positive_check_passes():
    expected, observed, passed = WorkedExamples().check_positive_resultant()
    assert expected.startswith("multiple of ")
    assert passed, observed


@pytest.mark.slow
def test_default_run():
    results = WorkedExamples().run()
    assert list(results.columns) == ["check", "name", "expected", "observed", "passed", "seconds"]
    assert list(results["check"]) == list(range(1, 14))
    failed = results[~results["passed"]]
    assert failed.empty, failed[["name", "observed"]].to_string()


@pytest.mark.slow
def test_full_run():
    results = WorkedExamples(full=True).run()
    assert bool(results["passed"].all())
