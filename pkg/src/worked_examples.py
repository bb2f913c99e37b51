"""
The worked examples the toolkit is built to reproduce, and a runner that
checks all of them and tabulates the outcome.
"""
import logging
import random
import time
from typing import Callable, Dict, List, Tuple

import pandas as pd

from darboux import (
    build_example_K,
    isom_check,
    rlambda_decompose,
    rlambda_membership,
)
from errors import DegenerateLambda, PDOError
from generators import commuting_triple, random_constant_op, random_diffop
from operators import (
    DiffOp,
    coefficient_derivative,
    commutator,
    compose,
    format_diffop,
    is_constant_coefficient,
)
from poly_core import (
    GAMMA,
    LAMBDA,
    MultiPoly,
    RatFun,
    VarClass,
    independence_rank,
    mu_var,
    sylvester_resultant,
    x_var,
    z_var,
)
from resultant import (
    ModeKind,
    OutcomeKind,
    ResultantMode,
    build_resultant_matrix,
    differential_resultant,
    dform_decomposition,
    homogenized_symbol_zero_check,
    partial_resultants,
    verify_annihilation,
)

logger = logging.getLogger(__name__)


# --- the examples ---

def mu(i: int) -> MultiPoly:
    return MultiPoly.var(mu_var(i))


def positive_triple() -> List[DiffOp]:
    """D1^2 - D2^2, x2 D1 + x1 D2 and L1 o L2 - gamma L1"""
    l1 = DiffOp(2, {(2, 0): 1, (0, 2): -1})
    l2 = DiffOp(2, {(1, 0): RatFun.var(x_var(2)), (0, 1): RatFun.var(x_var(1))})
    l3 = compose(l1, l2) - compose(DiffOp.function(2, RatFun.var(GAMMA)), l1)
    return [l1, l2, l3]


def positive_relation() -> MultiPoly:
    """mu3 - mu1 mu2 + gamma mu1"""
    return mu(3) - mu(1) * mu(2) + MultiPoly.var(GAMMA) * mu(1)


def positive_resultant() -> MultiPoly:
    """The gcd of the maximal minors for the positive triple: the square of its relation"""
    return (positive_relation() ** 2).normalized()


def positive_quoted_resultant() -> MultiPoly:
    """The cube of the relation as it is usually quoted; the gcd of maximal minors is the square"""
    return positive_relation() ** 3


def zero_triple() -> List[DiffOp]:
    """D1^2 - D2^2 - 1 with D1 and D2 composed on the left"""
    l1 = DiffOp(2, {(2, 0): 1, (0, 2): -1, (0, 0): -1})
    return [l1, compose(DiffOp.d(2, 1), l1), compose(DiffOp.d(2, 2), l1)]


def zero_triple_relation() -> MultiPoly:
    """mu2^2 - mu3^2 - mu1^2 - mu1^3, which the triple satisfies"""
    return mu(2) ** 2 - mu(3) ** 2 - mu(1) ** 2 - mu(1) ** 3


def zero_triple_printed_relation() -> MultiPoly:
    """mu2^2 - mu3^2 - mu1 - mu1^6 as it is usually quoted; it does not hold"""
    return mu(2) ** 2 - mu(3) ** 2 - mu(1) - mu(1) ** 6


def ordinary_pair() -> List[DiffOp]:
    return [DiffOp(1, {(2,): 1}), DiffOp(1, {(3,): 1})]


def ordinary_oracle() -> MultiPoly:
    """Sylvester resultant of z^2 - mu1 and z^3 - mu2 in z"""
    z = MultiPoly.var(z_var(1))
    return sylvester_resultant(z ** 2 - mu(1), z ** 3 - mu(2), z_var(1))


def out7_operands() -> Tuple[DiffOp, DiffOp]:
    q = DiffOp(2, {(2, 0): 1, (0, 2): 1})
    l = DiffOp(2, {(0, 1): RatFun.var(x_var(1)), (1, 0): RatFun.var(x_var(2))})
    return q, l


def out7_expected() -> DiffOp:
    x1, x2 = RatFun.var(x_var(1)), RatFun.var(x_var(2))
    return DiffOp(2, {(3, 0): x2, (2, 1): x1, (1, 2): x2, (0, 3): x1, (1, 1): 4})


def same_up_to_unit(a: MultiPoly, b: MultiPoly) -> bool:
    return a.normalized() == b.normalized()


# --- the checks ---

Check = Tuple[str, str, bool]  # (expected, observed, passed)


class WorkedExamples:
    """Runs every reproduction check; full=True uses the exhaustive and larger sweeps"""

    def __init__(self, full: bool = False, seed: int = 20240601):
        self.full = full
        self.seed = seed

    def check_leibniz(self) -> Check:
        got = format_diffop(compose(DiffOp.d(1, 1), DiffOp.x(1, 1)))
        return "(x1) D1 + 1", got, got == "(x1) D1 + 1"

    def check_out7(self) -> Check:
        q, l = out7_operands()
        got = compose(q, l)
        return format_diffop(out7_expected()), format_diffop(got), got == out7_expected()

    def check_factorization(self) -> Check:
        k, left, p = build_example_K()
        got = compose(left, k)
        return format_diffop(p), format_diffop(got), got == p

    def check_commuting_pair(self) -> Check:
        l1, l2, _ = positive_triple()
        got = commutator(l1, l2)
        return "0", format_diffop(got), got.is_zero

    def check_positive_resultant(self) -> Check:
        p2 = positive_resultant()
        if self.full:
            outcome = differential_resultant(positive_triple(), ResultantMode(ModeKind.EXHAUSTIVE))
            passed = outcome.kind == OutcomeKind.POLY and same_up_to_unit(outcome.value, p2)
            flag = ", content depends on x" if outcome.x_dependent else ""
            return f"{p2}", f"{outcome.value} ({outcome.minors_examined} minors{flag})", passed
        outcome = differential_resultant(positive_triple(), ResultantMode(ModeKind.SAMPLED, 40, self.seed))
        passed = outcome.kind == OutcomeKind.POLY and p2.divides(outcome.value)
        flag = ", content depends on x" if outcome.x_dependent else ""
        observed = f"degree {outcome.value.degree()} from {outcome.minors_examined} minors{flag}"
        return f"multiple of {p2}", observed, passed

    def check_zero_resultant(self) -> Check:
        ops = zero_triple()
        outcome = differential_resultant(ops, ResultantMode(ModeKind.RANK_ONLY))
        zeros = homogenized_symbol_zero_check(ops)
        passed = outcome.kind == OutcomeKind.ZERO and (1, -1, 0) in zeros
        return "zero, (1,-1,0) at infinity", f"{outcome.kind.value} rank {outcome.rank}/28, zeros {zeros}", passed

    def check_ordinary(self) -> Check:
        outcome = differential_resultant(ordinary_pair(), ResultantMode(ModeKind.EXHAUSTIVE))
        oracle = ordinary_oracle()
        return str(oracle), str(outcome.value), same_up_to_unit(outcome.value, oracle)

    def check_zero_triple_identity(self) -> Check:
        ops = zero_triple()
        holds = verify_annihilation(zero_triple_relation(), ops)
        printed = verify_annihilation(zero_triple_printed_relation(), ops)
        observed = f"mu2^2 - mu3^2 - mu1^2 - mu1^3: {holds}; printed mu2^2 - mu3^2 - mu1 - mu1^6: {printed}"
        return "true; printed form false", observed, holds and not printed

    def check_satisfy(self) -> Check:
        rng = random.Random(self.seed)
        trials, k = (25, 2) if self.full else (3, 1)
        failures = 0
        minors = 0
        for _ in range(trials):
            ops, _ = commuting_triple(rng)
            m = build_resultant_matrix(ops, 2)
            if m.shape[0] < m.shape[1]:
                continue
            for _, minor in partial_resultants(m, ResultantMode(ModeKind.SAMPLED, k, rng.randrange(2 ** 32))):
                minors += 1
                if not verify_annihilation(minor, ops):
                    failures += 1
        return "every nonzero minor annihilates", f"{minors} minors over {trials} triples, {failures} failures", failures == 0

    def check_isom(self) -> Check:
        rng = random.Random(self.seed)
        trials = 50 if self.full else 10
        k, _, p = build_example_K()
        agreements = [isom_check(random_constant_op(rng, 2, 4)) for _ in range(trials)]
        agreements.append(isom_check(p))
        agreements.append(isom_check(DiffOp.one(2)))
        return "kernel and ring tests agree", f"{sum(agreements)}/{len(agreements)} agree", all(agreements)

    def check_rlambda(self) -> Check:
        u, v = MultiPoly.var(z_var(1)), MultiPoly.var(z_var(2))
        lam = MultiPoly.var(LAMBDA)
        cube = (u * v - lam) ** 3
        members = all(rlambda_membership(u ** i * cube) for i in range(4)) and rlambda_membership(MultiPoly.const(7))
        square_fails = not rlambda_membership((u * v - 1) ** 2, 1)
        rng = random.Random(self.seed)
        roundtrips = 0
        for _ in range(25):
            g = MultiPoly.from_terms([({z_var(1): rng.randint(0, 2), z_var(2): rng.randint(0, 2)}, rng.randint(1, 9))])
            c = MultiPoly.const(rng.randint(-9, 9))
            got_g, got_c = rlambda_decompose(g * cube + c)
            roundtrips += got_g == g and got_c == c
        x2y2 = u ** 2 * v ** 2
        degenerate = rlambda_membership(x2y2, 0)
        try:
            rlambda_decompose(x2y2, 0)
            refused = False
        except DegenerateLambda:
            refused = True
        rank = independence_rank([u ** i * cube for i in range(4)], [VarClass.Z])
        passed = members and square_fails and roundtrips == 25 and degenerate and refused and rank == 4
        observed = (f"members {members}, (uv-1)^2 rejected {square_fails}, roundtrips {roundtrips}/25, "
                    f"u^2v^2 at 0: member {degenerate} refused {refused}, independent rank {rank}")
        return "all structure checks hold", observed, passed

    def check_derivation_law(self) -> Check:
        rng = random.Random(self.seed)
        bad = 0
        for _ in range(25):
            dim = rng.randint(1, 3)
            l = random_diffop(rng, dim, 3, x_degree=2, rational=True)
            for i in range(1, dim + 1):
                if commutator(DiffOp.d(dim, i), l) != coefficient_derivative(l, i):
                    bad += 1
            if all(commutator(DiffOp.d(dim, i), l).is_zero for i in range(1, dim + 1)) and not is_constant_coefficient(l):
                bad += 1
        return "0 violations", f"{bad} violations", bad == 0

    def check_dform(self) -> Check:
        m1 = build_resultant_matrix(ordinary_pair(), 1)
        dform_decomposition(m1, tuple(range(5)))
        m = build_resultant_matrix(positive_triple(), 2)
        count = 5 if self.full else 1
        checked = 0
        for selection, _ in partial_resultants(m, ResultantMode(ModeKind.SAMPLED, count, self.seed)):
            dform_decomposition(m, selection)
            checked += 1
        return f"1 + {count} decompositions", f"1 + {checked} decompositions", checked == count

    def checks(self) -> Dict[str, Callable[[], Check]]:
        return {
            "Leibniz rule D1 o x1": self.check_leibniz,
            "five-term product": self.check_out7,
            "factorization p = L o K": self.check_factorization,
            "commuting pair": self.check_commuting_pair,
            "positive resultant p^2": self.check_positive_resultant,
            "zero resultant": self.check_zero_resultant,
            "ordinary resultant": self.check_ordinary,
            "zero-triple identity": self.check_zero_triple_identity,
            "resultant annihilates": self.check_satisfy,
            "R(K) isomorphic to R_lambda": self.check_isom,
            "R_lambda structure": self.check_rlambda,
            "derivation law": self.check_derivation_law,
            "cofactor decomposition": self.check_dform,
        }

    def run(self) -> pd.DataFrame:
        rows = []
        for number, (name, check) in enumerate(self.checks().items(), start=1):
            start = time.perf_counter()
            try:
                expected, observed, passed = check()
            except PDOError as e:
                expected, observed, passed = "-", f"error: {e}", False
            elapsed = time.perf_counter() - start
            logger.info("check %d %s: %s in %.2fs", number, name, "pass" if passed else "FAIL", elapsed)
            rows.append({
                "check": number,
                "name": name,
                "expected": expected,
                "observed": observed,
                "passed": bool(passed),
                "seconds": round(elapsed, 3),
            })
        return pd.DataFrame(rows)
