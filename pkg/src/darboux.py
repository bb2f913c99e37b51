"""
Darboux factorizations p = L o K of constant-coefficient operators and the
commutative rings they produce.

Covers factorization checks, the normalized common eigenfunction of K,
membership of constant-coefficient q in R0(K) through the kernel function
of K o q, and the polynomial ring R_lambda of q(u, v) whose derivatives
q_u, q_v and q_uv are all divisible by uv - lambda.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

from errors import DegenerateLambda, DimensionMismatch, MalformedIdeal, NonConstantQ, NotInRing, ZeroOperator
from operators import (
    DiffOp,
    ExpFunction,
    apply,
    compose,
    conjugate_through,
    is_constant_coefficient,
    symbol,
)
from poly_core import (
    LAMBDA,
    InexactDivision,
    MultiPoly,
    RatFun,
    VarClass,
    VarId,
    poly_gcd,
    reduce_mod_binomial,
    x_var,
    z_var,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class FactorizationWitness:
    """p = left o right"""
    p: DiffOp
    left: DiffOp
    right: DiffOp


@dataclass(frozen=True)
class SpectralConstraint:
    """The ideal (zi*zj - rhs)"""
    i: int
    j: int
    rhs: MultiPoly

    def __post_init__(self):
        if self.i == self.j:
            raise MalformedIdeal("The constraint needs two distinct z variables")
        if self.rhs.involves_var(z_var(self.i)) or self.rhs.involves_var(z_var(self.j)):
            raise MalformedIdeal(f"Right-hand side {self.rhs} involves z{self.i} or z{self.j}")

    def reduce(self, p: MultiPoly) -> MultiPoly:
        return reduce_mod_binomial(p, z_var(self.i), z_var(self.j), self.rhs)

    def __str__(self) -> str:
        return f"z{self.i}*z{self.j} = {self.rhs}"


def default_constraint() -> SpectralConstraint:
    return SpectralConstraint(1, 2, MultiPoly.var(LAMBDA))


@dataclass
class EigenfunctionData:
    sigma0: MultiPoly
    pairs: List[Tuple[MultiPoly, MultiPoly]] = field(default_factory=list)
    g: MultiPoly = field(default_factory=MultiPoly.one)
    psi: Optional[ExpFunction] = None

    def reassemble(self) -> RatFun:
        """Sum of rho * sigma over sigma0; equals the coefficient of K[exp]"""
        total = MultiPoly.zero()
        for rho, sigma in self.pairs:
            total = total + rho * sigma
        return RatFun.from_parts(total, self.sigma0)


def verify_factorization(w: FactorizationWitness) -> bool:
    if not is_constant_coefficient(w.p):
        return False
    return compose(w.left, w.right) == w.p


def build_example_K(n: int = 2) -> Tuple[DiffOp, DiffOp, DiffOp]:
    """
    K = x1 x2 (D1 D2 - lambda) o 1/(x1 x2), its left cofactor L and
    p = (D1 D2 - lambda)^3 = L o K.
    """
    if n != 2:
        raise DimensionMismatch("The example factorization lives in two variables")
    lam = RatFun.var(LAMBDA)
    x1, x2 = RatFun.var(x_var(1)), RatFun.var(x_var(2))
    base = DiffOp(2, {(1, 1): 1, (0, 0): -lam})
    k = compose(compose(DiffOp.function(2, x1 * x2), base), DiffOp.function(2, 1 / (x1 * x2)))
    left = DiffOp(2, {
        (2, 2): 1,
        (1, 2): 1 / x1,
        (0, 2): -1 / x1 ** 2,
        (2, 1): 1 / x2,
        (1, 1): (1 - 2 * lam * x1 * x2) / (x1 * x2),
        (0, 1): (-1 - lam * x1 * x2) / (x1 ** 2 * x2),
        (2, 0): -1 / x2 ** 2,
        (1, 0): (-1 - lam * x1 * x2) / (x1 * x2 ** 2),
        (0, 0): lam ** 2 + 1 / (x1 ** 2 * x2 ** 2) + lam / (x1 * x2),
    })
    p = base ** 3
    return k, left, p


def darboux_transform(w: FactorizationWitness) -> DiffOp:
    """P = K o L, which equals K o p o K^-1"""
    return compose(w.right, w.left)


def normalized_eigenfunction(k: DiffOp) -> EigenfunctionData:
    """
    Split K[exp] into rho/sigma pairs over a common x-denominator and divide
    by the gcd g of the rho.
    """
    if k.is_zero:
        raise ZeroOperator("The zero operator has no eigenfunction")
    image = apply(k, ExpFunction.plane_wave(k.dim)).coeff
    sigma0 = image.den
    pairs = []
    g = MultiPoly.zero()
    for key, rho in sorted(image.num.collect([VarClass.X]).items(), reverse=True):
        sigma = MultiPoly.from_terms([(dict(key), 1)])
        pairs.append((rho, sigma))
        g = poly_gcd(g, rho)
    psi = ExpFunction(k.dim, image / g)
    logger.debug("eigenfunction of %s: sigma0=%s, g=%s", k, sigma0, g)
    return EigenfunctionData(sigma0=sigma0, pairs=pairs, g=g, psi=psi)


def kernel_membership(k: DiffOp, q: DiffOp, c: Optional[SpectralConstraint] = None) -> bool:
    """
    True iff K o q annihilates sigma0 * exp along the spectral curve.

    The image is a polynomial in z with coefficients in C(x); after clearing
    the x-denominator every coefficient of every x-monomial must lie in the
    ideal of the constraint.
    """
    if not is_constant_coefficient(q):
        raise NonConstantQ(f"{q} does not have constant coefficients")
    c = c or default_constraint()
    sigma0 = normalized_eigenfunction(k).sigma0
    image = apply(compose(k, q), ExpFunction(k.dim, RatFun.from_poly(sigma0))).coeff
    for key, coeff in image.num.collect([VarClass.X]).items():
        if not c.reduce(coeff).is_zero:
            logger.debug("coefficient of %s does not vanish on %s", key, c)
            return False
    return True


def ring_element(k: DiffOp, q: DiffOp) -> DiffOp:
    """The element Q = K o q o K^-1 of R(K) attached to q in R0(K)"""
    return conjugate_through(q, k, q.order)


# --- the ring R_lambda ---

def _lambda_poly(lam) -> MultiPoly:
    if lam is None:
        return MultiPoly.var(LAMBDA)
    if isinstance(lam, MultiPoly):
        return lam
    return MultiPoly.const(lam)


def rlambda_membership(q: MultiPoly, lam=None, u: VarId = None, v: VarId = None) -> bool:
    """True iff uv - lambda divides q_u, q_v and q_uv"""
    lam = _lambda_poly(lam)
    u = u or z_var(1)
    v = v or z_var(2)
    qu, qv = q.diff(u), q.diff(v)
    for derivative in (qu, qv, qu.diff(v)):
        if not reduce_mod_binomial(derivative, u, v, lam).is_zero:
            return False
    return True


def rlambda_decompose(q: MultiPoly, lam=None, u: VarId = None, v: VarId = None) -> Tuple[MultiPoly, MultiPoly]:
    """
    Write a member q of R_lambda as g * (uv - lambda)^3 + c.

    c is free of u and v (a polynomial in the parameters). lambda must be
    nonzero: at lambda = 0 the ring contains u^2 v^2, which has no such form.
    """
    lam = _lambda_poly(lam)
    u = u or z_var(1)
    v = v or z_var(2)
    if lam.is_zero:
        raise DegenerateLambda("Decomposition requires lambda != 0")
    if not rlambda_membership(q, lam, u, v):
        raise NotInRing(f"{q} is not in R_lambda")
    c = reduce_mod_binomial(q, u, v, lam)
    if c.involves_var(u) or c.involves_var(v):
        raise NotInRing(f"{q} reduces to {c}, which is not constant in {u.name}, {v.name}")
    cube = (MultiPoly.var(u) * MultiPoly.var(v) - lam) ** 3
    try:
        g = (q - c).exquo(cube)
    except InexactDivision:
        raise NotInRing(f"{q} - ({c}) is not a multiple of ({cube})") from None
    if g * cube + c != q:
        raise NotInRing("Decomposition does not reassemble")
    return g, c


def isom_check(q: DiffOp, lam=None) -> bool:
    """kernel_membership for the example K agrees with R_lambda membership of the symbol"""
    lam_poly = _lambda_poly(lam)
    k, _, _ = build_example_K()
    if lam is not None:
        k = k.map_coefficients(lambda c: c.subs({LAMBDA: lam_poly}))
    in_kernel = kernel_membership(k, q, SpectralConstraint(1, 2, lam_poly))
    in_ring = rlambda_membership(symbol(q), lam_poly)
    return in_kernel == in_ring
