"""Exact eigenpolynomial bases by graded triangular solve.

The operators here map each graded slice of the polynomial ring into itself
and act lower-triangularly on monomials: applying L to a monomial returns
the monomial itself (the diagonal, a rational multiple) plus monomials that
are strictly smaller in the grading order.  The eigenpolynomial with a
prescribed leading monomial is therefore found by back-substitution down
the order, one exact rational coefficient at a time.

For the deltoid family the grading is the total degree in (Z, Zb) and the
eigenvalue of the leading monomial Z^n Zb^k is

    (lambda - 1)(n + k) + n^2 + k^2 + n k.

For the G2 family the grading is the weighted degree r + 2t of s^r p^t.

Eigenvalue collisions (a strictly smaller monomial with the same diagonal
eigenvalue) make the solve singular when that monomial is actually fed by
higher terms; this raises EigenvalueCollisionError naming the witness.
When the feed is zero the solve stays consistent, the coefficient is fixed
to zero (the choice is conjugation-equivariant) and the collision is
recorded on the result.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Iterable, Sequence

import numpy as np

from .diffusion import DiffusionModel, l_apply
from .models import (
    DELTOID_CONJ_PAIRS,
    DELTOID_J_WEIGHTS,
    DELTOID_VARS,
    G2_VARS,
    deltoid_model,
)
from .poly import Exponents, MPoly, monomials_up_to
from .scalars import FieldScalar, I, ONE, RationalLike, j_power

OrderKey = Callable[[Exponents], tuple]


class EigenvalueCollisionError(ArithmeticError):
    """A lower monomial shares the eigenvalue and is genuinely coupled."""

    def __init__(self, lead: Exponents, witness: Exponents, eigenvalue: Fraction):
        self.lead = lead
        self.witness = witness
        self.eigenvalue = eigenvalue
        super().__init__(
            f"eigen solve for leading monomial {lead} is singular: monomial "
            f"{witness} shares eigenvalue {eigenvalue} and receives a nonzero feed"
        )


@dataclass(frozen=True)
class EigenPoly:
    """Indexed eigenpolynomial with exact coefficients.

    eigenvalue stores mu with L(poly) = -mu * poly.  flavor is one of
    'R' (monomial leading term), 'P' (symmetric), 'Q' (antisymmetric),
    'G' (G2 weighted-graded basis).  l2_scale, when present, is the numeric
    factor making the polynomial unit-norm for the relevant measure.
    """

    n: int
    k: int
    eigenvalue: Fraction
    poly: MPoly
    flavor: str
    l2_scale: float | None = None
    collisions: tuple[Exponents, ...] = ()

    def scaled_values(self, values: np.ndarray) -> np.ndarray:
        if self.l2_scale is None:
            return values
        return values * self.l2_scale


def eigenvalue_deltoid(lam: Fraction, n: int, k: int) -> Fraction:
    return (lam - 1) * (n + k) + n * n + k * k + n * k


def _total_degree_key(e: Exponents) -> tuple:
    return (sum(e), e)


def g2_weighted_degree(e: Exponents) -> int:
    """Weighted degree of s^r p^t, with p counting twice."""
    return e[0] + 2 * e[1]


def _g2_key(e: Exponents) -> tuple:
    return (g2_weighted_degree(e), e[0])


@dataclass(frozen=True)
class GradedBasis:
    """Monomial basis organized by a grading the operator respects."""

    variables: tuple[str, ...]
    degree: Callable[[Exponents], int]
    order_key: OrderKey

    def monomials(self, max_degree: int) -> list[Exponents]:
        return monomials_up_to(self.variables, max_degree, weight=self.degree)

    def closed_under(self, model: DiffusionModel, max_degree: int) -> bool:
        """Check that L maps each graded slice span(degree <= d) into itself."""
        for exps in self.monomials(max_degree):
            image = l_apply(model, _monomial(self.variables, exps))
            bound = self.degree(exps)
            if any(self.degree(e) > bound for e in image.terms):
                return False
        return True


DELTOID_BASIS = GradedBasis(DELTOID_VARS, lambda e: sum(e), _total_degree_key)
G2_BASIS = GradedBasis(G2_VARS, g2_weighted_degree, _g2_key)


def _monomial(variables: Sequence[str], exps: Exponents) -> MPoly:
    return MPoly(variables, {tuple(exps): ONE})


def graded_triangular_solve(
    model: DiffusionModel,
    lead: Exponents,
    order_key: OrderKey,
    candidates: Iterable[Exponents],
) -> tuple[MPoly, Fraction, tuple[Exponents, ...]]:
    """Back-substitute the eigenpolynomial with the given leading monomial.

    Returns (polynomial, eigenvalue mu, benign collisions).  The candidate
    monomials must contain every monomial strictly below the lead in the
    grading order that the operator can reach.
    """
    variables = model.variables
    lead = tuple(lead)
    lead_key = order_key(lead)

    diag_cache: dict[Exponents, Fraction] = {}
    image_cache: dict[Exponents, MPoly] = {}

    def image(exps: Exponents) -> MPoly:
        if exps not in image_cache:
            image_cache[exps] = l_apply(model, _monomial(variables, exps))
        return image_cache[exps]

    def diagonal(exps: Exponents) -> Fraction:
        if exps not in diag_cache:
            coeff = image(exps).coefficient(exps)
            if coeff and not coeff.is_rational():
                raise ValueError(f"non-rational diagonal at {exps}")
            diag_cache[exps] = coeff.rational_value() if coeff else Fraction(0)
        return diag_cache[exps]

    mu = -diagonal(lead)
    below = sorted(
        (tuple(e) for e in candidates if order_key(tuple(e)) < lead_key),
        key=order_key,
        reverse=True,
    )
    collisions = tuple(e for e in below if -diagonal(e) == mu)

    coeffs: dict[Exponents, FieldScalar] = {lead: ONE}
    # acc holds (L + mu)(partial solution); consumed as coefficients are fixed.
    acc: dict[Exponents, FieldScalar] = {}

    def accumulate(exps: Exponents, scale: FieldScalar) -> None:
        shifted = image(exps) + _monomial(variables, exps) * mu
        for e, c in shifted.terms.items():
            if order_key(e) > order_key(exps):
                raise ValueError(
                    f"operator is not triangular: {exps} feeds {e}"
                )  # pragma: no cover - structural guard
            total = acc.get(e)
            new = c * scale if total is None else total + c * scale
            if new:
                acc[e] = new
            elif total is not None:
                del acc[e]

    accumulate(lead, ONE)
    acc.pop(lead, None)  # (mu - mu) * lead vanishes identically
    for exps in below:
        rhs = acc.pop(exps, None)
        if rhs is None or not rhs:
            continue
        denom = mu + diagonal(exps)  # mu - mu_m with mu_m = -diagonal
        if denom == 0:
            raise EigenvalueCollisionError(lead, exps, mu)
        c = rhs * Fraction(-1, 1) / FieldScalar.from_rational(denom)
        coeffs[exps] = c
        accumulate(exps, c)
        acc.pop(exps, None)
    if acc:
        leftovers = sorted(acc, key=order_key, reverse=True)
        raise ValueError(f"graded solve left residual terms at {leftovers[:4]}")  # pragma: no cover
    return MPoly(variables, coeffs), mu, collisions


# ---------------------------------------------------------------------------
# Deltoid basis
# ---------------------------------------------------------------------------


def eigen_R(model: DiffusionModel, n: int, k: int) -> EigenPoly:
    """Eigenpolynomial with leading term Z^n Zb^k on a deltoid-type model."""
    if model.variables != DELTOID_VARS:
        raise ValueError("eigen_R expects a model in the deltoid variables")
    if n < 0 or k < 0:
        raise ValueError("indices must be nonnegative")
    lead = (n, k)
    poly, mu, collisions = graded_triangular_solve(
        model, lead, DELTOID_BASIS.order_key, DELTOID_BASIS.monomials(n + k)
    )
    return EigenPoly(n, k, mu, poly, "R", collisions=collisions)


@lru_cache(maxsize=None)
def _eigen_R_cached(lam: Fraction, n: int, k: int) -> EigenPoly:
    return eigen_R(deltoid_model(lam), n, k)


def eigen_R_lambda(lam: RationalLike, n: int, k: int) -> EigenPoly:
    return _eigen_R_cached(Fraction(lam), n, k)


def eigen_PQ(model: DiffusionModel, n: int, k: int) -> tuple[EigenPoly, EigenPoly]:
    """Symmetric/antisymmetric pair in leading-coefficient normalization.

    P-hat has dominant term (Z^n Zb^k + Z^k Zb^n)/2 and rational
    coefficients; Q-hat has dominant term -i (Z^n Zb^k - Z^k Zb^n)/2 and
    purely imaginary ones.  Q-hat vanishes identically when n = k.
    """
    r_nk = eigen_R(model, n, k)
    r_kn = eigen_R(model, k, n) if n != k else r_nk
    half = Fraction(1, 2)
    p_poly = (r_nk.poly + r_kn.poly) * half
    q_poly = (r_nk.poly - r_kn.poly) * (-I * FieldScalar.from_rational(half))
    collisions = tuple(dict.fromkeys(r_nk.collisions + r_kn.collisions))
    p_hat = EigenPoly(n, k, r_nk.eigenvalue, p_poly, "P", collisions=collisions)
    q_hat = EigenPoly(n, k, r_nk.eigenvalue, q_poly, "Q", collisions=collisions)
    return p_hat, q_hat


@lru_cache(maxsize=None)
def _eigen_PQ_cached(lam: Fraction, n: int, k: int) -> tuple[EigenPoly, EigenPoly]:
    return eigen_PQ(deltoid_model(lam), n, k)


def eigen_PQ_lambda(lam: RationalLike, n: int, k: int) -> tuple[EigenPoly, EigenPoly]:
    return _eigen_PQ_cached(Fraction(lam), n, k)


def pq_indices(degree_max: int, include_constant: bool = False) -> list[tuple[int, int]]:
    """Index pairs (n, k), n >= k, with 1 <= n + k <= degree_max."""
    lo = 0 if include_constant else 1
    return [
        (n, k)
        for d in range(lo, degree_max + 1)
        for k in range(d // 2 + 1)
        for n in (d - k,)
        if n >= k
    ]


@dataclass(frozen=True)
class RotationReport:
    """Exact verification of the three-fold rotation action on (P, Q)."""

    n: int
    k: int
    ok_2x2: bool
    ok_scalar: bool
    factor_exponent: int  # the pair rotates by j**(n - k)

    @property
    def ok(self) -> bool:
        return self.ok_2x2 and self.ok_scalar


def verify_rotation(model: DiffusionModel, n: int, k: int) -> RotationReport:
    """Check the rotation action Z -> jZ on the (P-hat, Q-hat) pair, exactly.

    The 2x2 form states, with m = n - k, c = (j^m + jbar^m)/2 and
    b = i (j^m - jbar^m)/2:

        P-hat(jZ, jbar Zb) =  c P-hat + b Q-hat
        Q-hat(jZ, jbar Zb) = -b P-hat + c Q-hat

    which is equivalent to (P-hat + i Q-hat) picking up the scalar j^m.
    """
    p_hat, q_hat = eigen_PQ(model, n, k)
    m = n - k
    jm = j_power(m)
    jmbar = jm.conj()
    c = (jm + jmbar) * Fraction(1, 2)
    b = I * (jm - jmbar) * Fraction(1, 2)
    p_rot = p_hat.poly.rotate_j(DELTOID_J_WEIGHTS)
    q_rot = q_hat.poly.rotate_j(DELTOID_J_WEIGHTS)
    ok_2x2 = (p_rot == p_hat.poly * c + q_hat.poly * b) and (
        q_rot == p_hat.poly * (-b) + q_hat.poly * c
    )
    combo = p_hat.poly + q_hat.poly * I
    ok_scalar = combo.rotate_j(DELTOID_J_WEIGHTS) == combo * jm
    return RotationReport(n, k, ok_2x2, ok_scalar, m % 3)


# ---------------------------------------------------------------------------
# G2 basis
# ---------------------------------------------------------------------------


def eigen_g2(model: DiffusionModel, weighted_degree: int) -> list[EigenPoly]:
    """All eigenpolynomials of one weighted-degree slice, leading s^r p^t.

    The slice r + 2t = weighted_degree is enumerated with r descending,
    matching the triangular structure of the operator.
    """
    if model.variables != G2_VARS:
        raise ValueError("eigen_g2 expects a model in the (s, p) variables")
    if weighted_degree < 0:
        raise ValueError("weighted degree must be nonnegative")
    candidates = G2_BASIS.monomials(weighted_degree)
    out: list[EigenPoly] = []
    for t in range(weighted_degree // 2 + 1):
        r = weighted_degree - 2 * t
        poly, mu, collisions = graded_triangular_solve(
            model, (r, t), G2_BASIS.order_key, candidates
        )
        out.append(EigenPoly(r, t, mu, poly, "G", collisions=collisions))
    return out


def rewrite_symmetric_in_sp(poly: MPoly) -> MPoly:
    """Rewrite a swap-symmetric deltoid polynomial in s = Z + Zb, p = Z Zb."""
    from .diffusion import rewrite_in_images
    from .models import PSI_IMAGES

    if poly.swap_variables(DELTOID_CONJ_PAIRS) != poly:
        raise ValueError("polynomial is not symmetric under the variable swap")
    return rewrite_in_images(poly, PSI_IMAGES, G2_VARS, "symmetric rewrite")


# ---------------------------------------------------------------------------
# Numeric normalization
# ---------------------------------------------------------------------------


def norm_and_orthonormalize(e: EigenPoly, grid) -> EigenPoly:
    """Attach the numeric unit-norm scale for the grid's measure.

    The exact coefficients are untouched: ratio quantities such as
    poly(Z)/poly(1) stay normalization-independent.
    """
    values = grid.evaluate(e.poly)
    norm2 = float(grid.mean(np.abs(values) ** 2))
    if not np.isfinite(norm2) or norm2 <= 0.0:
        raise ValueError(f"quadrature norm failed for index ({e.n},{e.k})")
    return replace(e, l2_scale=1.0 / np.sqrt(norm2))


def coefficient_components_ok(e: EigenPoly) -> bool:
    """Realness pattern: R and P have b = c = d = 0; Q has a = c = 0."""
    for coeff in e.poly.terms.values():
        if e.flavor in ("R", "P", "G"):
            if coeff.b or coeff.c or coeff.d:
                return False
        elif e.flavor == "Q":
            if coeff.a or coeff.c:
                return False
    return True
