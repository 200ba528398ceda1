"""Carre du champ calculus for polynomial diffusion models.

A DiffusionModel is the universal representation of a symmetric second-order
diffusion operator on polynomials: an ordered variable tuple, the symmetric
table gamma[i][j] = Gamma(x_i, x_j) of cometric entries, and the drift vector
b_i = L(x_i), all sparse exact polynomials.  From the table one recovers

    Gamma(f, g) = sum_ij gamma[i][j] * d_i f * d_j g
    L(f)        = sum_ij gamma[i][j] * d2_ij f + sum_i b_i * d_i f

exactly.  The module also pushes models forward through polynomial maps
(rewriting the transported table in the image variables by an exact linear
solve against a monomial ansatz), derives drifts from power-law measure
densities, certifies boundary-ideal membership, and hosts the interpolation
scaffold that turns finitely many exact checks into an identity valid for
every value of a rational parameter.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Mapping, Sequence

from .poly import (
    MPoly,
    VariableMismatchError,
    divide_exact,
    monomials_up_to,
    solve_field_linear,
)
from .scalars import ZERO


class NotClosedError(ValueError):
    """The polynomial map does not carry the operator to the image variables."""


@dataclass(frozen=True)
class DiffusionModel:
    """Variable tuple + symmetric Gamma table + drift vector (+ parameters)."""

    variables: tuple[str, ...]
    gamma: dict[tuple[str, str], MPoly]
    drift: dict[str, MPoly]
    params: dict[str, Fraction] = field(default_factory=dict)

    def __post_init__(self) -> None:
        table: dict[tuple[str, str], MPoly] = {}
        for (u, v), entry in self.gamma.items():
            if u not in self.variables or v not in self.variables:
                raise VariableMismatchError(f"gamma entry ({u},{v}) outside {self.variables}")
            if entry.variables != self.variables:
                raise VariableMismatchError(f"gamma entry ({u},{v}) over wrong ring")
            existing = table.get((u, v))
            if existing is not None and existing != entry:
                raise ValueError(f"conflicting gamma entries for ({u},{v})")
            table[(u, v)] = entry
            table[(v, u)] = entry
        object.__setattr__(self, "gamma", table)
        for v in self.variables:
            if v not in self.drift:
                raise ValueError(f"missing drift entry for {v}")
            if self.drift[v].variables != self.variables:
                raise VariableMismatchError(f"drift entry for {v} over wrong ring")

    def gamma_entry(self, u: str, v: str) -> MPoly:
        entry = self.gamma.get((u, v))
        if entry is None:
            return MPoly.zero(self.variables)
        return entry

    def scaled(self, factor: Fraction | int) -> "DiffusionModel":
        """Model for factor * L (gamma and drift both scale)."""
        return DiffusionModel(
            self.variables,
            {k: v * factor for k, v in self.gamma.items() if k[0] <= k[1]},
            {k: v * factor for k, v in self.drift.items()},
            dict(self.params),
        )

    def to_jsonable(self) -> dict:
        upper = {
            f"{u},{v}": str(p)
            for (u, v), p in sorted(self.gamma.items())
            if self.variables.index(u) <= self.variables.index(v)
        }
        return {
            "variables": list(self.variables),
            "gamma": upper,
            "drift": {v: str(self.drift[v]) for v in self.variables},
            "params": {k: str(v) for k, v in sorted(self.params.items())},
        }


@dataclass(frozen=True)
class MeasureSpec:
    """Power-law measure density: product of base**exponent factors."""

    density_factors: tuple[tuple[MPoly, Fraction], ...]
    domain_tag: str
    normalization: float | None = None


def gamma_apply(model: DiffusionModel, f: MPoly, g: MPoly) -> MPoly:
    """Gamma(f, g) = sum_ij gamma[i][j] d_i f d_j g, exactly."""
    if f.variables != model.variables or g.variables != model.variables:
        raise VariableMismatchError("polynomials live over a different ring than the model")
    df = {v: f.diff(v) for v in model.variables}
    dg = {v: g.diff(v) for v in model.variables}
    total = MPoly.zero(model.variables)
    for u in model.variables:
        if df[u].is_zero():
            continue
        for v in model.variables:
            if dg[v].is_zero():
                continue
            entry = model.gamma.get((u, v))
            if entry is None or entry.is_zero():
                continue
            total = total + entry * df[u] * dg[v]
    return total


def l_apply(model: DiffusionModel, f: MPoly) -> MPoly:
    """L(f) = sum_ij gamma[i][j] d2_ij f + sum_i drift[i] d_i f, exactly."""
    if f.variables != model.variables:
        raise VariableMismatchError("polynomial lives over a different ring than the model")
    total = MPoly.zero(model.variables)
    first = {v: f.diff(v) for v in model.variables}
    for u in model.variables:
        du = first[u]
        if not du.is_zero():
            b = model.drift[u]
            if not b.is_zero():
                total = total + b * du
        for v in model.variables:
            entry = model.gamma.get((u, v))
            if entry is None or entry.is_zero():
                continue
            second = first[u].diff(v)
            if not second.is_zero():
                total = total + entry * second
    return total


def rewrite_in_images(
    target: MPoly,
    images: Mapping[str, MPoly],
    new_variables: tuple[str, ...],
    what: str = "rewrite",
) -> MPoly:
    """Write target exactly as a polynomial in the image expressions.

    Candidate monomials are bounded by the weighted degree that the images
    induce; the coefficients are found by one exact linear solve and the
    result is certified by re-substitution.
    """
    if target.is_zero():
        return MPoly.zero(new_variables)
    img_list = [images[v] for v in new_variables]
    img_degrees = [g.total_degree() for g in img_list]
    if any(d < 1 for d in img_degrees):
        raise NotClosedError(f"{what}: image expressions must be non-constant")
    bound = target.total_degree()

    def weighted(e: tuple[int, ...]) -> int:
        return sum(k * d for k, d in zip(e, img_degrees))

    candidates = monomials_up_to(new_variables, bound, weight=weighted)
    # Image of every candidate monomial in the source ring.
    candidate_polys: list[MPoly] = []
    for exps in candidates:
        p = MPoly.const(target.variables, 1)
        for g, k in zip(img_list, exps):
            if k:
                p = p * g**k
        candidate_polys.append(p)
    row_index: dict[tuple[int, ...], int] = {}
    for p in candidate_polys + [target]:
        for e in p.terms:
            row_index.setdefault(e, len(row_index))
    rows = [[ZERO] * len(candidates) for _ in range(len(row_index))]
    for col, p in enumerate(candidate_polys):
        for e, c in p.terms.items():
            rows[row_index[e]][col] = c
    rhs = [ZERO] * len(row_index)
    for e, c in target.terms.items():
        rhs[row_index[e]] = c
    solution = solve_field_linear(rows, rhs)
    if solution is None:
        raise NotClosedError(f"{what}: no exact polynomial rewrite in the image variables")
    result = MPoly(new_variables, dict(zip(candidates, solution)))
    check = result.subs(dict(images))
    if check != target:
        raise NotClosedError(f"{what}: rewrite failed certification")  # pragma: no cover
    return result


def pushforward(
    model: DiffusionModel,
    images: Mapping[str, MPoly],
    params: Mapping[str, Fraction] | None = None,
) -> DiffusionModel:
    """Image of the model under the polynomial map X = Phi(x).

    Computes Gamma(X_i, X_j) and L(X_i) upstairs and rewrites both in the
    new variables; raises NotClosedError when the map does not carry the
    operator.
    """
    new_variables = tuple(images.keys())
    for name, g in images.items():
        if g.variables != model.variables:
            raise VariableMismatchError(f"image for {name} over wrong ring")
    gamma: dict[tuple[str, str], MPoly] = {}
    for i, u in enumerate(new_variables):
        for v in new_variables[i:]:
            upstairs = gamma_apply(model, images[u], images[v])
            gamma[(u, v)] = rewrite_in_images(upstairs, images, new_variables, f"Gamma({u},{v})")
    drift: dict[str, MPoly] = {}
    for u in new_variables:
        upstairs = l_apply(model, images[u])
        drift[u] = rewrite_in_images(upstairs, images, new_variables, f"L({u})")
    return DiffusionModel(new_variables, gamma, drift, dict(params or {}))


def drift_from_measure(
    variables: Sequence[str],
    gamma: Mapping[tuple[str, str], MPoly],
    factors: Sequence[tuple[MPoly, Fraction]],
) -> dict[str, MPoly]:
    """Drift of the operator symmetric w.r.t. density prod(base**exponent).

    b_i = sum_j d_j gamma[i][j] + sum_factors exponent * Gamma(base, x_i)/base;
    each division must be exact (that is the boundary-compatibility of the
    measure), otherwise NonDivisibleError propagates.
    """
    variables = tuple(variables)
    zero_drift = {v: MPoly.zero(variables) for v in variables}
    scratch = DiffusionModel(variables, dict(gamma), zero_drift)
    drift: dict[str, MPoly] = {}
    for u in variables:
        total = MPoly.zero(variables)
        for v in variables:
            entry = scratch.gamma.get((u, v))
            if entry is not None:
                total = total + entry.diff(v)
        for base, exponent in factors:
            if exponent == 0:
                continue
            xi = MPoly.var(variables, u)
            numerator = gamma_apply(scratch, base, xi)
            total = total + divide_exact(numerator, base) * exponent
        drift[u] = total
    return drift


def boundary_ideal_check(model: DiffusionModel, f_boundary: MPoly) -> dict[str, MPoly]:
    """Certify Gamma(F, x_i) = h_i * F for every variable; return the h_i.

    NonDivisibleError means the boundary condition fails for F.
    """
    cofactors: dict[str, MPoly] = {}
    for v in model.variables:
        xi = MPoly.var(model.variables, v)
        cofactors[v] = divide_exact(gamma_apply(model, f_boundary, xi), f_boundary)
    return cofactors


def divergence_sums(model: DiffusionModel) -> dict[str, MPoly]:
    """Per-variable divergence sum_j d_j gamma[j][i] of the cometric."""
    out: dict[str, MPoly] = {}
    for u in model.variables:
        total = MPoly.zero(model.variables)
        for v in model.variables:
            entry = model.gamma.get((v, u))
            if entry is not None:
                total = total + entry.diff(v)
        out[u] = total
    return out


def divergence_identity_check(
    model: DiffusionModel, expected_coefficient: Fraction
) -> dict[str, tuple[bool, MPoly]]:
    """Compare each divergence sum against expected_coefficient * variable.

    Returns per variable (matches, computed sum); the exact computation is
    divergence_sums, this only attaches the expectation.
    """
    sums = divergence_sums(model)
    out: dict[str, tuple[bool, MPoly]] = {}
    for v, total in sums.items():
        expected = MPoly.var(model.variables, v) * expected_coefficient
        out[v] = (total == expected, total)
    return out


@dataclass(frozen=True)
class InterpolationProof:
    """Result of proving a parameter-polynomial identity by sampling."""

    passed: bool
    degree_bound: int
    tested: tuple[Fraction, ...]
    witnesses: tuple[Fraction, ...]
    details: tuple[str, ...] = ()


def identity_for_all_lambda(
    check: Callable[[Fraction], bool | tuple[bool, str]],
    degree_bound: int,
    lambdas: Sequence[Fraction] | None = None,
) -> InterpolationProof:
    """Prove an identity polynomial in a rational parameter of bounded degree.

    Checking at degree_bound + 1 distinct rational values pins the
    polynomial identity everywhere; any failure is returned with its
    witnessing parameter value.
    """
    values = tuple(lambdas) if lambdas is not None else tuple(
        Fraction(k) for k in range(2, 3 + degree_bound)
    )
    if len(values) < degree_bound + 1:
        raise ValueError("need degree_bound + 1 distinct parameter values")
    if len(set(values)) != len(values):
        raise ValueError("parameter values must be distinct")
    witnesses: list[Fraction] = []
    details: list[str] = []
    for lam in values:
        outcome = check(lam)
        ok, note = outcome if isinstance(outcome, tuple) else (outcome, "")
        if not ok:
            witnesses.append(lam)
            if note:
                details.append(f"lambda={lam}: {note}")
    return InterpolationProof(
        passed=not witnesses,
        degree_bound=degree_bound,
        tested=values,
        witnesses=tuple(witnesses),
        details=tuple(details),
    )
