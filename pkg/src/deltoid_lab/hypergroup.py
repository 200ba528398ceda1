"""Probing the Markov transfer matrices of the rotated-coordinate kernels.

For each eigenspace index (n, k) the conditional kernel of the rotated
lifted process acts on the pair (P-hat, Q-hat) through a 2x2 matrix.  Two
entries have closed forms that are exact evaluations of the eigenpolynomials,

    alpha = P(Z(theta)) / P(1),      gamma = Q(Z(theta)) / P(1),

with beta = -gamma; the remaining entry delta has no usable closed form in
general and is estimated by Monte Carlo.  The estimation never bins
conditionals: commutation with the generator forces the kernel to be block
diagonal across eigenvalues, so the block entries are identified from plain
unconditional correlations

    E[u(pi(Phi_theta xi)) v(pi(xi))] = M[u, v] * ||v||^2 ,

normalized by quadrature norms.  The module also hosts the parity and
positivity scans, the basis change to the rotated cusp bases, and the
moment-sequence representation check for measures on the domain.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .models import ThetaPair, deltoid_boundary_values, z_of_theta, phi_theta
from .quadrature import TorusGrid
from .sampling import SampleBatch, pushforward_deltoid
from .scalars import RationalLike
from .spectral import EigenPoly, eigen_PQ_lambda, eigenvalue_deltoid, pq_indices

SQRT3 = math.sqrt(3.0)


@dataclass(frozen=True)
class MarkovMatrix:
    """2x2 kernel block on (P-hat, Q-hat) with per-entry provenance."""

    n: int
    k: int
    theta: ThetaPair
    alpha: float
    beta: float
    gamma: float
    delta: float
    provenance: dict  # entry -> ("exact", 0.0) | ("estimated", standard_error)

    def as_array(self) -> np.ndarray:
        return np.array([[self.alpha, self.beta], [self.gamma, self.delta]])


@dataclass(frozen=True)
class ProbeContext:
    """Shared exact/quadrature data for one deltoid parameter.

    pairs holds the (P-hat, Q-hat) eigenpolynomials per index; norms2 their
    squared quadrature norms; p_at_one the exact rational values P-hat(1).
    """

    lam: Fraction
    degree_max: int
    pairs: dict[tuple[int, int], tuple[EigenPoly, EigenPoly]]
    norms2: dict[tuple[int, int], tuple[float, float]]
    p_at_one: dict[tuple[int, int], Fraction]

    @staticmethod
    def build(lam: RationalLike, degree_max: int, grid_n: int = 96) -> "ProbeContext":
        lam = Fraction(lam)
        grid = TorusGrid.build(lam, grid_n)
        pairs: dict[tuple[int, int], tuple[EigenPoly, EigenPoly]] = {}
        norms2: dict[tuple[int, int], tuple[float, float]] = {}
        p_at_one: dict[tuple[int, int], Fraction] = {}
        for n, k in pq_indices(degree_max):
            p_hat, q_hat = eigen_PQ_lambda(lam, n, k)
            pairs[(n, k)] = (p_hat, q_hat)
            p_norm2 = float(np.real(grid.mean(np.abs(grid.evaluate(p_hat.poly)) ** 2)))
            q_norm2 = (
                float(np.real(grid.mean(np.abs(grid.evaluate(q_hat.poly)) ** 2)))
                if not q_hat.poly.is_zero()
                else 0.0
            )
            norms2[(n, k)] = (p_norm2, q_norm2)
            value = p_hat.poly.evaluate_exact({"Z": 1, "Zb": 1})
            if not value:
                raise ArithmeticError(
                    f"P-hat({n},{k}) vanishes at the cusp Z = 1; the ratio "
                    "normalization is undefined (this contradicts the eigenbasis structure)"
                )
            p_at_one[(n, k)] = value.rational_value()
        return ProbeContext(lam, degree_max, pairs, norms2, p_at_one)

    def eval_pair(self, n: int, k: int, z: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        p_hat, q_hat = self.pairs[(n, k)]
        point = {"Z": z, "Zb": np.conj(z)}
        p_vals = np.real(p_hat.poly.evaluate(point))
        if q_hat.poly.is_zero():
            q_vals = np.zeros_like(p_vals)
        else:
            q_vals = np.real(q_hat.poly.evaluate(point))
        return p_vals, q_vals


def markov_pair_exact(
    ctx: ProbeContext, n: int, k: int, theta: ThetaPair
) -> tuple[float, float]:
    """(alpha, gamma) = (P(Z(theta)), Q(Z(theta))) / P(1), scale-independent."""
    z = z_of_theta(theta.t1, theta.t2)
    p_vals, q_vals = ctx.eval_pair(n, k, np.array([z]))
    denom = float(ctx.p_at_one[(n, k)])
    return float(p_vals[0]) / denom, float(q_vals[0]) / denom


def rotation_delta_exact(ctx: ProbeContext, n: int, k: int, theta: ThetaPair) -> float | None:
    """delta derived from the three-fold rotation action: delta = alpha.

    Evaluating the kernel at the cusp j and using the rotation of the pair
    forces delta(theta) = P(Z(theta))/P(1) whenever n - k is not divisible
    by 3; for n = k (mod 3) the rotation carries no information and None is
    returned.
    """
    if (n - k) % 3 == 0:
        return None
    alpha, _ = markov_pair_exact(ctx, n, k, theta)
    return alpha


def remark_delta_value(ctx: ProbeContext, n: int, k: int, theta: ThetaPair) -> float | None:
    """The cot-prefactor closed form for delta, reported for comparison only.

    This printed formula disagrees with the rotation-derived value (and with
    delta(0) = 1); the probe reports both next to the Monte-Carlo estimate
    without adjudicating intent.
    """
    m = (n - k) % 3
    if m == 0:
        return None
    angle = 2.0 * math.pi * (n - k) / 3.0
    alpha, _ = markov_pair_exact(ctx, n, k, theta)
    return (math.cos(angle) / math.sin(angle)) * alpha


def estimate_markov_matrix(
    ctx: ProbeContext,
    n: int,
    k: int,
    theta: ThetaPair,
    batch: SampleBatch,
) -> MarkovMatrix:
    """Estimate the full 2x2 block from unconditional correlations.

    With u, v ranging over the pair, E[u(pi(Phi_theta xi)) v(pi(xi))] equals
    M[u, v] ||v||^2; the norms come from quadrature.  Entries carry standard
    errors of the correlation means.
    """
    if batch.kind != "omega1":
        raise ValueError("markov estimation needs lifted-domain samples")
    z_base = pushforward_deltoid(batch)
    rotated = phi_theta(batch.points, theta)
    z_rot = rotated.mean(axis=1)
    p_base, q_base = ctx.eval_pair(n, k, z_base)
    p_rot, q_rot = ctx.eval_pair(n, k, z_rot)
    p_norm2, q_norm2 = ctx.norms2[(n, k)]
    if p_norm2 <= 0 or (n != k and q_norm2 <= 0):
        raise ArithmeticError(f"degenerate quadrature norms for index ({n},{k})")
    nsamples = len(batch)

    def corr(u_vals: np.ndarray, v_vals: np.ndarray, v_norm2: float) -> tuple[float, float]:
        prods = u_vals * v_vals
        mean = float(prods.mean())
        se = float(prods.std(ddof=1) / math.sqrt(nsamples))
        return mean / v_norm2, se / v_norm2

    alpha, alpha_se = corr(p_rot, p_base, p_norm2)
    if n == k:
        beta = beta_se = gamma = gamma_se = delta = delta_se = 0.0
    else:
        beta, beta_se = corr(p_rot, q_base, q_norm2)
        gamma, gamma_se = corr(q_rot, p_base, p_norm2)
        delta, delta_se = corr(q_rot, q_base, q_norm2)
    provenance = {
        "alpha": ("estimated", alpha_se),
        "beta": ("estimated", beta_se),
        "gamma": ("estimated", gamma_se),
        "delta": ("estimated", delta_se),
    }
    return MarkovMatrix(n, k, theta, alpha, beta, gamma, delta, provenance)


def exact_markov_matrix(ctx: ProbeContext, n: int, k: int, theta: ThetaPair) -> MarkovMatrix:
    """Exact (alpha, beta, gamma) and the rotation-derived delta when available.

    For n = k (mod 3) the delta entry is NaN: no exact value exists.
    """
    alpha, gamma = markov_pair_exact(ctx, n, k, theta)
    delta = rotation_delta_exact(ctx, n, k, theta)
    provenance = {
        "alpha": ("exact", 0.0),
        "beta": ("exact", 0.0),
        "gamma": ("exact", 0.0),
        "delta": ("exact", 0.0) if delta is not None else ("unavailable", math.nan),
    }
    return MarkovMatrix(
        n, k, theta, alpha, -gamma, gamma,
        delta if delta is not None else math.nan, provenance,
    )


def delta_report(
    ctx: ProbeContext, n: int, k: int, theta: ThetaPair, batch: SampleBatch
) -> dict:
    """Monte-Carlo delta next to the two closed-form candidates."""
    estimated = estimate_markov_matrix(ctx, n, k, theta, batch)
    return {
        "index": (n, k),
        "theta": (theta.t1, theta.t2),
        "monte_carlo": estimated.delta,
        "monte_carlo_se": estimated.provenance["delta"][1],
        "rotation_derived": rotation_delta_exact(ctx, n, k, theta),
        "cot_closed_form": remark_delta_value(ctx, n, k, theta),
    }


def basis_change(matrix: np.ndarray, n: int, k: int) -> np.ndarray:
    """Congruence to the basis symmetric about a rotated cusp axis.

    With (a, b, c) the symmetric block entries, the transformed block is

        (1/4) [ a + 2 e sqrt(3) b + 3 c,  -e sqrt(3) a - 2 b + e sqrt(3) c ]
              [ -e sqrt(3) a - 2 b + e sqrt(3) c,  3 a - 2 e sqrt(3) b + c ]

    with e = +1 for n - k = 1 and e = -1 for n - k = 2 (mod 3); the identity
    when n - k = 0 (mod 3).
    """
    m = np.asarray(matrix, dtype=float)
    eps = {0: 0, 1: 1, 2: -1}[(n - k) % 3]
    if eps == 0:
        return m.copy()
    a, b, c = m[0, 0], m[0, 1], m[1, 1]
    off = (-eps * SQRT3 * a - 2.0 * b + eps * SQRT3 * c) / 4.0
    return np.array(
        [
            [(a + 2.0 * eps * SQRT3 * b + 3.0 * c) / 4.0, off],
            [off, (3.0 * a - 2.0 * eps * SQRT3 * b + c) / 4.0],
        ]
    )


def representation_coefficients(
    ctx: ProbeContext,
    points: np.ndarray,
    weights: np.ndarray | None = None,
) -> dict[tuple[int, int], tuple[float, float]]:
    """Moment coefficients (a, b) of a probability measure on the domain.

    a = int P(z)/P(1) d nu and b = int Q(z)/P(1) d nu per index, expressed in
    the unit-norm basis (the antisymmetric integral picks up the norm ratio
    ||P|| / ||Q|| because the printed ratios are leading-coefficient
    normalized while the kernel block lives in the orthonormal basis).
    """
    z = np.asarray(points, dtype=complex)
    if weights is None:
        weights = np.full(len(z), 1.0 / len(z))
    weights = np.asarray(weights, dtype=float)
    weights = weights / weights.sum()
    out: dict[tuple[int, int], tuple[float, float]] = {}
    for (n, k), (p_hat, q_hat) in ctx.pairs.items():
        p_vals, q_vals = ctx.eval_pair(n, k, z)
        denom = float(ctx.p_at_one[(n, k)])
        a = float(np.dot(weights, p_vals)) / denom
        if n == k:
            b = 0.0
        else:
            p_norm2, q_norm2 = ctx.norms2[(n, k)]
            b = float(np.dot(weights, q_vals)) / denom * math.sqrt(p_norm2 / q_norm2)
        out[(n, k)] = (a, b)
    return out


def representation_check(
    ctx: ProbeContext,
    points: np.ndarray,
    weights: np.ndarray | None = None,
    tolerance: float = 1e-9,
) -> dict:
    """Row-contraction test of the representation coefficients.

    For a symmetric Markov kernel the orthonormal-basis block row (a, b)
    must satisfy a^2 + b^2 <= 1; the check reports the worst row norm over
    all indices in the context.
    """
    coeffs = representation_coefficients(ctx, points, weights)
    worst = 0.0
    worst_index = None
    for index, (a, b) in coeffs.items():
        row = a * a + b * b
        if row > worst:
            worst = row
            worst_index = index
    return {
        "coefficients": coeffs,
        "worst_row_norm_sq": worst,
        "worst_index": worst_index,
        "contraction_ok": worst <= 1.0 + tolerance,
    }


def theta_grid(per_axis: int, margin: float = 1e-3) -> list[ThetaPair]:
    """Deterministic theta grid avoiding the degenerate lines by the margin."""
    two_pi = 2.0 * math.pi
    axis1 = [(i + 0.31) * two_pi / per_axis for i in range(per_axis)]
    axis2 = [(j + 0.618) * two_pi / per_axis for j in range(per_axis)]
    out = []
    for t1 in axis1:
        for t2 in axis2:
            pair = ThetaPair(t1, t2)
            if pair.is_interior(margin):
                out.append(pair)
    return out


def positivity_scan(
    ctx: ProbeContext,
    thetas: Sequence[ThetaPair],
    tolerance: float = 1e-9,
) -> dict:
    """Contraction bounds for the exact entries over a theta grid.

    On blocks with n - k not divisible by 3 the quadrature norms agree and
    the full 2x2 block is a scaled rotation with singular value
    sqrt(alpha^2 + gamma^2).  On the remaining blocks only the first column
    is exact; its orthonormalized norm is a lower bound for the largest
    singular value and must itself be <= 1.
    """
    worst = 0.0
    worst_at = None
    alpha_bound = 0.0
    for theta in thetas:
        for (n, k) in ctx.pairs:
            alpha, gamma = markov_pair_exact(ctx, n, k, theta)
            alpha_bound = max(alpha_bound, abs(alpha))
            p_norm2, q_norm2 = ctx.norms2[(n, k)]
            if n == k:
                value = abs(alpha)
            elif (n - k) % 3 != 0:
                value = math.sqrt(alpha * alpha + gamma * gamma)
            else:
                ratio2 = p_norm2 / q_norm2
                value = math.sqrt(alpha * alpha + gamma * gamma * ratio2)
            if value > worst:
                worst = value
                worst_at = ((n, k), (theta.t1, theta.t2))
    return {
        "worst_block_bound": worst,
        "worst_at": worst_at,
        "max_abs_alpha": alpha_bound,
        "ok": worst <= 1.0 + tolerance,
    }


def coverage_check(theta_per_axis: int = 600, omega_per_axis: int = 100) -> dict:
    """Surjectivity of theta -> Z(theta) onto the domain, cell by cell.

    Every cell of the omega grid whose center lies strictly inside the
    domain must receive at least one image point of the theta grid.
    """
    two_pi = 2.0 * math.pi
    ts = np.arange(theta_per_axis) * two_pi / theta_per_axis
    t1, t2 = np.meshgrid(ts, ts, indexing="ij")
    z = z_of_theta(t1, t2).ravel()
    x_lo, x_hi = -1.0 / 3.0, 1.0
    y_hi = math.sqrt(3.0) / 2.0
    xs = np.clip(((z.real - x_lo) / (x_hi - x_lo) * omega_per_axis).astype(int), 0, omega_per_axis - 1)
    ys = np.clip(((z.imag + y_hi) / (2.0 * y_hi) * omega_per_axis).astype(int), 0, omega_per_axis - 1)
    hit = np.zeros((omega_per_axis, omega_per_axis), dtype=bool)
    hit[xs, ys] = True
    centers_x = x_lo + (np.arange(omega_per_axis) + 0.5) * (x_hi - x_lo) / omega_per_axis
    centers_y = -y_hi + (np.arange(omega_per_axis) + 0.5) * (2.0 * y_hi) / omega_per_axis
    cx, cy = np.meshgrid(centers_x, centers_y, indexing="ij")
    interior = np.asarray(deltoid_boundary_values(cx + 1j * cy)) > 0.0
    missed = int(np.count_nonzero(interior & ~hit))
    return {
        "interior_cells": int(interior.sum()),
        "missed_cells": missed,
        "ok": missed == 0,
    }


def block_cross_correlations(
    ctx: ProbeContext,
    theta: ThetaPair,
    batch: SampleBatch,
) -> list[dict]:
    """Empirical correlations between distinct-eigenvalue eigenfunctions.

    Commutation forces these to vanish; each entry reports the correlation
    normalized to unit-norm functions together with its standard error.
    """
    z_base = pushforward_deltoid(batch)
    z_rot = phi_theta(batch.points, theta).mean(axis=1)
    values: dict[tuple, np.ndarray] = {}
    for (n, k), (p_hat, q_hat) in ctx.pairs.items():
        p_norm2, q_norm2 = ctx.norms2[(n, k)]
        p_base, q_base = ctx.eval_pair(n, k, z_base)
        p_rot, q_rot = ctx.eval_pair(n, k, z_rot)
        values[("P", n, k, "base")] = p_base / math.sqrt(p_norm2)
        values[("P", n, k, "rot")] = p_rot / math.sqrt(p_norm2)
        if n != k:
            values[("Q", n, k, "base")] = q_base / math.sqrt(q_norm2)
            values[("Q", n, k, "rot")] = q_rot / math.sqrt(q_norm2)
    out = []
    nsamples = len(batch)
    indices = sorted(ctx.pairs)
    for i, (n1, k1) in enumerate(indices):
        for n2, k2 in indices[i:]:
            if eigenvalue_deltoid(ctx.lam, n1, k1) == eigenvalue_deltoid(ctx.lam, n2, k2):
                continue
            for f1 in ("P", "Q"):
                if f1 == "Q" and n1 == k1:
                    continue
                for f2 in ("P", "Q"):
                    if f2 == "Q" and n2 == k2:
                        continue
                    prods = values[(f1, n1, k1, "rot")] * values[(f2, n2, k2, "base")]
                    mean = float(prods.mean())
                    se = float(prods.std(ddof=1) / math.sqrt(nsamples))
                    out.append(
                        {
                            "pair": ((f1, n1, k1), (f2, n2, k2)),
                            "correlation": mean,
                            "standard_error": se,
                        }
                    )
    return out
