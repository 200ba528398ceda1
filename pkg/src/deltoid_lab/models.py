"""Constructors for every concrete diffusion model in the laboratory.

The zoo covers

* the deltoid-domain operator family (variables Z, Zb) with its quartic
  boundary polynomial,
* the 6-dimensional lifted operator on three complex coordinates whose
  projection under the average map reproduces the deltoid family,
* the flat-torus gradient model (the lambda = 1 geometric picture),
* the Casimir table on SU(3) evaluated pointwise (the lambda = 4 picture),
* the G2-symmetric projection in the variables s = Z + Zb, p = Z*Zb with its
  two boundary factors and the two-parameter measure family,
* the torus parametrization theta -> Z(theta) and the cubic-root membership
  classifier for the deltoid domain.

Conventions fixed here: the deltoid boundary polynomial is
P = Gamma(Z,Zb)^2 - Gamma(Z,Z)*Gamma(Zb,Zb) (positive inside the domain),
and the quintic G2 boundary factor q2 is *defined* by exact division of the
metric determinant by q1/4 rather than transcribed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
import numpy as np

from .diffusion import (
    DiffusionModel,
    MeasureSpec,
    drift_from_measure,
    pushforward,
)
from .poly import MPoly, divide_exact
from .scalars import RationalLike

DELTOID_VARS = ("Z", "Zb")
SIXDIM_VARS = ("z1", "z2", "z3", "zb1", "zb2", "zb3")
G2_VARS = ("s", "p")

DELTOID_CONJ_PAIRS = (("Z", "Zb"),)
SIXDIM_CONJ_PAIRS = (("z1", "zb1"), ("z2", "zb2"), ("z3", "zb3"))
G2_CONJ_PAIRS = (("s", "s"), ("p", "p"))

# j-rotation weights: Z -> j Z, Zb -> jbar Zb, and the 6-variable analogue.
DELTOID_J_WEIGHTS = {"Z": 1, "Zb": -1}
SIXDIM_J_WEIGHTS = {"z1": 1, "z2": 1, "z3": 1, "zb1": -1, "zb2": -1, "zb3": -1}


class IntegrabilityError(ValueError):
    """Measure parameters violate a finiteness condition."""


def _other_index(i: int, j: int) -> int:
    """The index in {0,1,2} distinct from both arguments."""
    return 3 - i - j


# ---------------------------------------------------------------------------
# Deltoid model
# ---------------------------------------------------------------------------


def deltoid_model(lam: RationalLike) -> DiffusionModel:
    """Deltoid-domain operator: Gamma table plus drift (-lam*Z, -lam*Zb)."""
    lam = Fraction(lam)
    if lam <= 0:
        raise ValueError(f"parameter must be positive, got {lam}")
    g = MPoly.variables_ring(DELTOID_VARS)
    Z, Zb = g["Z"], g["Zb"]
    gamma = {
        ("Z", "Z"): Zb - Z * Z,
        ("Zb", "Zb"): Z - Zb * Zb,
        ("Z", "Zb"): (1 - Z * Zb) * Fraction(1, 2),
    }
    drift = {"Z": Z * (-lam), "Zb": Zb * (-lam)}
    return DiffusionModel(DELTOID_VARS, gamma, drift, {"lambda": lam})


def deltoid_boundary_poly() -> MPoly:
    """P = Gamma(Z,Zb)^2 - Gamma(Z,Z)*Gamma(Zb,Zb); P > 0 inside the domain."""
    m = deltoid_model(1)
    gzz = m.gamma_entry("Z", "Z")
    gzbzb = m.gamma_entry("Zb", "Zb")
    gzzb = m.gamma_entry("Z", "Zb")
    return gzzb * gzzb - gzz * gzbzb


def deltoid_measure(lam: RationalLike) -> MeasureSpec:
    """Reversible measure density P**alpha with alpha = (2*lambda - 5)/6."""
    lam = Fraction(lam)
    alpha = (2 * lam - 5) / 6
    return MeasureSpec(((deltoid_boundary_poly(), alpha),), domain_tag="deltoid")


def deltoid_boundary_values(z: np.ndarray | complex) -> np.ndarray | float:
    """Numeric P(Z, conj(Z)); real-valued, positive inside the domain."""
    z = np.asarray(z, dtype=complex)
    zz = (z * z.conjugate()).real
    value = 0.25 - 1.5 * zz - 0.75 * zz * zz + 2.0 * (z**3).real
    return value if value.shape else float(value)


# ---------------------------------------------------------------------------
# 6-dimensional lifted model
# ---------------------------------------------------------------------------


def sixdim_model(lam: RationalLike) -> DiffusionModel:
    """Lifted operator on (z1, z2, z3) and conjugates projecting to the deltoid."""
    lam = Fraction(lam)
    if lam <= 0:
        raise ValueError(f"parameter must be positive, got {lam}")
    g = MPoly.variables_ring(SIXDIM_VARS)
    z = [g[f"z{i+1}"] for i in range(3)]
    zb = [g[f"zb{i+1}"] for i in range(3)]
    gamma: dict[tuple[str, str], MPoly] = {}
    for i in range(3):
        gamma[(f"z{i+1}", f"z{i+1}")] = -(z[i] * z[i])
        gamma[(f"zb{i+1}", f"zb{i+1}")] = -(zb[i] * zb[i])
        for j in range(i + 1, 3):
            c = _other_index(i, j)
            gamma[(f"z{i+1}", f"z{j+1}")] = zb[c] * Fraction(3, 2) - z[i] * z[j]
            gamma[(f"zb{i+1}", f"zb{j+1}")] = z[c] * Fraction(3, 2) - zb[i] * zb[j]
    for i in range(3):
        for j in range(3):
            entry = -(z[i] * zb[j]) * Fraction(1, 2)
            if i == j:
                entry = entry + Fraction(3, 2)
            gamma[(f"z{i+1}", f"zb{j+1}")] = entry
    drift = {f"z{i+1}": z[i] * (-lam) for i in range(3)}
    drift.update({f"zb{i+1}": zb[i] * (-lam) for i in range(3)})
    return DiffusionModel(SIXDIM_VARS, gamma, drift, {"lambda": lam})


def p1_p2() -> tuple[MPoly, MPoly]:
    """The two boundary factors of the lifted model, as honest polynomials.

    With S1 = sum z_i zb_i and S2 = sum (z_i zb_i)^2, and the polar product
    term 8*sigma realized as 4*(z1 z2 z3 + zb1 zb2 zb3):

        P1 = 2 - (S1 + 1)^2 + 2*S2 + 4*(z1 z2 z3 + zb1 zb2 zb3)
        P2 = 2*(S2 - 1) - (S1 - 1)^2
    """
    g = MPoly.variables_ring(SIXDIM_VARS)
    z = [g[f"z{i+1}"] for i in range(3)]
    zb = [g[f"zb{i+1}"] for i in range(3)]
    moduli = [z[i] * zb[i] for i in range(3)]
    s1 = moduli[0] + moduli[1] + moduli[2]
    s2 = moduli[0] ** 2 + moduli[1] ** 2 + moduli[2] ** 2
    prod_term = (z[0] * z[1] * z[2] + zb[0] * zb[1] * zb[2]) * 4
    p1 = 2 - (s1 + 1) ** 2 + s2 * 2 + prod_term
    p2 = (s2 - 1) * 2 - (s1 - 1) ** 2
    return p1, p2


def sixdim_measure(lam: RationalLike) -> MeasureSpec:
    """Reversible measure density P1**beta with beta = (2*lambda - 11)/6."""
    lam = Fraction(lam)
    beta = (2 * lam - 11) / 6
    if beta <= -1:
        raise IntegrabilityError(f"P1 exponent {beta} <= -1 is not integrable")
    p1, _ = p1_p2()
    return MeasureSpec(((p1, beta),), domain_tag="omega1")


PI_IMAGES = {
    "Z": (MPoly.var(SIXDIM_VARS, "z1") + MPoly.var(SIXDIM_VARS, "z2") + MPoly.var(SIXDIM_VARS, "z3"))
    * Fraction(1, 3),
    "Zb": (MPoly.var(SIXDIM_VARS, "zb1") + MPoly.var(SIXDIM_VARS, "zb2") + MPoly.var(SIXDIM_VARS, "zb3"))
    * Fraction(1, 3),
}


def project_sixdim_to_deltoid(lam: RationalLike) -> DiffusionModel:
    """Pushforward of the lifted model through the average map."""
    lam = Fraction(lam)
    return pushforward(sixdim_model(lam), PI_IMAGES, {"lambda": lam})


# ---------------------------------------------------------------------------
# Numeric membership and geometry helpers
# ---------------------------------------------------------------------------


def membership_deltoid(z: complex, tol: float = 1e-9, collision_tol: float = 1e-4) -> str:
    """Classify a point against the deltoid domain via cube-root moduli.

    The three roots of X^3 - 3 Z X^2 + 3 conj(Z) X - 1 all lie on the unit
    circle and are pairwise distinct exactly for interior points; a root
    collision signals the boundary.  Root collisions cannot be resolved to
    machine precision (a double/triple root perturbs the computed roots by
    eps**(1/2) / eps**(1/3)), so the collision band is wider than tol and is
    confirmed by the boundary polynomial vanishing, which is exactly the
    discriminant condition for a collision.
    """
    z = complex(z)
    roots = np.roots([1.0, -3.0 * z, 3.0 * np.conj(z), -1.0])
    moduli_dev = float(np.max(np.abs(np.abs(roots) - 1.0)))
    min_gap = min(
        abs(roots[i] - roots[j]) for i in range(3) for j in range(i + 1, 3)
    )
    if min_gap <= collision_tol and abs(deltoid_boundary_values(z)) < 1e-8:
        return "boundary"
    if moduli_dev < tol and min_gap > collision_tol:
        return "interior"
    return "exterior"


def omega1_membership(points: np.ndarray, boundary_tol: float = 1e-14) -> np.ndarray:
    """Vectorized membership for the lifted domain.

    points: (..., 3) complex.  The practical predicate is P1 > 0, P2 < 0 and
    max |z_i| < 1; contact with {P1 = 0} within boundary_tol counts as
    outside (zero-measure set, keeps log densities finite).
    """
    pts = np.asarray(points, dtype=complex)
    p1, p2 = omega1_boundary_values(pts)
    radii_ok = np.max(np.abs(pts), axis=-1) < 1.0
    return (p1 > boundary_tol) & (p2 < 0.0) & radii_ok


def omega1_boundary_values(points: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Numeric (P1, P2) on arrays of shape (..., 3)."""
    pts = np.asarray(points, dtype=complex)
    moduli2 = (pts * pts.conjugate()).real
    s1 = moduli2.sum(axis=-1)
    s2 = (moduli2**2).sum(axis=-1)
    prod = pts[..., 0] * pts[..., 1] * pts[..., 2]
    p1 = 2.0 - (s1 + 1.0) ** 2 + 2.0 * s2 + 8.0 * prod.real
    p2 = 2.0 * (s2 - 1.0) - (s1 - 1.0) ** 2
    return p1, p2


def p1_polar_decomposition_residual(points: np.ndarray) -> float:
    """Residual of the polar product form of P1.

    With sigma_0 = r1 + r2 + r3 and sigma_i flipping the sign of r_i, and
    theta the total phase, P1 equals

        S cos^2(theta/2) + D sin^2(theta/2),
        S = (1 + s0)(1 - s1)(1 - s2)(1 - s3),
        D = (1 - s0)(1 + s1)(1 + s2)(1 + s3).

    Returns the max absolute deviation over the points.
    """
    pts = np.atleast_2d(np.asarray(points, dtype=complex))
    r = np.abs(pts)
    theta = np.angle(pts).sum(axis=-1)
    s0 = r.sum(axis=-1)
    s1 = -r[..., 0] + r[..., 1] + r[..., 2]
    s2 = r[..., 0] - r[..., 1] + r[..., 2]
    s3 = r[..., 0] + r[..., 1] - r[..., 2]
    big_s = (1 + s0) * (1 - s1) * (1 - s2) * (1 - s3)
    big_d = (1 - s0) * (1 + s1) * (1 + s2) * (1 + s3)
    alt = big_s * np.cos(theta / 2.0) ** 2 + big_d * np.sin(theta / 2.0) ** 2
    p1, _ = omega1_boundary_values(pts)
    return float(np.max(np.abs(alt - p1)))


def omega1_segment_audit(
    points: np.ndarray, steps: int = 64, boundary_tol: float = 1e-14
) -> bool:
    """Continuity audit: the segment to the origin stays in the predicate set.

    The domain is defined as a connected component; the practical membership
    predicate is validated by checking sign constancy along straight rays to
    the center.  Returns True when no sampled segment leaves the set.
    """
    pts = np.atleast_2d(np.asarray(points, dtype=complex))
    ts = np.linspace(0.0, 1.0, steps + 1)[1:]
    for t in ts:
        if not bool(np.all(omega1_membership(pts * t, boundary_tol))):
            return False
    return True


def real_cometric_at(model: DiffusionModel, point: dict[str, complex]) -> np.ndarray:
    """Real-coordinate cometric matrix at a numeric point.

    Variables are assumed paired as (w, wb) conjugates; the real coordinates
    are x = (w + wb)/2 and y = (w - wb)/(2i) per pair.  Positive definiteness
    of the returned matrix is ellipticity at the point.
    """
    names = model.variables
    n = len(names)
    gamma_num = np.zeros((n, n), dtype=complex)
    for i, u in enumerate(names):
        for j, v in enumerate(names):
            entry = model.gamma.get((u, v))
            gamma_num[i, j] = entry.evaluate(point) if entry is not None else 0.0
    npairs = n // 2
    # Rows of d(real coordinate)/d(complex coordinate).
    jac = np.zeros((n, n), dtype=complex)
    for k in range(npairs):
        w, wb = k, npairs + k
        jac[2 * k, w] = 0.5
        jac[2 * k, wb] = 0.5
        jac[2 * k + 1, w] = -0.5j
        jac[2 * k + 1, wb] = 0.5j
    real_gamma = jac @ gamma_num @ jac.T
    return real_gamma.real


# ---------------------------------------------------------------------------
# Flat torus model (lambda = 1 picture)
# ---------------------------------------------------------------------------


def flat_torus_model() -> DiffusionModel:
    """Gradient-derived Gamma table for z_k = exp(i Re(z conj(e_k))).

    The three directions e_k are the cube roots of unity, so e_i . e_j is 1
    on the diagonal and -1/2 off it; Gamma(u, v) = grad u . grad v gives

        Gamma(z_i, z_j)   = -(e_i . e_j) z_i z_j
        Gamma(z_i, zb_j)  =  (e_i . e_j) z_i zb_j

    as unconstrained polynomials, and the Laplacian drift is -z_i.
    """
    g = MPoly.variables_ring(SIXDIM_VARS)
    z = [g[f"z{i+1}"] for i in range(3)]
    zb = [g[f"zb{i+1}"] for i in range(3)]
    gamma: dict[tuple[str, str], MPoly] = {}
    for i in range(3):
        gamma[(f"z{i+1}", f"z{i+1}")] = -(z[i] * z[i])
        gamma[(f"zb{i+1}", f"zb{i+1}")] = -(zb[i] * zb[i])
        for j in range(i + 1, 3):
            gamma[(f"z{i+1}", f"z{j+1}")] = z[i] * z[j] * Fraction(1, 2)
            gamma[(f"zb{i+1}", f"zb{j+1}")] = zb[i] * zb[j] * Fraction(1, 2)
    for i in range(3):
        for j in range(3):
            if i == j:
                gamma[(f"z{i+1}", f"zb{i+1}")] = z[i] * zb[i]
            else:
                gamma[(f"z{i+1}", f"zb{j+1}")] = -(z[i] * zb[j]) * Fraction(1, 2)
    drift = {f"z{i+1}": -z[i] for i in range(3)}
    drift.update({f"zb{i+1}": -zb[i] for i in range(3)})
    return DiffusionModel(SIXDIM_VARS, gamma, drift, {"lambda": Fraction(1)})


def constrained_torus_points(n: int, seed: int) -> np.ndarray:
    """Random points with |z_i| = 1 and z1 z2 z3 = 1, as (n, 3) arrays."""
    rng = np.random.default_rng(seed)
    t = rng.uniform(0.0, 2.0 * math.pi, size=(n, 2))
    z1 = np.exp(1j * t[:, 0])
    z2 = np.exp(1j * t[:, 1])
    z3 = np.exp(-1j * (t[:, 0] + t[:, 1]))
    return np.stack([z1, z2, z3], axis=1)


def flat_torus_sign_report(n: int = 1000, seed: int = 7) -> dict:
    """Adjudicate the sign of the flat cross term Gamma(z_i, zb_j), i != j.

    On the constraint set the lifted table gives -(1/2) z_i zb_j there; the
    candidate +(1/2) z_i zb_j variant is evaluated alongside.  Returns the
    max absolute deviation of each variant from the lifted entries over all
    Gamma entries at n constrained random points.
    """
    pts = constrained_torus_points(n, seed)
    lifted = sixdim_model(1)
    flat = flat_torus_model()
    point_dicts = {
        name: pts[:, i % 3] if i < 3 else np.conj(pts[:, i % 3])
        for i, name in enumerate(SIXDIM_VARS)
    }
    dev_minus = 0.0
    dev_plus = 0.0
    for i, u in enumerate(SIXDIM_VARS):
        for v in SIXDIM_VARS[i:]:
            lifted_vals = lifted.gamma_entry(u, v).evaluate(point_dicts)
            flat_vals = flat.gamma_entry(u, v).evaluate(point_dicts)
            dev_minus = max(dev_minus, float(np.max(np.abs(lifted_vals - flat_vals))))
            cross = (
                u.startswith("z")
                and not u.startswith("zb")
                and v.startswith("zb")
                and u[1:] != v[2:]
            )
            if cross:
                flipped = -flat_vals
            else:
                flipped = flat_vals
            dev_plus = max(dev_plus, float(np.max(np.abs(lifted_vals - flipped))))
    return {
        "deviation_minus_variant": dev_minus,
        "deviation_plus_variant": dev_plus,
        "matching_sign": "-1/2" if dev_minus < dev_plus else "+1/2",
        "points": int(n),
    }


# ---------------------------------------------------------------------------
# SU(3) Casimir picture (lambda = 4)
# ---------------------------------------------------------------------------

# The Casimir table below is normalized so that L(g_ij) = -(d^2-1) g_ij on
# SU(d); matching the deltoid table at lambda = 4 then requires the overall
# scale 1/2 for d = 3 (the scale making L(Z) = -4 Z).
SU3_CASIMIR_SCALE = 0.5


def su3_gamma_pointwise(g: np.ndarray, tol: float = 1e-10) -> dict:
    """Evaluate the scaled Casimir Gamma/L on the normalized trace at g.

    Returns the three values Gamma(Z,Z), Gamma(Z,Zb), L(Z) computed from the
    SU(3) entry table, together with their residuals against the deltoid
    table at lambda = 4 and the trace reduction tr(g^2) = 9 Z^2 - 6 Zb.
    """
    g = np.asarray(g, dtype=complex)
    if g.shape != (3, 3):
        raise ValueError("expected a 3x3 matrix")
    unitary_residual = float(np.linalg.norm(g.conj().T @ g - np.eye(3)))
    det_residual = abs(np.linalg.det(g) - 1.0)
    if unitary_residual > tol or det_residual > tol:
        raise ValueError(
            f"matrix is not special unitary: |g*g - I| = {unitary_residual:.3e}, "
            f"|det - 1| = {det_residual:.3e}"
        )
    z = np.trace(g) / 3.0
    zb = np.conj(z)
    tr_g2 = np.trace(g @ g)
    # Entry-table sums: Gamma(Z,Z) = (1/9) [ (tr g)^2 - 3 tr(g^2) ],
    # Gamma(Z,Zb) = (1/9) [ 9 - |tr g|^2 ], L(Z) = -8 Z.
    gamma_zz = SU3_CASIMIR_SCALE * ((3.0 * z) ** 2 - 3.0 * tr_g2) / 9.0
    gamma_zzb = SU3_CASIMIR_SCALE * (9.0 - (3.0 * z) * (3.0 * zb)) / 9.0
    l_z = SU3_CASIMIR_SCALE * (-8.0) * z
    return {
        "Z": z,
        "gamma_zz": gamma_zz,
        "gamma_zzb": gamma_zzb,
        "l_z": l_z,
        "residual_gamma_zz": abs(gamma_zz - (zb - z * z)),
        "residual_gamma_zzb": abs(gamma_zzb - 0.5 * (1.0 - z * zb)),
        "residual_l_z": abs(l_z - (-4.0) * z),
        "residual_trace_identity": abs(tr_g2 - (9.0 * z * z - 6.0 * zb)),
        "unitary_residual": unitary_residual,
    }


# ---------------------------------------------------------------------------
# Torus parametrization and the theta action
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ThetaPair:
    """Angle pair driving the coordinate rotations of the lifted model."""

    t1: float
    t2: float

    def is_interior(self, margin: float = 0.0) -> bool:
        """Z(theta) interior iff t1 != t2 and 2 t1 != -t2 (mod 2 pi)."""
        two_pi = 2.0 * math.pi
        d1 = (self.t1 - self.t2) % two_pi
        d2 = (2.0 * self.t1 + self.t2) % two_pi
        d3 = (self.t1 + 2.0 * self.t2) % two_pi
        gaps = [min(d, two_pi - d) for d in (d1, d2, d3)]
        return all(gap > margin for gap in gaps)


def z_of_theta(t1, t2):
    """Z(theta) = (exp(i t1) + exp(i t2) + exp(-i (t1 + t2))) / 3."""
    t1 = np.asarray(t1, dtype=float)
    t2 = np.asarray(t2, dtype=float)
    value = (np.exp(1j * t1) + np.exp(1j * t2) + np.exp(-1j * (t1 + t2))) / 3.0
    return value if value.shape else complex(value)


def phi_theta(points: np.ndarray, theta: ThetaPair | tuple[float, float]) -> np.ndarray:
    """Coordinate-wise rotation (z1, z2, z3) -> (e^{i t1} z1, e^{i t2} z2, e^{-i(t1+t2)} z3)."""
    t1, t2 = (theta.t1, theta.t2) if isinstance(theta, ThetaPair) else theta
    pts = np.asarray(points, dtype=complex)
    phases = np.array(
        [np.exp(1j * t1), np.exp(1j * t2), np.exp(-1j * (t1 + t2))], dtype=complex
    )
    return pts * phases


# ---------------------------------------------------------------------------
# G2 projection
# ---------------------------------------------------------------------------


def g2_gamma_table() -> dict[tuple[str, str], MPoly]:
    g = MPoly.variables_ring(G2_VARS)
    s, p = g["s"], g["p"]
    return {
        ("s", "s"): p - s * s + s + 1,
        ("s", "p"): s * s - p * 2 - s * p * Fraction(3, 2) + s * Fraction(1, 2),
        ("p", "p"): s**3 - p * p * 3 - s * p * 3 + p,
    }


def q1_q2() -> tuple[MPoly, MPoly]:
    """The parabola factor q1 = s^2 - 4p and the quintic's cubic factor q2.

    q2 is pinned by the exact identity det(Gamma) = (1/4) q1 q2: it is
    computed by exact division, not transcribed.
    """
    gamma = g2_gamma_table()
    det = gamma[("s", "s")] * gamma[("p", "p")] - gamma[("s", "p")] * gamma[("s", "p")]
    g = MPoly.variables_ring(G2_VARS)
    s, p = g["s"], g["p"]
    q1 = s * s - p * 4
    q2 = divide_exact(det * 4, q1)
    return q1, q2


def g2_integrability_ok(a1: Fraction, a2: Fraction) -> bool:
    return a1 > -1 and a2 > Fraction(-5, 6) and a1 + a2 > Fraction(-4, 3)


def g2_model(a1: RationalLike, a2: RationalLike) -> DiffusionModel:
    """G2-symmetric operator for the measure density q1**a1 * q2**a2.

    Finiteness requires a1 > -1, a2 > -5/6 and a1 + a2 > -4/3; the drift is
    derived from the measure, never transcribed.
    """
    a1, a2 = Fraction(a1), Fraction(a2)
    if not g2_integrability_ok(a1, a2):
        raise IntegrabilityError(
            f"measure parameters ({a1}, {a2}) violate a1 > -1, a2 > -5/6, a1 + a2 > -4/3"
        )
    gamma = g2_gamma_table()
    q1, q2 = q1_q2()
    drift = drift_from_measure(G2_VARS, gamma, [(q1, a1), (q2, a2)])
    return DiffusionModel(G2_VARS, gamma, drift, {"alpha1": a1, "alpha2": a2})


def g2_measure(a1: RationalLike, a2: RationalLike) -> MeasureSpec:
    a1, a2 = Fraction(a1), Fraction(a2)
    if not g2_integrability_ok(a1, a2):
        raise IntegrabilityError(f"({a1}, {a2}) not integrable")
    q1, q2 = q1_q2()
    return MeasureSpec(((q1, a1), (q2, a2)), domain_tag="g2")


def g2_from_lambda(lam: RationalLike) -> DiffusionModel:
    """G2 model matching the deltoid parameter: (a1, a2) = (-1/2, (2 lam - 5)/6)."""
    lam = Fraction(lam)
    return g2_model(Fraction(-1, 2), (2 * lam - 5) / 6)


PSI_IMAGES = {
    "s": MPoly.var(DELTOID_VARS, "Z") + MPoly.var(DELTOID_VARS, "Zb"),
    "p": MPoly.var(DELTOID_VARS, "Z") * MPoly.var(DELTOID_VARS, "Zb"),
}


def project_deltoid_to_g2(lam: RationalLike) -> DiffusionModel:
    """Pushforward of the deltoid model through s = Z + Zb, p = Z Zb."""
    lam = Fraction(lam)
    a2 = (2 * lam - 5) / 6
    return pushforward(
        deltoid_model(lam), PSI_IMAGES, {"alpha1": Fraction(-1, 2), "alpha2": a2}
    )


# The self-map of the G2 domain exchanging the two boundary components.  The
# second coordinate carries the factor 3 on the cubic part; this is the
# normalization under which the bitangent point (2, 1) is fixed and the
# parabola factor pulls back to exactly three times the cubic factor.
PSI1_IMAGES = {
    "S": MPoly.var(G2_VARS, "p") * 3 - 1,
    "P": (MPoly.var(G2_VARS, "s") ** 3 - MPoly.var(G2_VARS, "s") * MPoly.var(G2_VARS, "p") * 3) * 3
    - MPoly.var(G2_VARS, "p") * 6
    + 1,
}


def psi1_map(s, p):
    """Numeric self-map (s, p) -> (3p - 1, 1 + 3 s^3 - 9 p s - 6 p)."""
    s = np.asarray(s, dtype=float)
    p = np.asarray(p, dtype=float)
    big_s = 3.0 * p - 1.0
    big_p = 1.0 + 3.0 * s**3 - 9.0 * p * s - 6.0 * p
    if big_s.shape:
        return big_s, big_p
    return float(big_s), float(big_p)


def psi1_intertwining_factor(a2: RationalLike) -> Fraction:
    """Exact scalar c with pushforward(g2(-1/2, a2)) = c * g2(a2, -1/2).

    Raises NotClosedError when the pushforward is not closed and ValueError
    when no exact proportionality holds.  The computed factor is 3: the map
    triples the operator (equivalently, one third of the image operator is
    the parameter-swapped model).
    """
    a2 = Fraction(a2)
    source = g2_model(Fraction(-1, 2), a2)
    image = pushforward(source, PSI1_IMAGES)
    target = g2_model(a2, Fraction(-1, 2))
    rename = {"S": MPoly.var(("S", "P"), "S"), "P": MPoly.var(("S", "P"), "P")}
    factor: Fraction | None = None
    pairs: list[tuple[MPoly, MPoly]] = []
    for key in (("s", "s"), ("s", "p"), ("p", "p")):
        upstairs = image.gamma_entry(key[0].upper(), key[1].upper())
        downstairs = target.gamma_entry(*key).subs(
            {"s": rename["S"], "p": rename["P"]}
        )
        pairs.append((upstairs, downstairs))
    for var in ("s", "p"):
        downstairs = target.drift[var].subs({"s": rename["S"], "p": rename["P"]})
        pairs.append((image.drift[var.upper()], downstairs))
    for upstairs, downstairs in pairs:
        if downstairs.is_zero():
            if not upstairs.is_zero():
                raise ValueError("image entry nonzero where target vanishes")
            continue
        exps, coeff = downstairs.leading()
        ratio = upstairs.coefficient(exps) / coeff
        if not ratio.is_rational():
            raise ValueError("proportionality factor is not rational")
        c = ratio.rational_value()
        if factor is None:
            factor = c
        elif factor != c:
            raise ValueError(f"entries disagree on the factor: {factor} vs {c}")
        if upstairs != downstairs * c:
            raise ValueError("image is not an exact scalar multiple of the target")
    if factor is None:
        raise ValueError("degenerate model comparison")
    return factor


# ---------------------------------------------------------------------------
# Registry
# ---------------------------------------------------------------------------


MODEL_REGISTRY = {
    "deltoid": {"constructor": "deltoid_model", "params": {"lambda": "> 0"}},
    "sixdim": {"constructor": "sixdim_model", "params": {"lambda": "> 0"}},
    "flat_torus": {"constructor": "flat_torus_model", "params": {}},
    "g2": {
        "constructor": "g2_model",
        "params": {"alpha1": "> -1", "alpha2": "> -5/6", "alpha1+alpha2": "> -4/3"},
    },
}
