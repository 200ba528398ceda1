import math
from fractions import Fraction

import numpy as np
import pytest

from deltoid_lab.diffusion import NotClosedError, boundary_ideal_check, gamma_apply, pushforward
from deltoid_lab.models import (
    DELTOID_VARS,
    G2_VARS,
    PSI1_IMAGES,
    PSI_IMAGES,
    SIXDIM_VARS,
    IntegrabilityError,
    ThetaPair,
    constrained_torus_points,
    deltoid_boundary_poly,
    deltoid_boundary_values,
    deltoid_model,
    flat_torus_model,
    flat_torus_sign_report,
    g2_from_lambda,
    g2_model,
    membership_deltoid,
    omega1_boundary_values,
    omega1_membership,
    omega1_segment_audit,
    p1_p2,
    p1_polar_decomposition_residual,
    phi_theta,
    psi1_intertwining_factor,
    psi1_map,
    q1_q2,
    real_cometric_at,
    sixdim_model,
    su3_gamma_pointwise,
    z_of_theta,
)
from deltoid_lab.poly import MPoly, divide_exact, try_divide

J = complex(-0.5, math.sqrt(3) / 2)


class TestDeltoidModel:
    def test_table(self):
        m = deltoid_model(4)
        g = MPoly.variables_ring(DELTOID_VARS)
        Z, Zb = g["Z"], g["Zb"]
        assert m.gamma_entry("Z", "Z") == Zb - Z * Z
        assert m.gamma_entry("Zb", "Zb") == Z - Zb * Zb
        assert m.gamma_entry("Z", "Zb") == (1 - Z * Zb) * Fraction(1, 2)
        assert m.drift["Z"] == Z * (-4)

    def test_lambda_positive_required(self):
        with pytest.raises(ValueError):
            deltoid_model(0)
        with pytest.raises(ValueError):
            deltoid_model(Fraction(-1, 2))

    def test_boundary_is_metric_discriminant(self):
        m = deltoid_model(1)
        p = deltoid_boundary_poly()
        assert p == m.gamma_entry("Z", "Zb") ** 2 - m.gamma_entry("Z", "Z") * m.gamma_entry("Zb", "Zb")
        # Orientation: positive inside.
        assert p.constant_term().rational_value() == Fraction(1, 4)


class TestSixdimModel:
    def test_table_entries(self):
        m = sixdim_model(2)
        g = MPoly.variables_ring(SIXDIM_VARS)
        assert m.gamma_entry("z1", "z2") == g["zb3"] * Fraction(3, 2) - g["z1"] * g["z2"]
        assert m.gamma_entry("z1", "zb1") == (g["z1"] * g["zb1"]) * Fraction(-1, 2) + Fraction(3, 2)
        assert m.gamma_entry("z2", "zb3") == (g["z2"] * g["zb3"]) * Fraction(-1, 2)
        assert m.gamma_entry("z1", "z1") == -(g["z1"] * g["z1"])

    def test_p1_p2_values(self):
        p1, p2 = p1_p2()
        origin = {v: Fraction(0) for v in SIXDIM_VARS}
        assert p1.evaluate_exact(origin).rational_value() == 1
        assert p2.evaluate_exact(origin).rational_value() == -3
        ones = {v: Fraction(1) for v in SIXDIM_VARS}
        assert not p1.evaluate_exact(ones)  # (1,1,1) lies on the boundary

    def test_projection_to_deltoid(self):
        from deltoid_lab.models import PI_IMAGES, project_sixdim_to_deltoid

        assert project_sixdim_to_deltoid(2) == deltoid_model(2)
        assert pushforward(sixdim_model(3), PI_IMAGES, {"lambda": Fraction(3)}) == deltoid_model(3)

    def test_boundary_cofactors(self):
        m = sixdim_model(2)
        p1, _ = p1_p2()
        cof = boundary_ideal_check(m, p1)
        for v in SIXDIM_VARS:
            assert cof[v] == MPoly.var(SIXDIM_VARS, v) * (-3)

    def test_measure_spec_integrability(self):
        from deltoid_lab.models import sixdim_measure

        spec = sixdim_measure(4)
        (base, exponent), = spec.density_factors
        assert exponent == Fraction(2 * 4 - 11, 6)
        assert spec.domain_tag == "omega1"
        with pytest.raises(IntegrabilityError):
            sixdim_measure(Fraction(5, 2))  # exponent -1 is not integrable


class TestG2Model:
    def test_gamma_table(self):
        m = g2_model(Fraction(-1, 2), Fraction(1, 2))
        g = MPoly.variables_ring(G2_VARS)
        s, p = g["s"], g["p"]
        assert m.gamma_entry("p", "p") == s ** 3 - p * p * 3 - s * p * 3 + p

    def test_drift_family(self):
        lam = Fraction(3)
        m = g2_from_lambda(lam)
        g = MPoly.variables_ring(G2_VARS)
        assert m.drift["s"] == g["s"] * (-lam)
        assert m.drift["p"] == g["p"] * (-(2 * lam + 1)) + 1

    def test_lebesgue_case(self):
        from deltoid_lab.diffusion import divergence_sums

        m = g2_model(0, 0)
        assert dict(m.drift) == divergence_sums(m)

    def test_integrability_conditions(self):
        with pytest.raises(IntegrabilityError):
            g2_model(Fraction(-1), 0)
        with pytest.raises(IntegrabilityError):
            g2_model(0, Fraction(-5, 6))
        with pytest.raises(IntegrabilityError):
            g2_model(Fraction(-3, 4), Fraction(-3, 4))

    def test_q1_q2(self):
        q1, q2 = q1_q2()
        g = MPoly.variables_ring(G2_VARS)
        s, p = g["s"], g["p"]
        assert q1 == s * s - p * 4
        # q2 is pinned by exact division of the determinant, and matches the
        # printed variant with the p^2 head, not the s^2 one.
        assert q2 == p * p * 3 + s * p * 12 + p * 6 - s ** 3 * 4 - 1
        assert q2 != s * s * 3 + s * p * 12 + p * 6 - s ** 3 * 4 - 1
        gamma = g2_model(0, 0).gamma
        det = gamma[("s", "s")] * gamma[("p", "p")] - gamma[("s", "p")] ** 2
        assert divide_exact(det * 4, q1) == q2

    def test_q_pullbacks_to_deltoid(self):
        q1, q2 = q1_q2()
        sub = {"s": PSI_IMAGES["s"], "p": PSI_IMAGES["p"]}
        g = MPoly.variables_ring(DELTOID_VARS)
        assert q1.subs(sub) == (g["Z"] - g["Zb"]) ** 2
        assert q2.subs(sub) == deltoid_boundary_poly() * (-4)

    def test_q1_vanishes_on_real_image(self):
        q1, _ = q1_q2()
        for x in (Fraction(1, 3), Fraction(-2, 5)):
            val = q1.evaluate_exact({"s": 2 * x, "p": x * x})
            assert not val


class TestPsi1:
    def test_fixed_bitangent_point(self):
        assert psi1_map(2.0, 1.0) == (2.0, 1.0)

    def test_parabola_maps_to_cubic(self):
        q1, q2 = q1_q2()
        for x in np.linspace(-0.9, 0.9, 7):
            s, p = 2 * x, x * x  # on the parabola q1 = 0
            S, P = psi1_map(s, p)
            assert abs(3 * P * P + 12 * S * P + 6 * P - 4 * S ** 3 - 1) < 1e-12

    def test_boundary_factor_exchange_exact(self):
        q1, q2 = q1_q2()
        big = MPoly.variables_ring(("S", "P"))
        sub = {"S": PSI1_IMAGES["S"], "P": PSI1_IMAGES["P"]}
        assert (big["S"] ** 2 - big["P"] * 4).subs(sub) == q2 * 3
        pull_q2 = (big["P"] ** 2 * 3 + big["S"] * big["P"] * 12 + big["P"] * 6
                   - big["S"] ** 3 * 4 - 1).subs(sub)
        assert try_divide(pull_q2, q1) is not None

    @pytest.mark.parametrize("a2", [Fraction(0), Fraction(1, 2), Fraction(3, 2)])
    def test_intertwining_factor_three(self, a2):
        # The self-map triples the operator: image of the (-1/2, a2) model is
        # exactly 3 x the (a2, -1/2) model, i.e. one third of the image is
        # the parameter-swapped operator.
        assert psi1_intertwining_factor(a2) == 3

    def test_not_closed_off_half_integer(self):
        with pytest.raises(NotClosedError):
            pushforward(g2_model(0, Fraction(1, 2)), PSI1_IMAGES)


class TestFlatTorus:
    def test_gradient_table(self):
        m = flat_torus_model()
        g = MPoly.variables_ring(SIXDIM_VARS)
        assert m.gamma_entry("z1", "z1") == -(g["z1"] * g["z1"])
        assert m.gamma_entry("z1", "zb1") == g["z1"] * g["zb1"]
        assert m.gamma_entry("z1", "zb2") == (g["z1"] * g["zb2"]) * Fraction(-1, 2)
        assert m.drift["z2"] == -g["z2"]

    def test_constraint_set_matches_lifted_table(self):
        report = flat_torus_sign_report(400, seed=9)
        assert report["matching_sign"] == "-1/2"
        assert report["deviation_minus_variant"] < 1e-10
        assert report["deviation_plus_variant"] > 0.4

    def test_gamma_zz_on_constraints(self):
        pts = constrained_torus_points(300, 4)
        m = flat_torus_model()
        zimg = sum(
            (MPoly.var(SIXDIM_VARS, f"z{i}") for i in (2, 3)),
            MPoly.var(SIXDIM_VARS, "z1"),
        ) * Fraction(1, 3)
        gzz = gamma_apply(m, zimg, zimg)
        point = {
            name: pts[:, i % 3] if i < 3 else np.conj(pts[:, i % 3])
            for i, name in enumerate(SIXDIM_VARS)
        }
        zvals = pts.mean(axis=1)
        assert np.max(np.abs(gzz.evaluate(point) - (np.conj(zvals) - zvals ** 2))) < 1e-12


class TestSU3:
    def test_identity_matrix(self):
        res = su3_gamma_pointwise(np.eye(3))
        assert res["Z"] == 1.0
        assert res["residual_gamma_zzb"] < 1e-14
        assert abs(res["gamma_zzb"]) < 1e-14  # (1 - Z Zb)/2 = 0 at Z = 1

    def test_haar_samples_match_lambda_four_table(self):
        from deltoid_lab.sampling import sample_su3_haar

        gs = sample_su3_haar(300, 5).points
        for g in gs:
            res = su3_gamma_pointwise(g)
            assert res["residual_gamma_zz"] < 1e-12
            assert res["residual_gamma_zzb"] < 1e-12
            assert res["residual_l_z"] < 1e-12
            assert res["residual_trace_identity"] < 1e-12

    def test_rejects_non_unitary(self):
        with pytest.raises(ValueError):
            su3_gamma_pointwise(np.eye(3) * 1.5)


class TestMembership:
    def test_reference_points(self):
        assert membership_deltoid(0) == "interior"
        assert membership_deltoid(1) == "boundary"  # cusp
        assert membership_deltoid(J) == "boundary"  # cusp
        assert membership_deltoid(2) == "exterior"

    def test_cross_check_with_boundary_sign(self):
        rng = np.random.default_rng(6)
        pts = rng.uniform(-1.2, 1.2, size=(2000, 2))
        z = pts[:, 0] + 1j * pts[:, 1]
        pvals = np.asarray(deltoid_boundary_values(z))
        keep = np.abs(pvals) > 1e-6
        for zz, pv in zip(z[keep], pvals[keep]):
            assert (membership_deltoid(complex(zz)) == "interior") == (pv > 0)


class TestOmega1:
    def test_membership_and_audit(self):
        rng = np.random.default_rng(8)
        pts = np.sqrt(rng.uniform(size=(5000, 3))) * np.exp(
            1j * rng.uniform(0, 2 * math.pi, size=(5000, 3))
        )
        mask = omega1_membership(pts)
        inside = pts[mask]
        assert 0.01 < mask.mean() < 0.2
        p1, p2 = omega1_boundary_values(inside)
        assert np.all(p1 > 0) and np.all(p2 < 0)
        # Segment audit: rays to the origin stay inside.
        assert omega1_segment_audit(inside[:50])

    def test_polar_decomposition(self):
        rng = np.random.default_rng(9)
        pts = np.sqrt(rng.uniform(size=(500, 3))) * np.exp(
            1j * rng.uniform(0, 2 * math.pi, size=(500, 3))
        )
        assert p1_polar_decomposition_residual(pts) < 1e-12

    def test_ellipticity_at_samples(self):
        from deltoid_lab.sampling import sample_omega1

        pts = sample_omega1(Fraction(11, 2), 100, 3, method="rejection").points
        m = sixdim_model(3)
        for z in pts:
            point = {f"z{i+1}": z[i] for i in range(3)}
            point |= {f"zb{i+1}": np.conj(z[i]) for i in range(3)}
            assert np.linalg.eigvalsh(real_cometric_at(m, point)).min() > 0


class TestThetaMap:
    def test_values(self):
        assert z_of_theta(0.0, 0.0) == pytest.approx(1.0)
        assert z_of_theta(2 * math.pi / 3, 2 * math.pi / 3) == pytest.approx(J)

    def test_conjugation_parity(self):
        z = z_of_theta(1.0, 2.0)
        assert z_of_theta(-1.0, -2.0) == pytest.approx(np.conj(z))

    def test_group_law(self):
        pts = constrained_torus_points(10, 12)
        a, b = ThetaPair(0.3, 1.1), ThetaPair(0.7, 0.2)
        combined = ThetaPair(1.0, 1.3)
        assert np.allclose(
            phi_theta(phi_theta(pts, a), b), phi_theta(pts, combined)
        )

    def test_interior_predicate(self):
        assert ThetaPair(1.0, 2.0).is_interior()
        assert not ThetaPair(1.0, 1.0).is_interior()
        assert not ThetaPair(1.0, -2.0).is_interior()  # 2 t1 + t2 = 0
