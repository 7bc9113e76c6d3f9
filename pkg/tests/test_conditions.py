import math

import numpy as np

from slantlab.conditions import (harmonicity_check,
                                 horizontal_foliation_check,
                                 parallel_omega_identity_check,
                                 phi_omega_identity_check,
                                 product_condition_check,
                                 second_fundamental_form,
                                 structural_identity_check, tension_field,
                                 tension_route_check, totally_geodesic_check,
                                 totally_geodesic_residuals,
                                 vertical_foliation_check)
from slantlab.config import Tolerances
from slantlab.geometry import ConstantField, norm
from slantlab.submersion import nabla_omega, oneill_t

from conftest import sample_points
from oracles import fd_jacobian

TOL = Tolerances()
E = np.eye(4)


def rng():
    return np.random.default_rng(99)


class TestSecondFundamentalForm:
    def test_linear_flat_vanishes(self, inst_alpha):
        gen = rng()
        for p in sample_points(inst_alpha, 5):
            x = ConstantField(gen.standard_normal(4))
            y = ConstantField(gen.standard_normal(4))
            out = second_fundamental_form(inst_alpha, p, x, y)
            assert np.max(np.abs(out)) < 1e-13

    def test_horizontal_pair_vanishes_on_submersion(self, inst_curved):
        """Horizontal second-fundamental-form terms vanish for a genuine
        Riemannian submersion, even on the curved instance."""
        for p in sample_points(inst_curved, 8):
            s = inst_curved.split(p)
            for h in s.horizontal:
                out = second_fundamental_form(inst_curved, p,
                                              ConstantField(h), ConstantField(h))
                assert np.max(np.abs(out)) < 1e-9

    def test_symmetry(self, inst_paraboloid, inst_curved):
        gen = rng()
        for inst in (inst_paraboloid, inst_curved):
            for p in sample_points(inst, 5):
                x = ConstantField(gen.standard_normal(4))
                y = ConstantField(gen.standard_normal(4))
                xy = second_fundamental_form(inst, p, x, y)
                yx = second_fundamental_form(inst, p, y, x)
                assert np.max(np.abs(xy - yx)) < 1e-10

    def test_mixed_projector_arguments_symmetric(self, inst_curved):
        p = np.array([0.2, -0.1, 0.3, 0.4])
        s = inst_curved.split(p)
        x = inst_curved.vertical_extension(p, s.vertical[0])
        z = inst_curved.horizontal_extension(p, s.horizontal[0])
        xz = second_fundamental_form(inst_curved, p, x, z)
        zx = second_fundamental_form(inst_curved, p, z, x)
        assert np.max(np.abs(xz - zx)) < 1e-9

    def test_fd_cross_check_on_paraboloid(self, inst_paraboloid):
        """Pullback-derivative term checked against finite differences."""
        p = np.array([0.1, 0.4, 0.7, -0.3])
        y = np.array([0.3, -0.2, 0.5, 0.8])
        x = np.array([1.0, 0.2, -0.4, 0.6])

        def f_star_y(q):
            return inst_paraboloid.jacobian_at(q) @ y

        d_fd = fd_jacobian(f_star_y, p) @ x
        # flat base, flat total: sff = d(F_* Y)(X) - F_*(0)
        got = second_fundamental_form(inst_paraboloid, p,
                                      ConstantField(x), ConstantField(y))
        assert np.allclose(got, d_fd, atol=1e-6)


class TestTension:
    def test_flat_linear_zero_both_routes(self, inst_alpha, inst_pi4):
        for inst in (inst_alpha, inst_pi4):
            for p in sample_points(inst, 5):
                tv = tension_field(inst, p)
                assert np.max(np.abs(tv.general_route)) < 1e-12
                assert np.max(np.abs(tv.fiber_route)) < 1e-12
                assert tv.discrepancy < 1e-12

    def test_curved_value_at_origin(self, inst_curved):
        """Frozen oracle: tau = (2, 0) at the origin, both routes."""
        tv = tension_field(inst_curved, (0.0, 0.0, 0.0, 0.0))
        assert np.allclose(tv.general_route, [2.0, 0.0], atol=1e-9)
        assert np.allclose(tv.fiber_route, [2.0, 0.0], atol=1e-9)
        assert tv.discrepancy < 1e-9

    def test_curved_flatbase_value_at_origin(self, inst_curved_flatbase):
        tv = tension_field(inst_curved_flatbase, (0.0, 0.0, 0.0, 0.0))
        assert np.allclose(tv.fiber_route, [2.0, 0.0], atol=1e-9)

    def test_route_agreement_scaling(self, inst_curved):
        """tau = exp(-2 x1) * (2, 0) away from the origin, both routes."""
        p = np.array([0.4, -0.3, 0.2, 0.6])
        tv = tension_field(inst_curved, p)
        expected = np.array([2.0 * math.exp(-2 * 0.4), 0.0])
        assert np.allclose(tv.general_route, expected, atol=1e-9)
        assert tv.discrepancy < 1e-9

    def test_route_check_on_submersions(self, inst_alpha, inst_curved,
                                        inst_hermitian, inst_anti):
        for inst in (inst_alpha, inst_curved, inst_hermitian, inst_anti):
            frames = inst.frames(sample_points(inst, 10))
            result = tension_route_check(frames, TOL)
            assert result.status == "pass", inst.name
            assert result.extras["max_discrepancy"] < 1e-6


class TestStructuralIdentities:
    def test_all_flat_fixture_instances(self, inst_pi4, inst_alpha,
                                        inst_hermitian, inst_anti):
        for inst in (inst_pi4, inst_alpha, inst_hermitian, inst_anti):
            frames = inst.frames(sample_points(inst, 8))
            result = structural_identity_check(frames, rng(), TOL)
            assert result.status == "pass", inst.name

    def test_curved_instance(self, inst_curved):
        frames = inst_curved.frames(sample_points(inst_curved, 8))
        result = structural_identity_check(frames, rng(), TOL)
        assert result.status == "pass"

    def test_paraboloid_nonzero_t_still_consistent(self, inst_paraboloid):
        """T symmetry, skewness and reconstruction do not need axiom S2."""
        frames = inst_paraboloid.frames(sample_points(inst_paraboloid, 6))
        tracker_result = structural_identity_check(frames, rng(), TOL)
        # A-bracket identity requires a Riemannian submersion, so run the
        # component identities directly instead of the full check
        for fr in frames:
            s = fr.require_split()
            v1, v2 = s.vertical
            assert fr.gnorm(oneill_t(fr, v1, v2) - oneill_t(fr, v2, v1)) < 1e-9
            gen = rng()
            for _ in range(3):
                e, f1, f2 = (gen.standard_normal(4) for _ in range(3))
                lhs = (oneill_t(fr, e, f1) @ fr.g @ f2
                       + f1 @ fr.g @ oneill_t(fr, e, f2))
                assert abs(lhs) < 1e-9

    def test_twisted_bracket_nonzero_but_consistent(self, inst_twisted):
        """The twisted instance has a varying kernel; reconstruction and
        T/A skewness hold even though it is not a Riemannian submersion."""
        gen = rng()
        for p in sample_points(inst_twisted, 6):
            fr = inst_twisted.frame(p)
            s = fr.require_split()
            for v in s.vertical:
                for w in s.vertical:
                    full = fr.cov_field("PV", w, v)
                    from slantlab.submersion import hat_nabla
                    recon = oneill_t(fr, v, w) + hat_nabla(fr, v, w)
                    assert fr.gnorm(full - recon) < 1e-9


class TestPhiOmegaIdentities:
    def test_flat_fixtures(self, inst_pi4, inst_alpha, inst_hermitian, inst_anti):
        for inst in (inst_pi4, inst_alpha, inst_hermitian, inst_anti):
            frames = inst.frames(sample_points(inst, 6))
            result = phi_omega_identity_check(frames, rng(), TOL)
            assert result.status == "pass", inst.name

    def test_nonzero_sides_on_paraboloid(self, inst_paraboloid):
        """Kaehler-conditional identities with genuinely nonzero terms."""
        frames = inst_paraboloid.frames(sample_points(inst_paraboloid, 8))
        result = phi_omega_identity_check(frames, rng(), TOL)
        assert result.status == "pass"
        saw_nonzero = False
        for fr in frames:
            s = fr.require_split()
            x, y = s.vertical[0], s.vertical[1]
            if fr.gnorm(nabla_omega(fr, x, y)) > 1e-3:
                saw_nonzero = True
        assert saw_nonzero

    def test_twisted_instance(self, inst_twisted):
        frames = inst_twisted.frames(sample_points(inst_twisted, 6))
        result = phi_omega_identity_check(frames, rng(), TOL)
        assert result.status == "pass"


class TestHarmonicity:
    def test_flat_fixtures_harmonic(self, inst_pi4, inst_alpha):
        for inst, theta in ((inst_pi4, math.pi / 4), (inst_alpha, math.pi / 3)):
            frames = inst.frames(sample_points(inst, 8))
            result = harmonicity_check(frames, theta, "ProperSlant", TOL,
                                       proper=True)
            assert result.status == "pass"
            assert result.extras["max_cancellation"] < 1e-12

    def test_hermitian_runs_without_adapted_frame(self, inst_hermitian):
        frames = inst_hermitian.frames(sample_points(inst_hermitian, 6))
        result = harmonicity_check(frames, 0.0, "Hermitian", TOL, proper=False)
        assert result.status == "pass"

    def test_parallel_omega_identities(self, inst_pi4, inst_alpha,
                                       inst_hermitian):
        for inst, theta in ((inst_pi4, math.pi / 4), (inst_alpha, math.pi / 3),
                            (inst_hermitian, 0.0)):
            frames = inst.frames(sample_points(inst, 6))
            result = parallel_omega_identity_check(frames, theta, rng(), TOL)
            assert result.status == "pass", inst.name


class TestFoliationConditions:
    def check_all(self, inst):
        frames = inst.frames(sample_points(inst, 8))
        v = vertical_foliation_check(frames, rng(), TOL)
        h = horizontal_foliation_check(frames, rng(), TOL)
        t = totally_geodesic_check(frames, rng(), TOL)
        p = product_condition_check(v, h, TOL)
        return v, h, t, p

    def test_flat_fixtures_all_hold(self, inst_pi4, inst_alpha,
                                    inst_hermitian, inst_anti):
        for inst in (inst_pi4, inst_alpha, inst_hermitian, inst_anti):
            v, h, t, p = self.check_all(inst)
            for result in (v, h, t, p):
                assert result.status == "pass", (inst.name, result.name)
            assert v.extras["condition_holds"] and v.extras["direct_holds"]
            assert h.extras["condition_holds"] and h.extras["direct_holds"]
            assert t.extras["condition_holds"] and t.extras["direct_holds"]
            assert p.extras["both_conditions_hold"]

    def test_curved_instance_coherent_violation(self, inst_curved):
        """Fibers of the curved instance are not totally geodesic; the
        condition residuals and the direct check must agree on that.

        The theorem hypothesis (Kaehler) fails here, so this exercises the
        raw residual functions, not the gated suite checks.
        """
        frames = inst_curved.frames(sample_points(inst_curved, 8))
        v = vertical_foliation_check(frames, rng(), TOL)
        assert not v.extras["direct_holds"]    # T_{d3} d3 = -d1 != 0
        t = totally_geodesic_check(frames, rng(), TOL)
        assert not t.extras["direct_holds"]
        assert t.extras["direct_max"] > 0.5

    def test_totally_geodesic_residual_nonzero_on_curved(self, inst_curved):
        fr = inst_curved.frame((0.0,) * 4)
        s = fr.require_split()
        c1, c2 = totally_geodesic_residuals(
            fr, s.vertical[0], s.vertical[0], s.horizontal[0], s.horizontal[1])
        # direct sff is nonzero on vertical pairs at the origin
        from slantlab.conditions import _sff_const
        g2, _ = fr.base_data
        assert norm(g2, _sff_const(fr, s.vertical[0], s.vertical[0])) > 0.5

    def test_product_check_composition(self, inst_pi4):
        frames = inst_pi4.frames(sample_points(inst_pi4, 4))
        v = vertical_foliation_check(frames, rng(), TOL)
        h = horizontal_foliation_check(frames, rng(), TOL)
        p = product_condition_check(v, h, TOL)
        assert p.status == "pass"
        assert p.detail.startswith("both foliations totally geodesic")


class TestEquivalenceCoherence:
    def test_paraboloid_vertical_foliation_violated_coherently(
            self, inst_paraboloid):
        """Curved fibers: the condition and the direct check must both flag
        the vertical foliation as not totally geodesic (Kaehler holds here,
        so the equivalence genuinely applies)."""
        frames = inst_paraboloid.frames(sample_points(inst_paraboloid, 8))
        v = vertical_foliation_check(frames, rng(), TOL)
        assert v.status == "pass"  # coherence: both sides say "violated"
        assert not v.extras["condition_holds"]
        assert not v.extras["direct_holds"]
        t = totally_geodesic_check(frames, rng(), TOL)
        assert t.status == "pass"
        assert not t.extras["condition_holds"]
        assert not t.extras["direct_holds"]

    def test_paraboloid_horizontal_foliation(self, inst_paraboloid):
        frames = inst_paraboloid.frames(sample_points(inst_paraboloid, 8))
        h = horizontal_foliation_check(frames, rng(), TOL)
        assert h.status == "pass"
        assert h.extras["condition_holds"] == h.extras["direct_holds"]
