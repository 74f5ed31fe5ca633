import math

import numpy as np
import pytest

from squeezekit import exact
from squeezekit.protocols import zeta_qe


class TestCoherentState:
    def test_normalized(self):
        for na, nl in [(1, 0), (20, 20), (100, 0), (31, 17)]:
            assert exact.coherent_state(na, nl).norm() == pytest.approx(1.0, abs=1e-12)

    def test_spin_pointing_along_x(self):
        s = exact.coherent_state(20, 4)
        mom = exact.spin_moments(s)
        assert mom["jx"] == pytest.approx(10.0, rel=1e-12)
        assert mom["jy"] == pytest.approx(0.0, abs=1e-12)
        assert mom["jz"] == pytest.approx(0.0, abs=1e-12)
        # projection noise N/4 in both transverse components
        assert mom["var_y"] == pytest.approx(5.0, rel=1e-12)
        assert mom["var_z"] == pytest.approx(5.0, rel=1e-12)
        assert mom["cov_yz"] == pytest.approx(0.0, abs=1e-12)

    def test_light_shot_noise(self):
        s = exact.coherent_state(4, 30)
        mom = exact.light_moments(s)
        assert mom["var_xl"] == pytest.approx(0.5, rel=1e-12)
        assert mom["var_pl"] == pytest.approx(0.5, rel=1e-12)
        assert mom["s2"] == pytest.approx(0.0, abs=1e-12)
        assert mom["s3"] == pytest.approx(0.0, abs=1e-12)

    def test_invalid_sizes(self):
        with pytest.raises(ValueError):
            exact.coherent_state(0, 5)


class TestFaraday:
    def test_zero_angle_identity(self):
        s = exact.coherent_state(10, 10)
        out = exact.evolve_faraday_exact(s, 0.0)
        assert np.array_equal(out.amps, s.amps)

    def test_unitary(self):
        s = exact.coherent_state(16, 12)
        out = exact.evolve_faraday_exact(s, 0.37)
        assert out.norm() == pytest.approx(1.0, abs=1e-12)
        # global phase invariance of the overlap magnitude
        assert abs(np.vdot(out.amps, out.amps)) == pytest.approx(1.0, abs=1e-12)

    @pytest.mark.parametrize("xi", [0.25, 0.5, 1.0])
    def test_hpa_light_variance(self, xi):
        n = 20
        chi = exact.chi_for_coupling(xi, n, n)
        out = exact.evolve_faraday_exact(exact.coherent_state(n, n), chi)
        got = exact.light_moments(out)["var_xl"]
        assert got == pytest.approx((1 + xi) / 2, rel=0.05)

    @pytest.mark.parametrize("xi", [0.25, 0.5, 1.0])
    def test_hpa_error_shrinks_with_size(self, xi):
        errs = []
        for n in (20, 40):
            chi = exact.chi_for_coupling(xi, n, n)
            out = exact.evolve_faraday_exact(exact.coherent_state(n, n), chi)
            got = exact.light_moments(out)["var_xl"]
            errs.append(abs(got - (1 + xi) / 2) / ((1 + xi) / 2))
        assert errs[1] < errs[0]

    def test_symmetric_backaction_on_spin(self):
        xi, n = 0.5, 20
        chi = exact.chi_for_coupling(xi, n, n)
        out = exact.evolve_faraday_exact(exact.coherent_state(n, n), chi)
        var_xa = exact.spin_moments(out)["var_y"] / (n / 2)
        assert var_xa == pytest.approx((1 + xi) / 2, rel=0.05)


class TestOneAxisTwist:
    def test_zero_twist(self):
        s = exact.coherent_state(40, 0)
        out = exact.one_axis_twist_exact(s, 0.0)
        assert exact.min_transverse_variance(out) == pytest.approx(10.0, rel=1e-12)

    def test_norm_preserved(self):
        s = exact.coherent_state(60, 0)
        out = exact.one_axis_twist_exact(s, 0.3)
        assert out.norm() == pytest.approx(1.0, abs=1e-12)

    @pytest.mark.parametrize("n_atoms,mu", [(12, 0.4), (30, 0.11), (75, 0.05)])
    def test_analytic_moments_match_exact_evolution(self, n_atoms, mu):
        # two independent exact routes: operator-ordering closed forms vs
        # direct state-vector evolution
        out = exact.one_axis_twist_exact(exact.coherent_state(n_atoms, 0), mu)
        assert exact.min_transverse_variance(out) == pytest.approx(
            exact.ku_variance(n_atoms, mu), rel=1e-10
        )
        assert exact.spin_moments(out)["jx"] == pytest.approx(
            exact.ku_mean_spin(n_atoms, mu), rel=1e-10
        )

    def test_twist_matches_shear_prediction_at_n_100(self):
        xi, n = 2.0, 100
        mu = exact.twist_for_coupling(xi, n)
        out = exact.one_axis_twist_exact(exact.coherent_state(n, 0), mu)
        got = exact.min_transverse_variance(out) / (n / 4)
        assert got == pytest.approx(zeta_qe(xi), rel=0.05)

    def test_hpa_deviation_shrinks_with_n(self):
        xi = 2.0
        errs = []
        for n in (50, 100, 200):
            mu = exact.twist_for_coupling(xi, n)
            out = exact.one_axis_twist_exact(exact.coherent_state(n, 0), mu)
            got = exact.min_transverse_variance(out) / (n / 4)
            errs.append(abs(got - zeta_qe(xi)) / zeta_qe(xi))
        assert errs[2] < errs[1] < errs[0]


class TestStokesRotation:
    def test_zero_angle_identity(self):
        s = exact.coherent_state(6, 8)
        out = exact.stokes_rotation_exact(s, "S1", 0.0)
        assert np.allclose(out.amps, s.amps, atol=1e-14)

    def test_full_turn_identity_up_to_phase(self):
        s = exact.coherent_state(6, 8)
        out = exact.stokes_rotation_exact(s, "S1", 2 * math.pi)
        assert abs(np.vdot(s.amps, out.amps)) == pytest.approx(1.0, abs=1e-10)

    def test_unsupported_axis(self):
        with pytest.raises(ValueError):
            exact.stokes_rotation_exact(exact.coherent_state(4, 4), "S2", 1.0)

    def test_norm_through_sequences(self):
        s = exact.coherent_state(12, 10)
        s = exact.evolve_faraday_exact(s, 0.21)
        s = exact.stokes_rotation_exact(s, "S1", 0.5 * math.pi)
        s = exact.evolve_faraday_exact(s, 0.21)
        s = exact.one_axis_twist_exact(s, 0.07)
        assert s.norm() == pytest.approx(1.0, abs=1e-12)

    def test_double_pass_matches_heisenberg_map_at_small_coupling(self):
        xi, n = 0.25, 20
        chi = exact.chi_for_coupling(xi, n, n)
        out = exact.double_pass_exact(exact.coherent_state(n, n), chi)
        var_xa = exact.spin_moments(out)["var_y"] / (n / 2)
        expected = (1 + xi**2 + 2 * xi) / 2
        assert var_xa == pytest.approx(expected, rel=0.05)

    def test_double_pass_hpa_error_shrinks_with_size(self):
        xi = 0.25
        errs = []
        for n in (20, 40):
            chi = exact.chi_for_coupling(xi, n, n)
            out = exact.double_pass_exact(exact.coherent_state(n, n), chi)
            var_xa = exact.spin_moments(out)["var_y"] / (n / 2)
            expected = (1 + xi**2 + 2 * xi) / 2
            errs.append(abs(var_xa - expected) / expected)
        assert errs[1] < errs[0]


class TestHelpers:
    def test_chi_for_coupling_inverts(self):
        chi = exact.chi_for_coupling(0.5, 20, 30)
        assert 20 * 30 * chi**2 / 4 == pytest.approx(0.5, rel=1e-12)

    def test_twist_angle_convention(self):
        assert exact.twist_for_coupling(2.0, 100) == pytest.approx(0.04, rel=1e-12)
