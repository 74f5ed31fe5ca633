import math

import numpy as np
import pytest

from squeezekit.channels import (
    DecayRates,
    ImperfectionSettings,
    PhysicalParams,
    atom_rotation,
    coupling_from_physical,
    double_pass,
    eraser_step,
    faraday_map,
    faraday_pass,
    loss_channel,
    rotation_map,
    scattering_channel,
    scattering_factors,
    waveplate_map,
    waveplate_quarter,
)
from squeezekit.states import (
    GaussianState,
    attach_vacuum,
    min_variance,
    new_state,
    symplectic_form,
    trace_out,
)

from conftest import random_state


def fresh(num_light=1):
    s = new_state(0)
    for _ in range(num_light):
        s = attach_vacuum(s)
    return s


class TestFaraday:
    def test_zero_coupling_is_identity(self, rng):
        s = random_state(rng, 1)
        out = faraday_pass(s, "L1", 0.0)
        assert np.allclose(out.cov, s.cov, atol=1e-15)

    def test_vacuum_second_moments(self):
        out = faraday_pass(fresh(), "L1", 1.0)
        assert out.cov[0, 0] == pytest.approx(1.0)       # Var(X_A)
        assert out.cov[0, 3] == pytest.approx(0.5)       # Cov(X_A, P_L)
        assert out.cov[1, 1] == pytest.approx(0.5)       # Var(P_A)
        assert out.cov[2, 2] == pytest.approx(1.0)       # Var(X_L)
        assert out.cov[2, 1] == pytest.approx(0.5)       # Cov(X_L, P_A)

    @pytest.mark.parametrize("xi", [0.3, 1.0, 4.0])
    def test_composition_doubles_coupling_amplitude(self, xi):
        # applying the pass twice equals one map with sqrt(xi) -> 2 sqrt(xi)
        S1 = faraday_map(2, 1, xi).S
        S2 = faraday_map(2, 1, 4.0 * xi).S  # sqrt(4 xi) = 2 sqrt(xi)
        assert np.allclose(S1 @ S1, S2, atol=1e-12)

    def test_negative_coupling_rejected(self):
        with pytest.raises(ValueError):
            faraday_pass(fresh(), "L1", -0.5)


class TestWaveplate:
    def test_four_applications_identity(self, rng):
        s = random_state(rng, 1)
        out = s
        for _ in range(4):
            out = waveplate_quarter(out, "L1")
        assert np.allclose(out.cov, s.cov, atol=1e-14)
        assert np.allclose(out.mean, s.mean, atol=1e-14)

    def test_two_applications_negate_light(self):
        S = waveplate_map(2, 1).S
        light = S[2:, 2:]
        assert np.allclose(light @ light, -np.eye(2), atol=1e-15)
        assert np.allclose(light, [[0, -1], [1, 0]], atol=1e-15)

    def test_vacuum_invariant(self):
        out = waveplate_quarter(fresh(), "L1")
        assert np.allclose(out.cov, 0.5 * np.eye(4), atol=1e-15)


class TestDoublePass:
    def test_zero_coupling_only_rotates_light(self, rng):
        s = random_state(rng, 1)
        out = double_pass(s, "L1", 0.0)
        expected = waveplate_quarter(s, "L1")
        assert np.allclose(out.cov, expected.cov, atol=1e-14)
        assert np.allclose(out.cov[:2, :2], s.cov[:2, :2], atol=1e-14)

    def test_traced_atom_block_at_xi_2(self):
        out = trace_out(double_pass(fresh(), "L1", 2.0), "L1")
        assert np.allclose(out.cov, [[4.5, 1.0], [1.0, 0.5]], atol=1e-12)

    def test_rotated_light_quadrature_moments(self):
        # +45 degree quadrature carries the spin signal: Var = (1+2 xi)/2,
        # Cov with P_A = sqrt(2 xi)/2
        xi = 2.0
        out = double_pass(fresh(), "L1", xi)
        xbar = np.zeros(4)
        xbar[2] = xbar[3] = 1 / np.sqrt(2)
        assert xbar @ out.cov @ xbar == pytest.approx((1 + 2 * xi) / 2, rel=1e-12)
        p_a = np.zeros(4)
        p_a[1] = 1.0
        assert xbar @ out.cov @ p_a == pytest.approx(np.sqrt(2 * xi) / 2, rel=1e-12)

    @pytest.mark.parametrize("xi", [0.0, 0.5, 2.0, 10.0, 100.0])
    def test_heisenberg_map_coefficients(self, xi):
        # in the (X_A, P_A, Xbar_L, Pbar_L) basis the composed map must be
        #   X_A += xi P_A + sqrt(2 xi) Xbar_L;  Xbar_L' = -Pbar_L + sqrt(2 xi) P_A;
        #   Pbar_L' = Xbar_L
        S_dp = (
            faraday_map(2, 1, xi).S @ waveplate_map(2, 1).S @ faraday_map(2, 1, xi).S
        )
        r = 1 / np.sqrt(2)
        T = np.eye(4)
        T[2:, 2:] = np.array([[r, r], [-r, r]])  # (X_L, P_L) -> (Xbar, Pbar)
        got = T @ S_dp @ np.linalg.inv(T)
        k = np.sqrt(2 * xi)
        expected = np.array(
            [
                [1.0, xi, k, 0.0],
                [0.0, 1.0, 0.0, 0.0],
                [0.0, k, 0.0, -1.0],
                [0.0, 0.0, 1.0, 0.0],
            ]
        )
        assert np.max(np.abs(got - expected)) < 1e-12

    def test_symplectic_condition_of_channel_maps(self, rng):
        omega = symplectic_form(2)
        for _ in range(1000):
            xi = float(rng.uniform(0, 50))
            S = faraday_map(2, 1, xi).S @ waveplate_map(2, 1).S @ rotation_map(2, rng.uniform(-3, 3)).S
            assert np.max(np.abs(S @ omega @ S.T - omega)) < 1e-10


class TestEraser:
    def test_ideal_eraser_is_pure_shear(self):
        out = eraser_step(fresh(), "L1", 2.0)
        assert out.mode_labels == ("A",)
        assert np.allclose(out.cov, [[2.5, 1.0], [1.0, 0.5]], atol=1e-12)

    @pytest.mark.parametrize("xi", [0.0, 0.1, 1.0, 10.0, 100.0])
    def test_eraser_equals_shear_for_all_couplings(self, xi):
        out = eraser_step(fresh(), "L1", xi)
        S = np.array([[1.0, xi], [0.0, 1.0]])
        assert np.max(np.abs(out.cov - S @ (0.5 * np.eye(2)) @ S.T)) < 1e-10

    def test_infinitely_noisy_measurement_erases_nothing(self):
        noisy = eraser_step(fresh(), "L1", 2.0, ImperfectionSettings(0.0, 1e15))
        traced = trace_out(double_pass(fresh(), "L1", 2.0), "L1")
        assert np.allclose(noisy.cov, traced.cov, atol=1e-10)

    def test_zero_coupling_identity_any_imperfection(self, rng):
        s = random_state(rng, 0)
        joined = attach_vacuum(s)
        out = eraser_step(joined, joined.mode_labels[-1], 0.0, ImperfectionSettings(0.3, 0.5))
        assert np.allclose(out.cov, s.cov, atol=1e-12)

    def test_fixed_gain_matches_conditioning_when_ideal(self):
        a = eraser_step(fresh(), "L1", 3.0, gain_mode="conditioning")
        b = eraser_step(fresh(), "L1", 3.0, gain_mode="fixed_gain")
        assert np.allclose(a.cov, b.cov, atol=1e-11)

    def test_fixed_gain_never_beats_conditioning(self, rng):
        for _ in range(50):
            xi = float(rng.uniform(0.1, 10))
            imp = ImperfectionSettings(float(rng.uniform(0, 0.3)), float(rng.uniform(0, 0.5)))
            a = eraser_step(fresh(), "L1", xi, imp, gain_mode="conditioning")
            b = eraser_step(fresh(), "L1", xi, imp, gain_mode="fixed_gain")
            assert min_variance(a)[0] <= min_variance(b)[0] + 1e-12

    def test_unknown_gain_mode(self):
        with pytest.raises(ValueError):
            eraser_step(fresh(), "L1", 1.0, gain_mode="bogus")

    def test_monotone_in_measurement_quality(self):
        # squeezing only degrades as detector noise or loss grow
        xi = 4.0
        for losses, noises in [
            ([0.0, 0.05, 0.1, 0.3], [0.02]),
            ([0.1], [0.0, 0.05, 0.2, 1.0]),
        ]:
            values = [
                min_variance(eraser_step(fresh(), "L1", xi, ImperfectionSettings(l, s)))[0]
                for l in losses
                for s in noises
            ]
            assert all(b >= a - 1e-12 for a, b in zip(values, values[1:]))


class TestAtomRotation:
    def test_zero_identity(self, rng):
        s = random_state(rng, 0)
        assert np.allclose(atom_rotation(s, 0.0).cov, s.cov, atol=1e-15)

    def test_quarter_turn_arithmetic(self):
        s = GaussianState(("A",), np.zeros(2), np.array([[2.5, 1.0], [1.0, 0.5]]))
        out = atom_rotation(s, np.pi / 2)
        assert np.allclose(out.cov, [[0.5, -1.0], [-1.0, 2.5]], atol=1e-12)

    def test_full_turn_identity(self, rng):
        s = random_state(rng, 0)
        out = atom_rotation(s, 2 * np.pi)
        assert np.allclose(out.cov, s.cov, atol=1e-12)


class TestScattering:
    def test_zero_rates_identity(self, rng):
        s = random_state(rng, 1)
        out = scattering_channel(s, DecayRates(0.0, 0.0))
        assert out is s

    def test_strong_rates_reach_noise_floor(self):
        s = GaussianState(("A",), np.zeros(2), np.array([[40.0, 3.0], [3.0, 9.0]]))
        out = scattering_channel(s, DecayRates(60.0, 30.0))
        assert np.allclose(out.cov, 0.5 * np.eye(2), atol=1e-10)
        assert out.contrast < 1e-12

    def test_operating_point_contrast(self):
        # eta = 0.18: gamma_perp*tau = 4*eta/9 = 0.08, contrast = e^-0.08
        rates = DecayRates.from_eta(0.18)
        assert rates.gamma_perp_tau == pytest.approx(0.08, rel=1e-12)
        assert rates.gamma_par_tau == pytest.approx(0.16, rel=1e-12)
        out = scattering_channel(new_state(0), rates)
        assert out.contrast == pytest.approx(math.exp(-0.08), rel=1e-12)
        assert out.contrast == pytest.approx(0.92312, abs=5e-6)

    def test_amplitude_decay_factors(self):
        rates = DecayRates(0.3, 0.15)
        g1, g2, n1, n2, extra = scattering_factors(rates)
        assert g1 == pytest.approx(math.exp(-0.3), rel=1e-12)
        assert g2 == pytest.approx(math.exp(-0.15), rel=1e-12)
        assert n1 == pytest.approx(0.5 * (1 - g1 * g1), rel=1e-12)
        assert n2 == pytest.approx(0.5 * (1 - g2 * g2), rel=1e-12)
        assert extra >= 0.0
        # complete positivity at the boundary
        assert (n1 + extra) * (n2 + extra) >= (0.5 * (1 - g1 * g2)) ** 2 - 1e-15

    def test_isotropic_rates_need_no_extra_noise(self):
        _, _, _, _, extra = scattering_factors(DecayRates(0.2, 0.2))
        assert extra == 0.0

    def test_vacuum_nearly_fixed_point(self):
        rates = DecayRates.from_eta(0.18 / 1024)
        out = scattering_channel(new_state(0), rates)
        # vacuum is heated only by the positivity top-up,
        # (sqrt(10)-3)/4 * gamma_par*tau for small exponents
        extra = scattering_factors(rates)[4]
        assert extra == pytest.approx((math.sqrt(10) - 3) / 4 * rates.gamma_par_tau, rel=1e-3)
        assert np.allclose(out.cov, (0.5 + extra) * np.eye(2), atol=1e-12)

    def test_uncertainty_preserved_on_random_states(self, rng):
        for _ in range(1000):
            s = random_state(rng, 0, mixed=bool(rng.integers(0, 2)))
            eta = float(rng.uniform(0, 1.5))
            out = scattering_channel(s, DecayRates.from_eta(eta))
            assert out.symplectic_eigenvalues().min() >= 0.5 - 1e-9

    def test_uncertainty_preserved_with_light_attached(self, rng):
        for _ in range(200):
            s = faraday_pass(attach_vacuum(random_state(rng, 0)), "L1", float(rng.uniform(0, 5)))
            out = scattering_channel(s, DecayRates(float(rng.uniform(0, 1)), float(rng.uniform(0, 1))))
            assert out.symplectic_eigenvalues().min() >= 0.5 - 1e-9

    def test_light_untouched(self, rng):
        s = random_state(rng, 1)
        out = scattering_channel(s, DecayRates.from_eta(0.3))
        assert np.allclose(out.cov[2:, 2:], s.cov[2:, 2:], atol=1e-14)

    def test_negative_rates_rejected(self):
        with pytest.raises(ValueError):
            DecayRates(-0.1, 0.0)


class TestLossChannel:
    def test_amplitude_attenuation_semantics(self):
        s = GaussianState(("A", "L1"), np.zeros(4), np.diag([0.5, 0.5, 2.0, 2.0]))
        out = loss_channel(s, "L1", 0.5)
        t = 0.5
        expected = t * t * 2.0 + (1 - t * t) * 0.5
        assert out.cov[2, 2] == pytest.approx(expected, rel=1e-12)

    def test_vacuum_fixed_point(self):
        out = loss_channel(fresh(), "L1", 0.37)
        assert np.allclose(out.cov, 0.5 * np.eye(4), atol=1e-14)

    def test_invalid_fraction(self):
        with pytest.raises(ValueError):
            loss_channel(fresh(), "L1", 1.0)


class TestCoupling:
    def p(self, **kw):
        base = dict(
            n_atoms=1e6,
            n_photons=1e8,
            wavelength=780e-9,
            beam_area=1e-8,
            detuning=1e10,
            linewidth=1e7,
        )
        base.update(kw)
        return PhysicalParams(**base)

    def test_identity_xi_rho_eta(self, rng):
        for _ in range(1000):
            p = self.p(
                n_atoms=float(rng.uniform(1e3, 1e8)),
                n_photons=float(rng.uniform(1e3, 1e10)),
                wavelength=float(rng.uniform(3e-7, 2e-6)),
                beam_area=float(rng.uniform(1e-10, 1e-6)),
                detuning=float(rng.uniform(1e8, 1e12)),
                linewidth=float(rng.uniform(1e6, 1e8)),
            )
            chi, rho, eta, xi = coupling_from_physical(p)
            assert xi == pytest.approx(rho * eta / 9.0, rel=1e-12)
            assert chi > 0 and rho > 0 and eta > 0

    def test_zero_photons_allowed(self):
        chi, rho, eta, xi = coupling_from_physical(self.p(n_photons=0.0))
        assert eta == 0.0 and xi == 0.0 and rho > 0

    def test_eta_inversion_example(self):
        # rho = 300 and xi = 6 require eta = 9 xi / rho = 0.18
        assert 9.0 * 6.0 / 300.0 == pytest.approx(0.18, rel=1e-15)

    def test_nonpositive_inputs_rejected(self):
        with pytest.raises(ValueError):
            self.p(beam_area=0.0)
        with pytest.raises(ValueError):
            self.p(detuning=-1.0)


class TestImperfectionSettings:
    def test_validation(self):
        with pytest.raises(ValueError):
            ImperfectionSettings(interpass_loss=1.0)
        with pytest.raises(ValueError):
            ImperfectionSettings(detector_noise=-0.01)
        ideal = ImperfectionSettings.ideal()
        assert ideal.interpass_loss == 0.0 and ideal.detector_noise == 0.0
