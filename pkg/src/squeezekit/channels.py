"""Elementary physical steps of the squeezing protocols.

Builders for the atom-light Faraday pass, the quarter waveplate, the
double pass, the measurement-plus-feedback eraser step, atomic phase
rotations, anisotropic photon-scattering decay, and optical loss, together
with the microscopic coupling-strength bookkeeping.

Conventions: quadrature ordering and units as in :mod:`squeezekit.states`;
the quarter waveplate maps (X_L, P_L) -> (-P_L, X_L).  Under this sign the
double pass correlates the spin with the +45 degree light quadrature
(X_L + P_L)/sqrt(2), and the eraser measures the conjugate -45 degree
quadrature, i.e. homodyne angle 3*pi/4.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .states import (
    VACUUM_VAR,
    GaussianState,
    NoiseChannel,
    SymplecticMap,
    apply_channel,
    apply_symplectic,
    homodyne_condition,
    trace_out,
)

# homodyne angle measuring (-X_L + P_L)/sqrt(2) on the outgoing light
ERASER_ANGLE = 0.75 * math.pi


@dataclass(frozen=True)
class ImperfectionSettings:
    """Technical imperfections: inter-pass optical loss and detector noise.

    ``interpass_loss`` is the field-amplitude fraction lost between the two
    passes (the light quadratures are attenuated by 1 - loss, so the
    transmitted power fraction is (1 - loss)^2); ``detector_noise`` is the
    polarimeter noise variance as a fraction of the probe shot noise.
    """

    interpass_loss: float = 0.0
    detector_noise: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.interpass_loss < 1.0:
            raise ValueError(f"interpass_loss must be in [0, 1), got {self.interpass_loss}")
        if self.detector_noise < 0.0:
            raise ValueError(f"detector_noise must be >= 0, got {self.detector_noise}")

    @classmethod
    def ideal(cls) -> "ImperfectionSettings":
        return cls(0.0, 0.0)


@dataclass(frozen=True)
class DecayRates:
    """Dimensionless decay exponents per pulse for the atomic quadratures.

    ``gamma_par_tau`` damps the spin component along the light polarization
    (X_A here), ``gamma_perp_tau`` the perpendicular components (P_A and the
    mean spin).  Built from the scattering probability eta per spin-1/2
    optical pumping, the parallel rate is twice the perpendicular one.
    """

    gamma_par_tau: float = 0.0
    gamma_perp_tau: float = 0.0

    def __post_init__(self):
        if self.gamma_par_tau < 0 or self.gamma_perp_tau < 0:
            raise ValueError("decay exponents must be >= 0")

    @classmethod
    def from_eta(cls, eta: float) -> "DecayRates":
        if eta < 0:
            raise ValueError("eta must be >= 0")
        return cls(gamma_par_tau=8.0 * eta / 9.0, gamma_perp_tau=4.0 * eta / 9.0)

    def scaled(self, factor: float) -> "DecayRates":
        return DecayRates(self.gamma_par_tau * factor, self.gamma_perp_tau * factor)

    @property
    def is_zero(self) -> bool:
        return self.gamma_par_tau == 0.0 and self.gamma_perp_tau == 0.0


@dataclass(frozen=True)
class PhysicalParams:
    """Microscopic inputs: atom/photon numbers, wavelength, beam area, detuning, linewidth."""

    n_atoms: float
    n_photons: float
    wavelength: float
    beam_area: float
    detuning: float
    linewidth: float

    def __post_init__(self):
        for name in ("n_atoms", "wavelength", "beam_area", "detuning", "linewidth"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be > 0")
        if self.n_photons < 0:
            raise ValueError("n_photons must be >= 0")


def coupling_from_physical(p: PhysicalParams) -> tuple[float, float, float, float]:
    """Derived couplings (chi, rho, eta, xi) from microscopic parameters.

    chi = (sigma0/A)(Gamma/3 Delta) with sigma0 = 3 lambda^2 / 2 pi,
    rho = N_A sigma0/A, eta = N_L (sigma0/A)(Gamma^2/4 Delta^2) and
    xi = N_A N_L chi^2 / 4, which equals rho * eta / 9 identically.
    """
    sigma0 = 3.0 * p.wavelength**2 / (2.0 * math.pi)
    depth = sigma0 / p.beam_area
    chi = depth * p.linewidth / (3.0 * p.detuning)
    rho = p.n_atoms * depth
    eta = p.n_photons * depth * p.linewidth**2 / (4.0 * p.detuning**2)
    xi = p.n_atoms * p.n_photons * chi**2 / 4.0
    return chi, rho, eta, xi


def _embed_identity(num_modes: int) -> np.ndarray:
    return np.eye(2 * num_modes)


def faraday_map(num_modes: int, light_index: int, xi: float) -> SymplecticMap:
    """Symplectic matrix of one Faraday pass coupling atom and one light mode."""
    if xi < 0:
        raise ValueError("xi must be >= 0")
    k = math.sqrt(xi)
    S = _embed_identity(num_modes)
    S[0, 2 * light_index + 1] = k  # X_A += sqrt(xi) P_L
    S[2 * light_index, 1] = k      # X_L += sqrt(xi) P_A
    return SymplecticMap(S)


def faraday_pass(state: GaussianState, mode: str, xi: float) -> GaussianState:
    """One pass of the probe through the ensemble: X_A += sqrt(xi) P_L, X_L += sqrt(xi) P_A."""
    return apply_symplectic(state, faraday_map(state.num_modes, state.mode_index(mode), xi))


def waveplate_map(num_modes: int, light_index: int) -> SymplecticMap:
    S = _embed_identity(num_modes)
    i = 2 * light_index
    S[i, i] = 0.0
    S[i, i + 1] = -1.0
    S[i + 1, i + 1] = 0.0
    S[i + 1, i] = 1.0
    return SymplecticMap(S)


def waveplate_quarter(state: GaussianState, mode: str) -> GaussianState:
    """Quarter-wave polarization rotation of one light mode: (X_L, P_L) -> (-P_L, X_L)."""
    return apply_symplectic(state, waveplate_map(state.num_modes, state.mode_index(mode)))


def loss_channel(state: GaussianState, mode: str, loss: float) -> GaussianState:
    """Beam-splitter loss on one light mode, ``loss`` = amplitude fraction lost.

    The quadratures are attenuated by t = 1 - loss and topped up with
    vacuum noise (1 - t^2)/2, i.e. a beam splitter of power transmission
    t^2.
    """
    if not 0.0 <= loss < 1.0:
        raise ValueError(f"loss fraction must be in [0, 1), got {loss}")
    if loss == 0.0:
        return state
    t = 1.0 - loss
    k = state.mode_index(mode)
    m = state.num_modes
    G = _embed_identity(m)
    N = np.zeros((2 * m, 2 * m))
    for i in (2 * k, 2 * k + 1):
        G[i, i] = t
        N[i, i] = (1.0 - t * t) * VACUUM_VAR
    return apply_channel(state, NoiseChannel(G, N))


def double_pass(
    state: GaussianState, mode: str, xi: float, interpass_loss: float = 0.0
) -> GaussianState:
    """Faraday pass, quarter waveplate, second Faraday pass.

    Optical loss between the passes (if any) is applied to the light mode
    after the first pass; isotropic loss commutes with the waveplate.
    """
    out = faraday_pass(state, mode, xi)
    out = loss_channel(out, mode, interpass_loss)
    out = waveplate_quarter(out, mode)
    return faraday_pass(out, mode, xi)


def eraser_step(
    state: GaussianState,
    mode: str,
    xi: float,
    imp: ImperfectionSettings = ImperfectionSettings(),
    gain_mode: str = "conditioning",
) -> GaussianState:
    """Double pass followed by erasure of the residual spin-probe entanglement.

    The outgoing -45 degree light quadrature (which carries no spin signal
    for a lossless pass) is measured with detector noise and the spin is
    conditioned on the result; the feedback displacement only moves the
    mean and is absorbed by the feedback-cancelled mean convention.

    ``gain_mode='conditioning'`` applies the optimal-gain conditional
    update; ``'fixed_gain'`` applies the fixed feedback -sqrt(2 xi) times
    the measured value, for comparison.  The two coincide for a noiseless,
    lossless measurement.
    """
    out = double_pass(state, mode, xi, interpass_loss=imp.interpass_loss)
    if gain_mode == "conditioning":
        out, _ = homodyne_condition(out, mode, ERASER_ANGLE, imp.detector_noise)
        return out
    if gain_mode != "fixed_gain":
        raise ValueError(f"unknown gain_mode {gain_mode!r}")
    k = out.mode_index(mode)
    dim = 2 * out.num_modes
    h = np.zeros(dim)
    h[2 * k] = math.cos(ERASER_ANGLE)
    h[2 * k + 1] = math.sin(ERASER_ANGLE)
    c = out.cov @ h
    v_meas = float(h @ c) + imp.detector_noise * VACUUM_VAR
    g = -math.sqrt(2.0 * xi)
    ex = np.zeros(dim)
    ex[0] = 1.0
    cov = out.cov + g * (np.outer(ex, c) + np.outer(c, ex)) + g * g * v_meas * np.outer(ex, ex)
    out = GaussianState(out.mode_labels, out.mean.copy(), 0.5 * (cov + cov.T), out.contrast)
    return trace_out(out, mode)


def rotation_map(num_modes: int, phi: float) -> SymplecticMap:
    S = _embed_identity(num_modes)
    c, s = math.cos(phi), math.sin(phi)
    S[0, 0] = c
    S[0, 1] = -s
    S[1, 0] = s
    S[1, 1] = c
    return SymplecticMap(S)


def atom_rotation(state: GaussianState, phi: float) -> GaussianState:
    """Rotate the atomic quadratures (X_A, P_A) by phi about the mean-spin axis."""
    return apply_symplectic(state, rotation_map(state.num_modes, phi))


def scattering_factors(rates: DecayRates) -> tuple[float, float, float, float, float]:
    """Per-quadrature gains and noises (g_par, g_perp, n_par, n_perp, extra).

    Quadrature amplitudes decay like the spin components they linearize,
    g = exp(-gamma tau), and each variance relaxes toward the
    coherent-state floor 1/2 with noise n = (1 - g^2)/2.  For anisotropic
    rates this floor-restoring map alone is not completely positive; the
    smallest isotropic top-up ``extra`` restoring complete positivity
    ((n_par+extra)(n_perp+extra) = (1-g_par g_perp)^2/4) is added to both
    quadratures.  It vanishes for isotropic rates; for the 2:1 anisotropy
    used here it is (sqrt(10)-3)/4 * gamma_par*tau per pulse for small
    exponents, i.e. ~4 percent of the scattering noise itself.
    """
    g1 = math.exp(-rates.gamma_par_tau)
    g2 = math.exp(-rates.gamma_perp_tau)
    n1 = 0.5 * (1.0 - g1 * g1)
    n2 = 0.5 * (1.0 - g2 * g2)
    c = 0.5 * (1.0 - g1 * g2)
    extra = 0.5 * (math.hypot(n1 - n2, 2.0 * c) - (n1 + n2))
    return g1, g2, n1, n2, max(0.0, extra)


def scattering_channel(state: GaussianState, rates: DecayRates) -> GaussianState:
    """Anisotropic photon-scattering decay of the atomic mode.

    X_A (the spin component along the light polarization) decays in
    amplitude with exp(-gamma_par*tau), P_A with exp(-gamma_perp*tau), both
    variances relaxing toward the coherent-state noise floor; the mean-spin
    contrast decays with exp(-gamma_perp*tau).  Light modes are untouched.
    """
    if rates.is_zero:
        return state
    g1, g2, n1, n2, extra = scattering_factors(rates)
    m = state.num_modes
    G = _embed_identity(m)
    N = np.zeros((2 * m, 2 * m))
    G[0, 0] = g1
    G[1, 1] = g2
    N[0, 0] = n1 + extra
    N[1, 1] = n2 + extra
    return apply_channel(
        state, NoiseChannel(G, N, contrast_factor=math.exp(-rates.gamma_perp_tau))
    )
