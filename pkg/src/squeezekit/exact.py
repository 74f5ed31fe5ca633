"""Exact simulation of a collective spin coupled to a two-mode photon field.

Validates the Gaussian (Holstein-Primakoff) maps at desk scale.  The spin of
N_A two-level atoms lives in the symmetric subspace |J, m> with J = N_A/2;
the probe is a two-mode field with a fixed total photon number N_L written
in the circular-polarization basis |n_+, n_->, where the Stokes component
S_3 = (n_+ - n_-)/2 is diagonal.

Basis ordering (stable, used by every function here): amplitudes are a
complex array of shape (N_A + 1, N_L + 1); row i holds m = i - J scanning
-J..J, column p holds n_+ = p (so n_- = N_L - p and s_3 = p - N_L/2).

Initial condition: spin coherent along +x, light linearly polarized along y
(the Stokes vector points along -S_1 with |<S_1>| = N_L/2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class ExactState:
    """State vector over |J, m> x |n_+, n_->, amplitudes shape (N_A+1, N_L+1)."""

    amps: np.ndarray
    n_atoms: int
    n_photons: int

    @property
    def j(self) -> float:
        return 0.5 * self.n_atoms

    def norm(self) -> float:
        return float(np.sqrt(np.vdot(self.amps, self.amps).real))


def _sqrt_binomial_profile(n: int) -> np.ndarray:
    """Amplitudes sqrt(C(n, k))/2^(n/2) for k = 0..n, via log-gamma."""
    k = np.arange(n + 1)
    logc = (
        math.lgamma(n + 1)
        - np.array([math.lgamma(v + 1) for v in k])
        - np.array([math.lgamma(n - v + 1) for v in k])
    )
    return np.exp(0.5 * logc - 0.5 * n * math.log(2.0))


def coherent_state(n_atoms: int, n_photons: int) -> ExactState:
    """Spin coherent state along +x tensor N_L photons linearly polarized along y."""
    if n_atoms < 1 or n_photons < 0:
        raise ValueError("need n_atoms >= 1 and n_photons >= 0")
    spin = _sqrt_binomial_profile(n_atoms)  # index i: m = i - J
    light = _sqrt_binomial_profile(n_photons)
    signs = (-1.0) ** (n_photons - np.arange(n_photons + 1))
    amps = np.outer(spin, light * signs).astype(complex)
    return ExactState(amps=amps, n_atoms=n_atoms, n_photons=n_photons)


def _m_values(state: ExactState) -> np.ndarray:
    return np.arange(state.n_atoms + 1) - state.j


def _s3_values(state: ExactState) -> np.ndarray:
    return np.arange(state.n_photons + 1) - 0.5 * state.n_photons


def evolve_faraday_exact(state: ExactState, chi: float) -> ExactState:
    """Faraday unitary exp(-i chi J_z S_3): diagonal in this basis, exact."""
    phases = np.exp(-1j * chi * np.outer(_m_values(state), _s3_values(state)))
    return ExactState(state.amps * phases, state.n_atoms, state.n_photons)


def one_axis_twist_exact(state: ExactState, mu: float) -> ExactState:
    """Twisting unitary exp(-i mu J_z^2 / 2), diagonal in m."""
    m = _m_values(state)
    phases = np.exp(-0.5j * mu * m * m)
    return ExactState(state.amps * phases[:, None], state.n_atoms, state.n_photons)


def _s1_matrix(n_photons: int) -> np.ndarray:
    """S_1 = (a+^dag a- + a-^dag a+)/2 on the fixed-N_L photon space."""
    p = np.arange(n_photons)
    off = 0.5 * np.sqrt((p + 1.0) * (n_photons - p))
    mat = np.zeros((n_photons + 1, n_photons + 1))
    mat[p + 1, p] = off
    mat[p, p + 1] = off
    return mat


def stokes_rotation_exact(state: ExactState, axis: str, angle: float) -> ExactState:
    """exp(i angle S_1) applied per m-block on the photon index, exact.

    Only the S_1 axis (the waveplate generator) is supported.  The unitary
    is built once from the eigendecomposition of the (N_L+1)-dimensional
    tridiagonal S_1 and applied to every spin block.
    """
    if axis != "S1":
        raise ValueError(f"unsupported rotation axis {axis!r}, only 'S1'")
    w, v = np.linalg.eigh(_s1_matrix(state.n_photons))
    u = (v * np.exp(1j * angle * w)) @ v.conj().T
    return ExactState(state.amps @ u.T, state.n_atoms, state.n_photons)


def double_pass_exact(state: ExactState, chi: float, s1_angle: float = 0.5 * math.pi) -> ExactState:
    """Faraday pass, S_1 rotation (waveplate), second Faraday pass."""
    out = evolve_faraday_exact(state, chi)
    out = stokes_rotation_exact(out, "S1", s1_angle)
    return evolve_faraday_exact(out, chi)


# ---------------------------------------------------------------------------
# expectation values


def _apply_jz(state: ExactState) -> np.ndarray:
    return state.amps * _m_values(state)[:, None]


def _apply_jy(state: ExactState) -> np.ndarray:
    """(J_y psi) with J_y = (J_+ - J_-)/(2i) acting on the m index."""
    j = state.j
    m = _m_values(state)
    # <m|J+|m-1> = sqrt(J(J+1) - (m-1) m), <m|J-|m+1> = sqrt(J(J+1) - (m+1) m)
    up = np.sqrt(np.maximum(j * (j + 1.0) - (m - 1.0) * m, 0.0))
    down = np.sqrt(np.maximum(j * (j + 1.0) - (m + 1.0) * m, 0.0))
    out = np.zeros_like(state.amps)
    out[1:, :] += up[1:, None] * state.amps[:-1, :]
    out[:-1, :] -= down[:-1, None] * state.amps[1:, :]
    return out / 2j


def _apply_jx(state: ExactState) -> np.ndarray:
    j = state.j
    m = _m_values(state)
    up = np.sqrt(np.maximum(j * (j + 1.0) - (m - 1.0) * m, 0.0))
    down = np.sqrt(np.maximum(j * (j + 1.0) - (m + 1.0) * m, 0.0))
    out = np.zeros_like(state.amps)
    out[1:, :] += up[1:, None] * state.amps[:-1, :]
    out[:-1, :] += down[:-1, None] * state.amps[1:, :]
    return 0.5 * out


def spin_moments(state: ExactState) -> dict[str, float]:
    """Means and (central) second moments of the transverse spin components."""
    psi = state.amps
    phi_x = _apply_jx(state)
    phi_y = _apply_jy(state)
    phi_z = _apply_jz(state)
    jx = np.vdot(psi, phi_x).real
    jy = np.vdot(psi, phi_y).real
    jz = np.vdot(psi, phi_z).real
    var_y = np.vdot(phi_y, phi_y).real - jy * jy
    var_z = np.vdot(phi_z, phi_z).real - jz * jz
    cov_yz = np.vdot(phi_y, phi_z).real - jy * jz  # Re<J_y J_z> = <{J_y,J_z}>/2
    return {"jx": jx, "jy": jy, "jz": jz, "var_y": var_y, "var_z": var_z, "cov_yz": cov_yz}


def min_transverse_variance(state: ExactState) -> float:
    """Smallest variance of cos(t) J_y + sin(t) J_z over the angle t."""
    mom = spin_moments(state)
    a, b, c = mom["var_y"], mom["cov_yz"], mom["var_z"]
    return 0.5 * (a + c) - math.hypot(0.5 * (a - c), b)


def _apply_s2(state: ExactState) -> np.ndarray:
    """(S_2 psi) with S_2 = (a+^dag a- - a-^dag a+)/(2i) on the photon index."""
    n = state.n_photons
    p = np.arange(n + 1)
    raise_amp = np.sqrt(p * (n - p + 1.0))        # <p|a+^dag a-|p-1>
    lower_amp = np.sqrt((p + 1.0) * (n - p))      # <p|a-^dag a+|p+1>
    out = np.zeros_like(state.amps)
    out[:, 1:] += raise_amp[1:] * state.amps[:, :-1]
    out[:, :-1] -= lower_amp[:-1] * state.amps[:, 1:]
    return out / 2j


def light_moments(state: ExactState) -> dict[str, float]:
    """Mean and variance of S_2 and S_3, plus Var(X_L) = Var(S_2)/(N_L/2)."""
    psi = state.amps
    phi2 = _apply_s2(state)
    s3 = _s3_values(state)
    phi3 = state.amps * s3[None, :]
    m2 = np.vdot(psi, phi2).real
    m3 = np.vdot(psi, phi3).real
    var2 = np.vdot(phi2, phi2).real - m2 * m2
    var3 = np.vdot(phi3, phi3).real - m3 * m3
    out = {"s2": m2, "s3": m3, "var_s2": var2, "var_s3": var3}
    if state.n_photons > 0:
        out["var_xl"] = var2 / (0.5 * state.n_photons)
        out["var_pl"] = var3 / (0.5 * state.n_photons)
    return out


def chi_for_coupling(xi: float, n_atoms: int, n_photons: int) -> float:
    """Faraday angle chi realizing coupling strength xi = N_A N_L chi^2 / 4."""
    if n_atoms < 1 or n_photons < 1:
        raise ValueError("need n_atoms >= 1 and n_photons >= 1")
    return 2.0 * math.sqrt(xi / (n_atoms * n_photons))


def twist_for_coupling(xi: float, n_atoms: int) -> float:
    """Twist angle mu with exp(-i mu J_z^2/2) matching the shear of strength xi.

    X_A = J_y/sqrt(N_A/2) and P_A = J_z/sqrt(N_A/2) give
    exp(-i xi P_A^2/2) = exp(-i (2 xi / N_A) J_z^2 / 2), i.e. mu = 2 xi/N_A.
    """
    return 2.0 * xi / n_atoms


def ku_variance(n_atoms: int, mu: float) -> float:
    """Minimal transverse spin variance of a twisted coherent state, analytic.

    For |psi> = exp(-i mu J_z^2/2) |x>, with S = N_A/2, the exact moments

        <J_y^2>        = S/2 + (S/2)(S - 1/2)(1 - cos^(2S-2) mu)
        <J_z^2>        = S/2
        <{J_y,J_z}>/2  = S (S - 1/2) sin(mu/2) cos^(2S-2)(mu/2)

    follow from operator ordering on the product state; the minimum over
    quadrature angles is the smaller eigenvalue of that 2x2 moment matrix.
    """
    s = 0.5 * n_atoms
    a = 0.5 * s + 0.5 * s * (s - 0.5) * (1.0 - math.cos(mu) ** (n_atoms - 2))
    b = 0.5 * s
    c = s * (s - 0.5) * math.sin(0.5 * mu) * math.cos(0.5 * mu) ** (n_atoms - 2)
    return 0.5 * (a + b) - math.hypot(0.5 * (a - b), c)


def ku_mean_spin(n_atoms: int, mu: float) -> float:
    """<J_x> of the twisted coherent state: S cos^(2S-1)(mu/2)."""
    return 0.5 * n_atoms * math.cos(0.5 * mu) ** (n_atoms - 1)
