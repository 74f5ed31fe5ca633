"""Scalar 2x2 atom-block kernels for the segmented protocol inner loops.

A phase-matched run touches the atom covariance block thousands of times
per protocol call (once per segment, times ~100 objective evaluations when
rotations are optimized).  Between segments the state is atom-only and each
probe pulse enters in vacuum, so every segment reduces to a closed-form
affine update of the three numbers (cxx, cxp, cpp).  These kernels are the
plain-float form of exactly the same maps the GaussianState operations
implement; the test suite pins the two routes against each other.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .channels import DecayRates, scattering_factors

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0
INV_PHI2 = (3.0 - math.sqrt(5.0)) / 2.0


@dataclass(frozen=True)
class EraserKernel:
    """Precomputed coefficients of one eraser step on the atom block.

    For a fresh vacuum probe the double pass with inter-pass loss eps,
    followed by the noisy -45 degree measurement, acts on the atom block as
    a deterministic map of (cxx, cxp, cpp).  With the amplitude
    transmission t = 1 - eps and k = sqrt(xi):

        axx  = cxx + 2 xi t cxp + xi^2 t^2 cpp + xi
        axp  = cxp + xi t cpp
        cq_x = k (t-1)/sqrt2 (cxp + xi t cpp) + k (1+t)/(2 sqrt2)
        cq_p = k (t-1)/sqrt2 cpp
        V_m  = 1/2 + xi (1-t)^2 cpp / 2 + sigma2/2

    and the conditional update subtracts cq cq^T / V_m.
    """

    xi: float
    eps: float
    sigma2: float
    gain_mode: str = "conditioning"

    def __post_init__(self):
        t = 1.0 - self.eps
        k = math.sqrt(self.xi)
        object.__setattr__(self, "_t", t)
        object.__setattr__(self, "_k", k)
        object.__setattr__(self, "_kt", k * (t - 1.0) / math.sqrt(2.0))
        object.__setattr__(self, "_klight", k * (1.0 + t) / (2.0 * math.sqrt(2.0)))
        object.__setattr__(self, "_vbase", 0.5 + 0.5 * self.sigma2)
        object.__setattr__(self, "_vslope", 0.5 * self.xi * (1.0 - t) ** 2)

    def apply(self, cxx: float, cxp: float, cpp: float) -> tuple[float, float, float]:
        xi, t = self.xi, self._t
        shear = cxp + xi * t * cpp
        axx = cxx + 2.0 * xi * t * cxp + (xi * t) ** 2 * cpp + xi
        axp = cxp + xi * t * cpp
        cq_x = self._kt * shear + self._klight
        cq_p = self._kt * cpp
        v_m = self._vbase + self._vslope * cpp
        if self.gain_mode == "conditioning":
            return (
                axx - cq_x * cq_x / v_m,
                axp - cq_x * cq_p / v_m,
                cpp - cq_p * cq_p / v_m,
            )
        g = -math.sqrt(2.0 * self.xi)
        return (axx + 2.0 * g * cq_x + g * g * v_m, axp + g * cq_p, cpp)


@dataclass(frozen=True)
class ScatterKernel:
    """Precomputed per-segment scattering factors on the atom block."""

    rates: DecayRates

    def __post_init__(self):
        g1, g2, n1, n2, extra = scattering_factors(self.rates)
        object.__setattr__(self, "_g1sq", g1 * g1)
        object.__setattr__(self, "_g2sq", g2 * g2)
        object.__setattr__(self, "_g12", g1 * g2)
        object.__setattr__(self, "_n1", n1 + extra)
        object.__setattr__(self, "_n2", n2 + extra)
        object.__setattr__(self, "contrast_factor", math.exp(-self.rates.gamma_perp_tau))

    def apply(self, cxx: float, cxp: float, cpp: float) -> tuple[float, float, float]:
        if self.rates.is_zero:
            return cxx, cxp, cpp
        return (
            self._g1sq * cxx + self._n1,
            self._g12 * cxp,
            self._g2sq * cpp + self._n2,
        )


def rotate(cxx: float, cxp: float, cpp: float, phi: float) -> tuple[float, float, float]:
    c, s = math.cos(phi), math.sin(phi)
    cc, ss, cs = c * c, s * s, c * s
    return (
        cc * cxx - 2.0 * cs * cxp + ss * cpp,
        cs * (cxx - cpp) + (cc - ss) * cxp,
        ss * cxx + 2.0 * cs * cxp + cc * cpp,
    )


def lam_min(cxx: float, cxp: float, cpp: float) -> float:
    return 0.5 * (cxx + cpp) - math.hypot(0.5 * (cxx - cpp), cxp)


def golden_section(f, a: float, b: float, tol: float = 1e-9) -> float:
    """Golden-section minimizer of a unimodal f on [a, b], absolute tolerance on x."""
    h = b - a
    if h <= tol:
        return 0.5 * (a + b)
    c = a + INV_PHI2 * h
    d = a + INV_PHI * h
    yc, yd = f(c), f(d)
    while h > tol:
        h *= INV_PHI
        if yc < yd:
            b, d, yd = d, c, yc
            c = a + INV_PHI2 * h
            yc = f(c)
        else:
            a, c, yc = c, d, yd
            d = a + INV_PHI * h
            yd = f(d)
    return 0.5 * (a + b)


GRID_POINTS = 64
FLAT_TOL = 1e-13


def best_rotation(
    cxx: float,
    cxp: float,
    cpp: float,
    eraser: EraserKernel,
    scatter: ScatterKernel,
    tol: float = 1e-9,
) -> float:
    """Rotation angle minimizing the post-(rotate, eraser, scatter) minimum variance.

    Coarse 64-point scan of [-pi/2, pi/2] to bracket the global minimum,
    then golden-section refinement; a flat objective (within FLAT_TOL of
    its scale) and ties prefer the smallest |phi|.
    """

    def objective(phi: float) -> float:
        x, p, q = rotate(cxx, cxp, cpp, phi)
        x, p, q = eraser.apply(x, p, q)
        x, p, q = scatter.apply(x, p, q)
        return lam_min(x, p, q)

    half = 0.5 * math.pi
    step = 2.0 * half / GRID_POINTS
    phis = [-half + (i + 0.5) * step for i in range(GRID_POINTS)]
    vals = [objective(p) for p in phis]
    lo, hi = min(vals), max(vals)
    scale = max(abs(lo), abs(hi), 1.0)
    if hi - lo <= FLAT_TOL * scale:
        return 0.0
    # among near-ties at the coarse level, start from the smallest |phi|
    best = min(range(GRID_POINTS), key=lambda i: (vals[i] > lo + FLAT_TOL * scale, abs(phis[i])))
    a = max(-half, phis[best] - step)
    b = min(half, phis[best] + step)
    phi_star = golden_section(objective, a, b, tol)
    if objective(0.0) <= objective(phi_star):
        return 0.0
    return phi_star
